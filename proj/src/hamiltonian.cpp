#include "lightmu/hamiltonian.hpp"

#include "lightmu/error.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace lightmu::hamiltonian {

using fock::cplx;
using fock::SparseMatrix;
using fock::SparseOperator;

void LatticeSpec::validate() const {
    if (n_sites == 0) throw ArgumentError("LatticeSpec: n_sites must be >= 1");
    std::set<Edge> seen;
    for (const auto& [i, j] : edges) {
        if (i >= n_sites || j >= n_sites) {
            throw ArgumentError(fmt::format("LatticeSpec: edge ({}, {}) references a missing site", i, j));
        }
        if (i == j) throw ArgumentError(fmt::format("LatticeSpec: self-loop on site {}", i));
        const Edge key{std::min(i, j), std::max(i, j)};
        if (!seen.insert(key).second) {
            throw ArgumentError(fmt::format("LatticeSpec: duplicate edge ({}, {})", i, j));
        }
    }
}

std::vector<Edge> ring_lattice(std::size_t n_sites) {
    if (n_sites < 2) throw ArgumentError("ring_lattice: need at least 2 sites");
    if (n_sites == 2) return {{0, 1}};
    std::vector<Edge> edges;
    edges.reserve(n_sites);
    for (std::size_t i = 0; i < n_sites; ++i) edges.emplace_back(i, (i + 1) % n_sites);
    return edges;
}

std::vector<std::size_t> degrees(const LatticeSpec& spec) {
    std::vector<std::size_t> deg(spec.n_sites, 0);
    for (const auto& [i, j] : spec.edges) {
        ++deg[i];
        ++deg[j];
    }
    return deg;
}

SparseOperator bose_hubbard(const fock::FockBasis& basis, const LatticeSpec& spec) {
    spec.validate();
    if (basis.n_sites() != spec.n_sites) {
        throw ArgumentError(fmt::format("bose_hubbard: basis has {} sites, lattice has {}",
                                        basis.n_sites(), spec.n_sites));
    }
    const auto dim = basis.dimension();
    const int n_max = basis.n_max();
    std::vector<Eigen::Triplet<cplx, int>> trip;
    trip.reserve(dim * (1 + 2 * spec.edges.size()));

    for (std::size_t k = 0; k < dim; ++k) {
        double e = 0.0;
        for (std::size_t i = 0; i < basis.n_sites(); ++i) {
            const double n = basis.occupation(k, i);
            e += 0.5 * spec.U * n * (n - 1.0) - spec.mu * n;
        }
        if (e != 0.0) trip.emplace_back(int(k), int(k), cplx{e, 0.0});
    }

    if (spec.J != 0.0) {
        for (const auto& [i, j] : spec.edges) {
            // a_i^dag a_j |k>: move one boson from j to i, and the reverse.
            for (const auto& [to, from] : {Edge{i, j}, Edge{j, i}}) {
                for (std::size_t k = 0; k < dim; ++k) {
                    const int n_from = basis.occupation(k, from);
                    const int n_to = basis.occupation(k, to);
                    if (n_from == 0 || n_to == n_max) continue;
                    const std::size_t l = k - basis.stride(from) + basis.stride(to);
                    const double amp = -spec.J * std::sqrt(double(n_from) * double(n_to + 1));
                    trip.emplace_back(int(l), int(k), cplx{amp, 0.0});
                }
            }
        }
    }
    SparseMatrix m{int(dim), int(dim)};
    m.setFromTriplets(trip.begin(), trip.end());
    return SparseOperator(std::move(m));
}

Eigen::VectorXcd EigenSystem::vector(std::size_t k) const {
    if (k >= dimension()) throw IndexError("EigenSystem::vector: index out of range");
    return Eigen::VectorXcd(vectors.col(int(k)));
}

SparseMatrix EigenSystem::to_eigenbasis(const SparseOperator& op) const {
    if (op.dimension() != dimension()) {
        throw ArgumentError("EigenSystem::to_eigenbasis: dimension mismatch");
    }
    const SparseMatrix vdag = vectors.adjoint();
    SparseMatrix out = vdag * (op.matrix() * vectors);
    out.prune(cplx{0.0, 0.0}, 0.0);
    return out;
}

namespace {

struct Column {
    double energy;
    int number;
    std::size_t order; // insertion order, final tie-breaker
    std::vector<std::pair<int, cplx>> entries;
};

double commutator_norm(const SparseOperator& a, const SparseOperator& b) {
    return ((a * b) - (b * a)).max_abs();
}

bool is_diagonal(const SparseMatrix& m) {
    for (int c = 0; c < m.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
            if (it.row() != it.col() && it.value() != cplx{0.0, 0.0}) return false;
        }
    }
    return true;
}

int nearest_integer_checked(double x, double tol) {
    const double r = std::round(x);
    if (std::abs(x - r) > tol) {
        throw ConsistencyError(fmt::format(
            "diagonalize: eigenvector has non-integer photon number {:.12g}", x));
    }
    return static_cast<int>(r);
}

EigenSystem assemble(std::vector<Column> cols, std::size_t dim) {
    std::sort(cols.begin(), cols.end(), [](const Column& a, const Column& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        if (a.number != b.number) return a.number < b.number;
        return a.order < b.order;
    });
    EigenSystem eig;
    eig.energies.resize(Eigen::Index(dim));
    eig.photon_number.resize(dim);
    std::vector<Eigen::Triplet<cplx, int>> trip;
    for (std::size_t k = 0; k < dim; ++k) {
        eig.energies[Eigen::Index(k)] = cols[k].energy;
        eig.photon_number[k] = cols[k].number;
        for (const auto& [row, v] : cols[k].entries) trip.emplace_back(row, int(k), v);
    }
    eig.vectors.resize(int(dim), int(dim));
    eig.vectors.setFromTriplets(trip.begin(), trip.end());
    eig.vectors.makeCompressed();
    return eig;
}

template <typename Solver, typename Block>
void solve_block(const Block& block, const std::vector<int>& rows, int number,
                 std::vector<Column>& out) {
    Solver solver(block);
    if (solver.info() != Eigen::Success) throw SolverError("diagonalize: eigensolver failed");
    const auto& vecs = solver.eigenvectors();
    for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
        Column col{solver.eigenvalues()[c], number, out.size(), {}};
        col.entries.reserve(rows.size());
        for (Eigen::Index r = 0; r < vecs.rows(); ++r) {
            const cplx v = vecs(r, c);
            if (v != cplx{0.0, 0.0}) col.entries.emplace_back(rows[std::size_t(r)], v);
        }
        out.push_back(std::move(col));
    }
}

// N diagonal in the working basis: diagonalize each number sector separately.
EigenSystem diagonalize_by_sector(const SparseOperator& H, const SparseOperator& n_op,
                                  const DiagonalizeOptions& opt) {
    const auto dim = H.dimension();
    const Eigen::VectorXcd ndiag = Eigen::VectorXcd(n_op.matrix().diagonal());
    std::map<int, std::vector<int>> sectors;
    for (std::size_t k = 0; k < dim; ++k) {
        if (std::abs(ndiag[Eigen::Index(k)].imag()) > opt.number_integer_tol) {
            throw ConsistencyError("diagonalize: number operator has complex diagonal");
        }
        sectors[nearest_integer_checked(ndiag[Eigen::Index(k)].real(), opt.number_integer_tol)]
            .push_back(int(k));
    }

    std::vector<Eigen::Index> local(dim, -1);
    std::vector<Column> cols;
    cols.reserve(dim);
    const SparseMatrix& hm = H.matrix();
    for (const auto& [number, rows] : sectors) {
        const auto n = Eigen::Index(rows.size());
        for (Eigen::Index a = 0; a < n; ++a) local[std::size_t(rows[std::size_t(a)])] = a;
        Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, n);
        for (Eigen::Index b = 0; b < n; ++b) {
            for (SparseMatrix::InnerIterator it(hm, rows[std::size_t(b)]); it; ++it) {
                const Eigen::Index a = local[std::size_t(it.row())];
                // [H, N] = 0 was checked, so entries outside the sector vanish.
                if (a >= 0 && rows[std::size_t(a)] == it.row()) block(a, b) = it.value();
            }
        }
        if (block.imag().cwiseAbs().maxCoeff() == 0.0) {
            solve_block<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>>(
                Eigen::MatrixXd(block.real()), rows, number, cols);
        } else {
            solve_block<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>>(block, rows, number, cols);
        }
    }
    return assemble(std::move(cols), dim);
}

// General route: full dense eigensolve, then rotate each degenerate energy
// cluster onto eigenvectors of N.
EigenSystem diagonalize_dense(const SparseOperator& H, const SparseOperator& n_op,
                              const DiagonalizeOptions& opt) {
    const auto dim = Eigen::Index(H.dimension());
    const Eigen::MatrixXcd h = Eigen::MatrixXcd(H.matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw SolverError("diagonalize: eigensolver failed");
    const Eigen::VectorXd& eps = solver.eigenvalues();
    Eigen::MatrixXcd vecs = solver.eigenvectors();

    const double scale = eps.cwiseAbs().maxCoeff();
    const double tol = opt.cluster_rel_tol * std::max(scale, 1.0);
    const Eigen::MatrixXcd n_dense = Eigen::MatrixXcd(n_op.matrix());

    std::vector<Column> cols;
    cols.reserve(std::size_t(dim));
    Eigen::Index start = 0;
    while (start < dim) {
        Eigen::Index stop = start + 1;
        while (stop < dim && eps[stop] - eps[stop - 1] <= tol) ++stop;
        const Eigen::Index width = stop - start;
        Eigen::MatrixXcd block = vecs.middleCols(start, width);
        const Eigen::MatrixXcd n_small = block.adjoint() * n_dense * block;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> rot(n_small);
        block = block * rot.eigenvectors();
        for (Eigen::Index c = 0; c < width; ++c) {
            const Eigen::VectorXcd v = block.col(c);
            const double energy = (v.adjoint() * h * v)(0, 0).real();
            const int number = nearest_integer_checked(rot.eigenvalues()[c], opt.number_integer_tol);
            Column col{energy, number, cols.size(), {}};
            for (Eigen::Index r = 0; r < dim; ++r) {
                if (v[r] != cplx{0.0, 0.0}) col.entries.emplace_back(int(r), v[r]);
            }
            cols.push_back(std::move(col));
        }
        start = stop;
    }
    return assemble(std::move(cols), std::size_t(dim));
}

} // namespace

EigenSystem diagonalize(const SparseOperator& H, const SparseOperator& n_op,
                        const DiagonalizeOptions& options) {
    if (H.dimension() != n_op.dimension()) throw ArgumentError("diagonalize: dimension mismatch");
    if (H.dimension() == 0) throw ArgumentError("diagonalize: empty operator");
    if (!H.is_hermitian()) throw ConsistencyError("diagonalize: H is not Hermitian");
    if (!n_op.is_hermitian()) throw ConsistencyError("diagonalize: number operator is not Hermitian");
    const double comm = commutator_norm(H, n_op);
    if (comm > options.commutator_tol) {
        throw ConsistencyError(fmt::format(
            "diagonalize: [H, N] has max entry {:.3e}; H contains number-changing terms", comm));
    }
    if (!options.force_dense && is_diagonal(n_op.matrix())) {
        return diagonalize_by_sector(H, n_op, options);
    }
    return diagonalize_dense(H, n_op, options);
}

} // namespace lightmu::hamiltonian
