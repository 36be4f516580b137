#include "lightmu/steadystate.hpp"

#include "lightmu/error.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseQR>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lightmu::steadystate {

using fock::cplx;
using RealSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

std::vector<std::vector<std::size_t>> closed_classes(const rates::RateMatrix& rm) {
    const auto& W = rm.W;
    const auto n = std::size_t(W.cols());
    std::vector<std::vector<std::size_t>> adj(n);
    for (int k = 0; k < W.outerSize(); ++k) {
        for (RealSparse::InnerIterator it(W, k); it; ++it) {
            if (it.row() != k && it.value() > 0.0) adj[std::size_t(k)].push_back(std::size_t(it.row()));
        }
    }

    // Iterative Tarjan.
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call; // (node, next edge)
    std::size_t counter = 0, n_comp = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unset) continue;
        call.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, e] = call.back();
            if (e < adj[v].size()) {
                const std::size_t w = adj[v][e++];
                if (index[w] == unset) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = n_comp;
                } while (w != v);
                ++n_comp;
            }
            const std::size_t done = v;
            call.pop_back();
            if (!call.empty()) {
                const std::size_t parent = call.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }

    std::vector<bool> leaks(n_comp, false);
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t w : adj[v]) {
            if (comp[w] != comp[v]) leaks[comp[v]] = true;
        }
    }
    std::vector<std::vector<std::size_t>> members(n_comp);
    for (std::size_t v = 0; v < n; ++v) members[comp[v]].push_back(v);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t c = 0; c < n_comp; ++c) {
        if (!leaks[c]) out.push_back(std::move(members[c]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

SteadyState solve_steady(const rates::RateMatrix& rm, double tol) {
    const auto n = Eigen::Index(rm.dimension());
    if (n == 0) throw ArgumentError("solve_steady: empty rate matrix");

    const auto classes = closed_classes(rm);
    if (classes.size() > 1) {
        std::vector<std::string> parts;
        for (const auto& c : classes) {
            const std::size_t shown = std::min<std::size_t>(c.size(), 8);
            parts.push_back(fmt::format("{{{}{}}}",
                                        fmt::join(c.begin(), c.begin() + long(shown), ","),
                                        c.size() > shown ? ",..." : ""));
        }
        throw DegeneracyError(fmt::format(
            "solve_steady: {} disconnected closed components, stationary state not unique: {}",
            classes.size(), fmt::join(parts, " ")));
    }

    // Least squares on [W; 1^T] p = [0; 1].
    std::vector<Eigen::Triplet<double, int>> trip;
    trip.reserve(std::size_t(rm.W.nonZeros() + n));
    for (int k = 0; k < rm.W.outerSize(); ++k) {
        for (RealSparse::InnerIterator it(rm.W, k); it; ++it) trip.emplace_back(int(it.row()), k, it.value());
        trip.emplace_back(int(n), k, 1.0);
    }
    RealSparse A(int(n + 1), int(n));
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    b[n] = 1.0;

    Eigen::SparseQR<RealSparse, Eigen::COLAMDOrdering<int>> qr;
    qr.compute(A);
    if (qr.info() != Eigen::Success) throw SolverError("solve_steady: QR factorization failed");
    Eigen::VectorXd p = qr.solve(b);
    // One step of iterative refinement.
    const Eigen::VectorXd r = b - A * p;
    p += qr.solve(r);
    if (qr.info() != Eigen::Success || !p.allFinite()) {
        throw SolverError("solve_steady: least-squares solve failed");
    }

    const double most_negative = p.minCoeff();
    if (most_negative < -1e-10) {
        throw SolverError(fmt::format("solve_steady: population {:.3e} is negative", most_negative));
    }
    p = p.cwiseMax(0.0);
    p /= p.sum();

    SteadyState out;
    out.populations = std::move(p);
    out.residual = (rm.W * out.populations).cwiseAbs().maxCoeff();
    if (!(out.residual <= tol)) {
        throw SolverError(fmt::format("solve_steady: residual {:.3e} above tolerance {:.3e}",
                                      out.residual, tol));
    }
    return out;
}

namespace {

void check_populations(const SteadyState& state, const hamiltonian::EigenSystem& eig) {
    if (std::size_t(state.populations.size()) != eig.dimension()) {
        throw ArgumentError("steady-state populations do not match the eigensystem dimension");
    }
}

// <k|O|k> for every eigenvector k.
Eigen::VectorXd diagonal_expectations(const hamiltonian::EigenSystem& eig, const fock::SparseMatrix& op) {
    const fock::SparseMatrix ov = op * eig.vectors;
    const fock::SparseMatrix prod = eig.vectors.conjugate().cwiseProduct(ov);
    const Eigen::RowVectorXcd sums = Eigen::RowVectorXcd::Ones(prod.rows()) * prod;
    return sums.real().transpose();
}

} // namespace

double mandel_q(const SteadyState& state, const hamiltonian::EigenSystem& eig,
                const std::vector<fock::SparseOperator>& number_ops) {
    check_populations(state, eig);
    if (number_ops.empty()) throw ArgumentError("mandel_q: no number operators given");
    double n1 = 0.0, n2 = 0.0;
    for (const auto& n_op : number_ops) {
        if (n_op.dimension() != eig.dimension()) throw ArgumentError("mandel_q: dimension mismatch");
        const fock::SparseMatrix sq = n_op.matrix() * n_op.matrix();
        n1 += state.populations.dot(diagonal_expectations(eig, n_op.matrix()));
        n2 += state.populations.dot(diagonal_expectations(eig, sq));
    }
    n1 /= double(number_ops.size());
    n2 /= double(number_ops.size());
    if (!(n1 > 0.0)) throw UndefinedError("mandel_q: mean occupation is zero, Q undefined");
    return (n2 - n1 * n1 - n1) / n1;
}

double coherence(const SteadyState& state, const hamiltonian::EigenSystem& eig,
                 const std::vector<fock::SparseOperator>& annihilators,
                 const std::vector<hamiltonian::Edge>& edges) {
    check_populations(state, eig);
    if (edges.empty()) throw ArgumentError("coherence: lattice has no edges");
    std::vector<fock::SparseMatrix> av;
    av.reserve(annihilators.size());
    for (const auto& a : annihilators) {
        if (a.dimension() != eig.dimension()) throw ArgumentError("coherence: dimension mismatch");
        av.push_back(a.matrix() * eig.vectors);
    }
    double total = 0.0;
    for (const auto& [i, j] : edges) {
        if (i >= av.size() || j >= av.size()) throw IndexError("coherence: edge references a missing site");
        // <k|a_i^dag a_j|k> = (a_i v_k)^dag (a_j v_k)
        const fock::SparseMatrix prod = av[i].conjugate().cwiseProduct(av[j]);
        const Eigen::RowVectorXcd per_state = Eigen::RowVectorXcd::Ones(prod.rows()) * prod;
        const cplx mean = per_state * state.populations.cast<cplx>();
        total += std::sqrt(std::abs(mean));
    }
    return total / double(edges.size());
}

Eigen::VectorXd grand_canonical(const hamiltonian::EigenSystem& eig, double beta) {
    if (!(beta > 0.0)) throw ArgumentError("grand_canonical: beta must be > 0");
    const Eigen::VectorXd& e = eig.energies;
    const double e0 = e.minCoeff();
    Eigen::VectorXd p(e.size());
    if (std::isinf(beta)) {
        const double tol = 1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff());
        for (Eigen::Index k = 0; k < e.size(); ++k) p[k] = (e[k] - e0 <= tol) ? 1.0 : 0.0;
    } else {
        for (Eigen::Index k = 0; k < e.size(); ++k) p[k] = std::exp(-beta * (e[k] - e0));
    }
    return p / p.sum();
}

std::vector<double> number_distribution(const Eigen::VectorXd& populations,
                                        const hamiltonian::EigenSystem& eig) {
    if (std::size_t(populations.size()) != eig.dimension()) {
        throw ArgumentError("number_distribution: dimension mismatch");
    }
    const int n_top = *std::max_element(eig.photon_number.begin(), eig.photon_number.end());
    std::vector<double> out(std::size_t(n_top) + 1, 0.0);
    for (std::size_t k = 0; k < eig.dimension(); ++k) {
        out[std::size_t(eig.photon_number[k])] += populations[Eigen::Index(k)];
    }
    return out;
}

} // namespace lightmu::steadystate
