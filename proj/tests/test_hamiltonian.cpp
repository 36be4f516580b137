#include "lightmu/error.hpp"
#include "lightmu/hamiltonian.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace lightmu;
using namespace lightmu::hamiltonian;

namespace {

LatticeSpec ring(std::size_t n, double U, double mu, double J) {
    return LatticeSpec{n, ring_lattice(n), U, mu, J};
}

double e0(int n, double U, double mu) { return 0.5 * U * n * (n - 1) - mu * n; }

void check_invariants(const EigenSystem& eig, const fock::SparseOperator& H,
                      const fock::SparseOperator& N) {
    const auto dim = Eigen::Index(eig.dimension());
    for (Eigen::Index k = 1; k < dim; ++k) CHECK(eig.energies[k - 1] <= eig.energies[k]);
    const Eigen::MatrixXcd V(eig.vectors);
    const Eigen::MatrixXcd gram = V.adjoint() * V;
    CHECK((gram - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXcd h(H.matrix()), n(N.matrix());
    for (Eigen::Index k = 0; k < dim; ++k) {
        const Eigen::VectorXcd v = V.col(k);
        CHECK((h * v - eig.energies[k] * v).norm() < 1e-9);
        CHECK((n * v - double(eig.photon_number[std::size_t(k)]) * v).norm() < 1e-8);
    }
}

} // namespace

TEST_CASE("ring_lattice") {
    const std::vector<Edge> four{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    CHECK(ring_lattice(4) == four);
    CHECK(ring_lattice(2) == std::vector<Edge>{{0, 1}});
    const auto six = ring(6, 1, 0, 0);
    CHECK(six.edges.size() == 6);
    for (auto d : degrees(six)) CHECK(d == 2);
    CHECK_THROWS_AS(ring_lattice(1), ArgumentError);
}

TEST_CASE("LatticeSpec validation") {
    CHECK_THROWS_AS((LatticeSpec{3, {{0, 0}}, 1, 0, 0}.validate()), ArgumentError);
    CHECK_THROWS_AS((LatticeSpec{3, {{0, 1}, {1, 0}}, 1, 0, 0}.validate()), ArgumentError);
    CHECK_THROWS_AS((LatticeSpec{3, {{0, 3}}, 1, 0, 0}.validate()), ArgumentError);
    const auto b = fock::build_basis(3, 1);
    CHECK_THROWS_AS(bose_hubbard(b, ring(4, 1, 0, 0)), ArgumentError);
}

TEST_CASE("single-site Hamiltonian diagonal") {
    const auto b = fock::build_basis(1, 2);
    const auto H = bose_hubbard(b, LatticeSpec{1, {}, 1.0, 0.4, 0.0});
    const Eigen::MatrixXcd h(H.matrix());
    CHECK(h(0, 0).real() == doctest::Approx(0.0));
    CHECK(h(1, 1).real() == doctest::Approx(-0.4));
    CHECK(h(2, 2).real() == doctest::Approx(0.2));
    CHECK(H.is_hermitian());

    const auto eig = diagonalize(H, fock::number_operator(b));
    CHECK(eig.energies[0] == doctest::Approx(-0.4));
    CHECK(eig.photon_number[0] == 1);
}

TEST_CASE("two sites, n_max = 1: N = 1 sector splits to -mu -/+ J") {
    const double mu = 0.3, J = 0.12;
    const auto b = fock::build_basis(2, 1);
    const auto H = bose_hubbard(b, ring(2, 1.0, mu, J));
    const auto eig = diagonalize(H, fock::number_operator(b));
    std::vector<double> one;
    for (std::size_t k = 0; k < eig.dimension(); ++k)
        if (eig.photon_number[k] == 1) one.push_back(eig.energies[Eigen::Index(k)]);
    REQUIRE(one.size() == 2);
    CHECK(one[0] == doctest::Approx(-mu - J).epsilon(1e-14));
    CHECK(one[1] == doctest::Approx(-mu + J).epsilon(1e-14));
}

TEST_CASE("J = 0: spectrum is all decoupled-site sums") {
    const double U = 1.0, mu = 0.37;
    const auto b = fock::build_basis(3, 3);
    const auto H = bose_hubbard(b, ring(3, U, mu, 0.0));
    const auto eig = diagonalize(H, fock::number_operator(b));
    std::vector<double> expect;
    for (std::size_t k = 0; k < b.dimension(); ++k) {
        double e = 0;
        for (int n : b.state(k)) e += e0(n, U, mu);
        expect.push_back(e);
    }
    std::sort(expect.begin(), expect.end());
    for (std::size_t k = 0; k < expect.size(); ++k)
        CHECK(std::abs(eig.energies[Eigen::Index(k)] - expect[k]) < 1e-12);
}

TEST_CASE("identity-like H: all energies zero, numbers = basis occupations") {
    const auto b = fock::build_basis(2, 2);
    const auto H = bose_hubbard(b, ring(2, 0.0, 0.0, 0.0));
    const auto eig = diagonalize(H, fock::number_operator(b));
    std::vector<int> got = eig.photon_number, expect;
    for (std::size_t k = 0; k < b.dimension(); ++k) expect.push_back(b.total(k));
    std::sort(got.begin(), got.end());
    std::sort(expect.begin(), expect.end());
    CHECK(got == expect);
    CHECK(eig.energies.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("4-site ring at (J, mu) = (0.1, 0.4): ground state is the N = 4 Mott state") {
    const auto b = fock::build_basis(4, 3);
    const auto H = bose_hubbard(b, ring(4, 1.0, 0.4, 0.1));
    const auto N = fock::number_operator(b);

    // Oracle: plain dense eigensolve of the full matrix, ground-state <N>.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> dense{Eigen::MatrixXcd(H.matrix())};
    const Eigen::VectorXcd g = dense.eigenvectors().col(0);
    const double n_ground = (g.adjoint() * Eigen::MatrixXcd(N.matrix()) * g)(0, 0).real();
    CHECK(n_ground == doctest::Approx(4.0).epsilon(1e-10));

    const auto eig = diagonalize(H, N);
    CHECK(eig.photon_number[0] == 4);
    CHECK(eig.energies[0] == doctest::Approx(dense.eigenvalues()[0]).epsilon(1e-12));
    CHECK((eig.energies - dense.eigenvalues()).cwiseAbs().maxCoeff() < 1e-11);
    check_invariants(eig, H, N);
}

TEST_CASE("sector and dense-cluster routes agree") {
    const auto b = fock::build_basis(3, 2);
    const auto N = fock::number_operator(b);
    for (double J : {0.0, 0.05, 0.2}) {
        const auto H = bose_hubbard(b, ring(3, 1.0, 0.5, J));
        const auto fast = diagonalize(H, N);
        DiagonalizeOptions opt;
        opt.force_dense = true;
        const auto slow = diagonalize(H, N, opt);
        CHECK((fast.energies - slow.energies).cwiseAbs().maxCoeff() < 1e-12);
        check_invariants(slow, H, N);
        check_invariants(fast, H, N);
        // Photon-number multisets agree within each energy cluster.
        std::vector<std::pair<long, int>> a, c;
        for (std::size_t k = 0; k < fast.dimension(); ++k) {
            a.emplace_back(std::lround(fast.energies[Eigen::Index(k)] * 1e8), fast.photon_number[k]);
            c.emplace_back(std::lround(slow.energies[Eigen::Index(k)] * 1e8), slow.photon_number[k]);
        }
        std::sort(a.begin(), a.end());
        std::sort(c.begin(), c.end());
        CHECK(a == c);
    }
}

TEST_CASE("spectrum is invariant under site relabeling") {
    const auto b = fock::build_basis(4, 2);
    const auto N = fock::number_operator(b);
    const auto H1 = bose_hubbard(b, ring(4, 1.0, 0.6, 0.15));
    // Same ring with sites permuted 0->2, 1->0, 2->3, 3->1.
    LatticeSpec perm{4, {{2, 0}, {0, 3}, {3, 1}, {1, 2}}, 1.0, 0.6, 0.15};
    const auto H2 = bose_hubbard(b, perm);
    const auto e1 = diagonalize(H1, N).energies;
    const auto e2 = diagonalize(H2, N).energies;
    CHECK((e1 - e2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("diagonalize rejects number-changing Hamiltonians") {
    const auto b = fock::build_basis(2, 2);
    const auto a0 = fock::annihilation(b, 0);
    const auto H = bose_hubbard(b, ring(2, 1.0, 0.3, 0.1)) + a0 + a0.adjoint();
    CHECK_THROWS_AS(diagonalize(H, fock::number_operator(b)), ConsistencyError);
    CHECK_THROWS_AS(diagonalize(a0, fock::number_operator(b)), ConsistencyError);
}
