#include "lightmu/error.hpp"
#include "lightmu/rates.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace lightmu;
using namespace lightmu::rates;
using hamiltonian::LatticeSpec;

namespace {

struct Lattice {
    fock::FockBasis basis;
    hamiltonian::EigenSystem eig;
    std::vector<fock::SparseOperator> a;
};

Lattice make(std::size_t sites, int n_max, double mu, double J) {
    auto b = fock::build_basis(sites, n_max);
    LatticeSpec spec{sites, sites > 1 ? hamiltonian::ring_lattice(sites) : std::vector<hamiltonian::Edge>{},
                     1.0, mu, J};
    auto eig = hamiltonian::diagonalize(hamiltonian::bose_hubbard(b, spec), fock::number_operator(b));
    std::vector<fock::SparseOperator> a;
    for (std::size_t i = 0; i < sites; ++i) a.push_back(fock::annihilation(b, i));
    return {std::move(b), std::move(eig), std::move(a)};
}

// Oracle: Bose function from exp directly.
double bose_oracle(double x) { return 1.0 / (std::exp(x) - 1.0); }

} // namespace

TEST_CASE("n_th") {
    CHECK(n_th(1.0, std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(n_th(10.0, 100.0) == doctest::Approx(0.0));
    CHECK(n_th(10.0, 0.4) == doctest::Approx(bose_oracle(4.0)).epsilon(1e-13));
    CHECK(n_th(10.0, 0.4) == doctest::Approx(0.018657).epsilon(1e-4));
    CHECK(std::isinf(n_th(1.0, 0.0)));
    CHECK_THROWS_AS(n_th(1.0, -0.1), ArgumentError);
    CHECK_THROWS_AS(n_th(0.0, 0.1), ArgumentError);
}

TEST_CASE("ohmic_weight") {
    const auto zero = ohmic_weight(10.0, 0.0, 0.01, 1.0);
    CHECK(zero.absorb == doctest::Approx(0.001));
    CHECK(zero.emit == doctest::Approx(0.001));
    // Continuity at delta -> 0.
    const auto tiny = ohmic_weight(10.0, 1e-9, 0.01, 1.0);
    CHECK(tiny.absorb == doctest::Approx(0.001).epsilon(1e-6));

    for (double d : {-1.3, -0.2, 0.05, 0.4, 2.0}) {
        const auto w = ohmic_weight(3.0, d, 0.02, 1.0);
        CHECK(w.absorb / w.emit == doctest::Approx(std::exp(-3.0 * std::abs(d))).epsilon(1e-12));
    }
    const auto w = ohmic_weight(10.0, 0.4, 0.01, 1.0);
    CHECK(w.emit == doctest::Approx(0.01 * 0.4 * (1.0 + bose_oracle(4.0))).epsilon(1e-13));
    CHECK(w.emit == doctest::Approx(4.0746e-3).epsilon(1e-4));
}

TEST_CASE("single site rates at mu = 0.4") {
    const auto L = make(1, 3, 0.4, 0.0);
    const auto rm = build_rates(L.eig, L.a, BathParams{0.01, 0.003, 10.0, 1.0});
    // eigenstates are sorted by energy: |1> (-0.4), |0> (0), |2> (0.2), |3> (1.8)
    auto idx = [&](int n) {
        for (std::size_t k = 0; k < L.eig.dimension(); ++k)
            if (L.eig.photon_number[k] == n) return k;
        return std::size_t(99);
    };
    const double expect = 0.01 * 0.4 * (bose_oracle(4.0) + 1.0);
    CHECK(rm.rate(idx(1), idx(0)) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(rm.rate(idx(1), idx(0)) == doctest::Approx(4.0746e-3).epsilon(1e-4));
    // 1 -> 0 costs 0.4: gamma N_th + kappa
    CHECK(rm.rate(idx(0), idx(1)) ==
          doctest::Approx(0.01 * 0.4 * bose_oracle(4.0) + 0.003).epsilon(1e-13));
    // 2 -> 1 lowers by 0.6, matrix element 2
    CHECK(rm.rate(idx(1), idx(2)) ==
          doctest::Approx(2.0 * (0.01 * 0.6 * (bose_oracle(6.0) + 1.0) + 0.003)).epsilon(1e-13));
    CHECK(rm.rate(idx(2), idx(0)) == 0.0);
    CHECK(rm.max_column_sum() < 1e-12);
}

TEST_CASE("kappa-only limit is a pure loss cascade") {
    const auto L = make(1, 4, 0.4, 0.0);
    const auto rm = build_rates(L.eig, L.a, BathParams{0.0, 0.003, 10.0, 1.0});
    for (std::size_t k = 0; k < L.eig.dimension(); ++k) {
        for (std::size_t l = 0; l < L.eig.dimension(); ++l) {
            if (k == l) continue;
            const int nk = L.eig.photon_number[k], nl = L.eig.photon_number[l];
            if (nl == nk - 1) CHECK(rm.rate(l, k) == doctest::Approx(0.003 * nk).epsilon(1e-13));
            else CHECK(rm.rate(l, k) == 0.0);
        }
    }
}

TEST_CASE("4-site ring: selection rule, column sums, detailed balance at kappa = 0") {
    const auto L = make(4, 3, 0.4, 0.1);
    const double beta = 10.0;
    const auto rm = build_rates(L.eig, L.a, BathParams{0.01, 0.0, beta, 1.0});
    CHECK(rm.max_column_sum() < 1e-12);
    const auto& W = rm.W;
    std::size_t checked = 0;
    for (int k = 0; k < W.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(W, k); it; ++it) {
            const auto l = std::size_t(it.row());
            if (l == std::size_t(k)) continue;
            CHECK(it.value() >= 0.0);
            CHECK(std::abs(L.eig.photon_number[l] - L.eig.photon_number[std::size_t(k)]) == 1);
            const double back = rm.rate(std::size_t(k), l);
            const double de = L.eig.energies[Eigen::Index(l)] - L.eig.energies[k];
            // W[l<-k] e^{-beta e_k} = W[k<-l] e^{-beta e_l}
            CHECK(it.value() / back == doctest::Approx(std::exp(-beta * de)).epsilon(1e-10));
            ++checked;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("rates are linear in gamma0 and kappa separately") {
    const auto L = make(3, 2, 0.5, 0.08);
    const auto g1 = build_rates(L.eig, L.a, BathParams{0.01, 0.0, 5.0, 1.0}).W;
    const auto g2 = build_rates(L.eig, L.a, BathParams{0.02, 0.0, 5.0, 1.0}).W;
    const auto k1 = build_rates(L.eig, L.a, BathParams{0.0, 0.004, 5.0, 1.0}).W;
    const auto k2 = build_rates(L.eig, L.a, BathParams{0.0, 0.008, 5.0, 1.0}).W;
    const auto both = build_rates(L.eig, L.a, BathParams{0.01, 0.004, 5.0, 1.0}).W;
    CHECK(Eigen::MatrixXd(g2 - 2.0 * g1).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(Eigen::MatrixXd(k2 - 2.0 * k1).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(Eigen::MatrixXd(both - g1 - k1).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("build_rates argument checks") {
    const auto L = make(2, 2, 0.5, 0.1);
    const auto other = fock::build_basis(2, 3);
    CHECK_THROWS_AS(build_rates(L.eig, {fock::annihilation(other, 0)}, BathParams{}), ArgumentError);
    CHECK_THROWS_AS(build_rates(L.eig, {}, BathParams{}), ArgumentError);
    CHECK_THROWS_AS(build_rates(L.eig, L.a, BathParams{-1.0, 0.0, 1.0, 1.0}), ArgumentError);
    CHECK_THROWS_AS(build_rates(L.eig, L.a, BathParams{0.1, 0.0, 0.0, 1.0}), ArgumentError);
}
