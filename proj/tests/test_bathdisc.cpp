#include "lightmu/bathdisc.hpp"
#include "lightmu/error.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace lightmu;
using namespace lightmu::bathdisc;

namespace {

constexpr double cold = std::numeric_limits<double>::infinity();

SpectralDensity exponential(double nu_c) { return {Family::ohmic_exponential, nu_c, 0.0, 0.0}; }
SpectralDensity filtered(double tau, double cutoff) { return {Family::ohmic_rc_filtered, 1.0, tau, cutoff}; }

// Closed form of (1/pi) int_0^inf nu e^{-nu/nu_c} e^{-i nu t} dnu.
std::complex<double> cold_exponential_oracle(double nu_c, double t) {
    const std::complex<double> d(1.0, nu_c * t);
    return nu_c * nu_c / (std::numbers::pi * d * d);
}

} // namespace

TEST_CASE("low-order Gauss rules") {
    const auto l1 = gauss_laguerre(1);
    CHECK(l1.nodes[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(l1.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

    const auto l2 = gauss_laguerre(2);
    CHECK(l2.nodes[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
    CHECK(l2.nodes[1] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));
    CHECK(l2.weights[0] == doctest::Approx((2.0 + std::sqrt(2.0)) / 4.0).epsilon(1e-14));
    CHECK(l2.weights[1] == doctest::Approx((2.0 - std::sqrt(2.0)) / 4.0).epsilon(1e-14));

    const auto q = quadrature(2, filtered(4.0, 2.5));
    CHECK(q.nodes[0] == doctest::Approx(2.5 * (0.5 - 0.5 / std::sqrt(3.0))).epsilon(1e-14));
    CHECK(q.nodes[1] == doctest::Approx(2.5 * (0.5 + 0.5 / std::sqrt(3.0))).epsilon(1e-14));
    CHECK(q.weights[0] == doctest::Approx(1.25).epsilon(1e-14));

    const auto s = quadrature(1, exponential(3.0));
    CHECK(s.nodes[0] == doctest::Approx(3.0));
    CHECK(s.weights[0] == doctest::Approx(3.0));
}

TEST_CASE("N = 50 rules are exact through degree 99") {
    const auto lag = gauss_laguerre(50);
    double factorial = 1.0; // k!
    for (int k = 0; k <= 99; ++k) {
        if (k > 0) factorial *= k;
        double s = 0.0;
        for (std::size_t i = 0; i < lag.nodes.size(); ++i) s += lag.weights[i] * std::pow(lag.nodes[i], k);
        CHECK(std::abs(s / factorial - 1.0) < 1e-10);
    }
    const auto leg = gauss_legendre(50);
    for (int k = 0; k <= 99; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < leg.nodes.size(); ++i) s += leg.weights[i] * std::pow(leg.nodes[i], k);
        const double exact = k % 2 ? 0.0 : 2.0 / (k + 1.0);
        CHECK(std::abs(s - exact) < 1e-10 * std::max(exact, 1e-2));
    }
}

TEST_CASE("quadrature invariants and capacity") {
    for (std::size_t n : {3u, 17u, 100u, 512u}) {
        const auto q = gauss_laguerre(n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(q.weights[i] >= 0.0);
            if (i) CHECK(q.nodes[i] > q.nodes[i - 1]);
            sum += q.weights[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gauss_laguerre(513), CapacityError);
    CHECK_THROWS_AS(gauss_legendre(0), ArgumentError);
    CHECK_THROWS_AS(quadrature(4, exponential(-1.0)), ArgumentError);
}

TEST_CASE("couplings") {
    const auto plain = couplings(Quadrature{{0.7}, {0.3}}, filtered(0.0, 2.5));
    CHECK(plain.modes[0].g == doctest::Approx(std::sqrt(0.3 * 0.7)));
    const auto rc = couplings(Quadrature{{1.0}, {1.0}}, filtered(4.0, 2.5));
    CHECK(rc.modes[0].g == doctest::Approx(std::sqrt(1.0 / 17.0)));
    const auto far = couplings(Quadrature{{1e4}, {1.0}}, filtered(4.0, 2e4));
    CHECK(far.modes[0].g == doctest::Approx(std::sqrt(1.0 / (1e4 * 16.0))).epsilon(1e-6));
    CHECK_THROWS_AS(couplings(Quadrature{{0.0}, {1.0}}, filtered(4.0, 2.5)), ArgumentError);
    // Underflowed weights are dropped.
    CHECK(discretize(400, exponential(1.0)).size() < 400);
}

TEST_CASE("reference correlation") {
    CHECK(reference_correlation(exponential(1.0), cold, 0.0).real() ==
          doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
    CHECK(reference_correlation(exponential(2.0), cold, 0.0).real() ==
          doctest::Approx(4.0 / std::numbers::pi).epsilon(1e-12));
    for (double t : {0.3, 2.0, 11.0, 30.0}) {
        const auto r = reference_correlation(exponential(1.0), cold, t);
        CHECK(std::abs(r - cold_exponential_oracle(1.0, t)) < 1e-12);
        CHECK(std::abs(r - cold_exponential_oracle(1.0, t)) < 1e-8 * std::abs(cold_exponential_oracle(1.0, t)));
    }
    // Filtered, cold, t = 0: (1/pi) int_0^c w/(1+w^2 tau^2) = ln(1 + c^2 tau^2) / (2 pi tau^2)
    const auto f0 = reference_correlation(filtered(4.0, 2.5), cold, 0.0);
    CHECK(f0.real() == doctest::Approx(std::log(1.0 + 100.0) / (2.0 * std::numbers::pi * 16.0)).epsilon(1e-12));
}

// First time on a 0.01 grid where the discrete correlation leaves the
// relative band around the reference.
template <typename Ref>
double validity_window(const DiscreteBath& bath, double tol, double t_max, Ref ref) {
    for (double t = 0.0; t <= t_max; t += 0.01) {
        const auto r = ref(t);
        if (std::abs(correlation(bath, cold, t) - r) > tol * std::abs(r)) return t;
    }
    return t_max;
}

TEST_CASE("discrete correlation tracks the continuum") {
    const auto sd = exponential(1.0);
    const auto oracle = [](double t) { return cold_exponential_oracle(1.0, t); };
    double prev = 0.0;
    for (std::size_t n : {35u, 50u, 70u, 100u}) {
        const double tv = validity_window(discretize(n, sd), 1e-3, 60.0, oracle);
        CHECK(tv > prev);
        prev = tv;
    }
    CHECK(validity_window(discretize(50, sd), 1e-3, 60.0, oracle) > 3.0);

    // The filtered bath on [0, 2.5] holds for much longer.
    const auto f = filtered(4.0, 2.5);
    const auto ref = [&](double t) { return reference_correlation(f, cold, t); };
    CHECK(validity_window(discretize(50, f), 1e-2, 50.0, ref) >= 50.0);

    // Finite temperature against the adaptive reference.
    const auto hot = discretize(80, sd);
    for (double t : {0.0, 0.5, 2.0}) {
        const auto r = reference_correlation(sd, 2.0, t);
        CHECK(std::abs(correlation(hot, 2.0, t) - r) < 1e-3 * std::abs(r));
    }
}

TEST_CASE("correlation is Hermitian in time") {
    const auto bath = discretize(20, filtered(4.0, 2.5));
    for (double beta : {0.5, 3.0, cold}) {
        for (double t : {0.4, 7.0, 19.0}) {
            CHECK(std::abs(correlation(bath, beta, -t) - std::conj(correlation(bath, beta, t))) < 1e-14);
            const auto r = reference_correlation(bath.sd, beta, t);
            CHECK(std::abs(reference_correlation(bath.sd, beta, -t) - std::conj(r)) < 1e-12);
        }
    }
}

TEST_CASE("band_split") {
    const auto bath = discretize(30, filtered(4.0, 2.5));
    const double nu = 1.0;
    const auto s = band_split(bath, nu, 0.3, 0.5);
    CHECK(s.low.size() + s.natural.size() + s.rotating.size() == bath.size());
    for (const auto& m : s.low) CHECK(m.omega <= 0.5);
    for (const auto& m : s.natural) CHECK((m.omega > 0.5 && m.omega <= 1.5));
    for (const auto& m : s.rotating) CHECK(m.omega > 1.5);
    CHECK(s.kappa_estimate > 0.0);

    // Nothing above nu/2.
    CHECK(band_split(bath, 10.0, 0.3, 0.5).kappa_estimate == 0.0);

    // Boundary mode sits in the closed lower band.
    DiscreteBath edge{filtered(0.0, 5.0), {{0.5, 0.1, 0.2}, {1.0, 0.1, 0.3}, {2.0, 0.1, 0.4}}};
    const auto e = band_split(edge, 1.0, 0.0, 0.5);
    CHECK(e.low.size() == 1);
    CHECK(e.natural.size() == 1);
    CHECK(e.rotating.size() == 1);
    // A = 0: lambda^2/4 h^2 rho(2 nu) only; rho from the one-sided spacing at the top.
    CHECK(e.kappa_estimate == doctest::Approx(0.25 * 0.25 * 0.16 / 1.0));
    CHECK_THROWS_AS(band_split(edge, 0.0, 0.0, 0.5), ArgumentError);
}

TEST_CASE("bath table export") {
    const auto bath = discretize(3, exponential(1.0));
    std::ostringstream os;
    write_table(os, bath);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "# omega weight g");
    for (const auto& m : bath.modes) {
        double w, wt, g;
        is >> w >> wt >> g;
        CHECK(w == m.omega);
        CHECK(wt == m.weight);
        CHECK(g == m.g);
    }
}
