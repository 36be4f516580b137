#include "lightmu/bathdisc.hpp"

#include "lightmu/error.hpp"
#include "lightmu/rates.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace lightmu::bathdisc {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Three-term recurrence of the orthonormal family:
//   b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1},  p_0 = 1/sqrt(mu0)
struct Recurrence {
    double (*a)(std::size_t);
    double (*b)(std::size_t); // k >= 1
    double mu0;
};

const Recurrence laguerre{[](std::size_t k) { return 2.0 * double(k) + 1.0; },
                          [](std::size_t k) { return double(k); }, 1.0};

const Recurrence legendre{[](std::size_t) { return 0.0; },
                          [](std::size_t k) {
                              const double kk = double(k);
                              return kk / std::sqrt(4.0 * kk * kk - 1.0);
                          },
                          2.0};

struct Evaluation {
    double p_n;     // p_N, scaled
    double dp_n;    // p_N', same scale
    double log_w;   // log of the Christoffel weight 1 / sum_{k<N} p_k^2
};

// Values are rescaled on the fly so large N and large x do not overflow.
Evaluation evaluate(const Recurrence& r, std::size_t n, double x) {
    double p_prev = 0.0, p = 1.0 / std::sqrt(r.mu0);
    double d_prev = 0.0, d = 0.0;
    double sum = 0.0, log_scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum += p * p;
        const double bk = k == 0 ? 0.0 : r.b(k);
        const double b_next = r.b(k + 1);
        const double p_next = ((x - r.a(k)) * p - bk * p_prev) / b_next;
        const double d_next = (p + (x - r.a(k)) * d - bk * d_prev) / b_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        const double big = std::max(std::abs(p), std::abs(d));
        if (big > 1e100) {
            p /= 1e100;
            p_prev /= 1e100;
            d /= 1e100;
            d_prev /= 1e100;
            sum /= 1e200;
            log_scale += std::log(1e100);
        }
    }
    return {p, d, -std::log(sum) - 2.0 * log_scale};
}

Quadrature gauss_rule(const Recurrence& r, std::size_t n, std::size_t cap, const char* name) {
    if (n < 1) throw ArgumentError(fmt::format("{}: need at least one node", name));
    if (n > cap) {
        throw CapacityError(fmt::format("{}: {} nodes exceeds the cap of {}", name, n, cap));
    }
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(Eigen::Index(n));
    Eigen::VectorXd sub = Eigen::VectorXd::Zero(Eigen::Index(n) - 1);
    for (std::size_t k = 0; k < n; ++k) diag[Eigen::Index(k)] = r.a(k);
    for (std::size_t k = 1; k < n; ++k) sub[Eigen::Index(k - 1)] = r.b(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError(fmt::format("{}: eigensolve failed", name));

    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = es.eigenvalues()[Eigen::Index(i)];
        // Newton polish on p_N.
        for (int it = 0; it < 4; ++it) {
            const auto e = evaluate(r, n, x);
            if (e.dp_n == 0.0) break;
            const double step = e.p_n / e.dp_n;
            x -= step;
            if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
        }
        q.nodes[i] = x;
        q.weights[i] = std::exp(evaluate(r, n, x).log_w);
    }
    return q;
}

// J / f on the support.
double coupling_density(const SpectralDensity& sd, double omega) {
    if (sd.family == Family::ohmic_exponential) return omega;
    return omega / (1.0 + omega * omega * sd.tau_rc * sd.tau_rc);
}

} // namespace

Family parse_family(const std::string& name) {
    if (name == "ohmic_exponential") return Family::ohmic_exponential;
    if (name == "ohmic_rc_filtered") return Family::ohmic_rc_filtered;
    throw ArgumentError(fmt::format("unknown spectral density family '{}'", name));
}

std::string to_string(Family f) {
    return f == Family::ohmic_exponential ? "ohmic_exponential" : "ohmic_rc_filtered";
}

void SpectralDensity::validate() const {
    if (family == Family::ohmic_exponential) {
        if (!(nu_c > 0.0) || !std::isfinite(nu_c)) throw ArgumentError("SpectralDensity: nu_c must be > 0");
    } else {
        if (!(tau_rc >= 0.0) || !std::isfinite(tau_rc)) throw ArgumentError("SpectralDensity: tau_rc must be >= 0");
        if (!(omega_cutoff > 0.0) || !std::isfinite(omega_cutoff)) {
            throw ArgumentError("SpectralDensity: omega_cutoff must be > 0");
        }
    }
}

double SpectralDensity::f(double omega) const {
    if (omega < 0.0) return 0.0;
    if (family == Family::ohmic_exponential) return std::exp(-omega / nu_c);
    return omega <= omega_cutoff ? 1.0 : 0.0;
}

double SpectralDensity::J(double omega) const {
    return omega < 0.0 ? 0.0 : f(omega) * coupling_density(*this, omega);
}

double SpectralDensity::upper_limit() const {
    return family == Family::ohmic_exponential ? inf : omega_cutoff;
}

Quadrature gauss_laguerre(std::size_t n, std::size_t cap) {
    return gauss_rule(laguerre, n, cap, "gauss_laguerre");
}

Quadrature gauss_legendre(std::size_t n, std::size_t cap) {
    return gauss_rule(legendre, n, cap, "gauss_legendre");
}

Quadrature quadrature(std::size_t n, const SpectralDensity& sd, std::size_t cap) {
    sd.validate();
    Quadrature q;
    if (sd.family == Family::ohmic_exponential) {
        q = gauss_laguerre(n, cap);
        for (auto& x : q.nodes) x *= sd.nu_c;
        for (auto& w : q.weights) w *= sd.nu_c;
    } else {
        q = gauss_legendre(n, cap);
        const double half = 0.5 * sd.omega_cutoff;
        for (auto& x : q.nodes) x = half * (x + 1.0);
        for (auto& w : q.weights) w *= half;
    }
    return q;
}

DiscreteBath couplings(const Quadrature& q, const SpectralDensity& sd) {
    sd.validate();
    if (q.nodes.size() != q.weights.size()) throw ArgumentError("couplings: node/weight size mismatch");
    DiscreteBath bath{sd, {}};
    for (std::size_t j = 0; j < q.nodes.size(); ++j) {
        const double w = q.nodes[j];
        if (!(w > 0.0)) throw ArgumentError(fmt::format("couplings: node {} is not positive", w));
        if (j > 0 && !(w > q.nodes[j - 1])) throw ArgumentError("couplings: nodes must be increasing");
        if (q.weights[j] < 0.0) throw ArgumentError("couplings: negative weight");
        if (q.weights[j] == 0.0) continue;
        bath.modes.push_back({w, q.weights[j], std::sqrt(q.weights[j] * coupling_density(sd, w))});
    }
    return bath;
}

DiscreteBath discretize(std::size_t n, const SpectralDensity& sd) { return couplings(quadrature(n, sd), sd); }

std::complex<double> correlation(const DiscreteBath& bath, double beta, double t) {
    std::complex<double> s{};
    for (const auto& m : bath.modes) {
        const double n = rates::n_th(beta, m.omega);
        const double c = std::cos(m.omega * t), sn = std::sin(m.omega * t);
        s += m.g * m.g * std::complex<double>((2.0 * n + 1.0) * c, -sn);
    }
    return s / std::numbers::pi;
}

std::complex<double> reference_correlation(const SpectralDensity& sd, double beta, double t,
                                           const ReferenceOptions& opt) {
    sd.validate();
    if (!(beta > 0.0)) throw ArgumentError("reference_correlation: beta must be > 0");
    // Beyond 80 cutoffs the exponential family is below 1e-33 of its peak.
    const double upper = sd.family == Family::ohmic_exponential ? 80.0 * sd.nu_c : sd.omega_cutoff;
    auto thermal = [&](double nu) {
        // J (2 N_th + 1) with its finite nu -> 0 limit.
        if (nu <= 0.0) return std::isinf(beta) ? 0.0 : 2.0 / beta;
        return sd.J(nu) * (std::isinf(beta) ? 1.0 : 1.0 / std::tanh(0.5 * beta * nu));
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double err0 = 0.0;
    const double scale = GK::integrate(thermal, 0.0, upper, opt.max_depth, opt.rel_tol, &err0);
    // Panels of half an oscillation period keep each adaptive integral free of
    // cancellation; a single adaptive pass over many periods underestimates its error.
    const std::size_t panels =
        std::max<std::size_t>(8, std::size_t(std::ceil(upper * std::abs(t) / std::numbers::pi)));
    const double h = upper / double(panels);
    double re = 0.0, im = 0.0, err_re = 0.0, err_im = 0.0;
    for (std::size_t k = 0; k < panels; ++k) {
        const double a = h * double(k), b = a + h;
        double e1 = 0.0, e2 = 0.0;
        re += GK::integrate([&](double nu) { return thermal(nu) * std::cos(nu * t); }, a, b, opt.max_depth,
                            opt.rel_tol, &e1);
        im += GK::integrate([&](double nu) { return -sd.J(nu) * std::sin(nu * t); }, a, b, opt.max_depth,
                            opt.rel_tol, &e2);
        err_re += std::abs(e1);
        err_im += std::abs(e2);
    }
    const double achieved = std::max(err_re, err_im);
    // Measured against the t = 0 amplitude: at late times the value itself is a
    // small remainder of a cancelling oscillatory integral.
    const double allowed = opt.rel_tol * scale;
    if (!(achieved <= allowed)) {
        throw NumericalError(fmt::format(
            "reference_correlation: error estimate {:.3g} exceeds {:.3g} at t = {} (value {:.6g}{:+.6g}i)",
            achieved, allowed, t, re / std::numbers::pi, im / std::numbers::pi));
    }
    return {re / std::numbers::pi, im / std::numbers::pi};
}

namespace {

double local_density(const DiscreteBath& bath, std::size_t i) {
    const auto& m = bath.modes;
    if (m.size() == 1) return 1.0 / m[0].omega;
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(i + 1, m.size() - 1);
    return double(hi - lo) / (m[hi].omega - m[lo].omega);
}

// Index into bath.modes of the band member closest to target; npos if empty.
std::size_t nearest(const DiscreteBath& bath, double lo, double hi, double target) {
    std::size_t best = std::string::npos;
    for (std::size_t i = 0; i < bath.modes.size(); ++i) {
        const double w = bath.modes[i].omega;
        if (!(w > lo && w <= hi)) continue;
        if (best == std::string::npos ||
            std::abs(w - target) < std::abs(bath.modes[best].omega - target)) {
            best = i;
        }
    }
    return best;
}

} // namespace

BandSplit band_split(const DiscreteBath& bath, double nu, double A, double lambda) {
    if (!(nu > 0.0)) throw ArgumentError("band_split: nu must be > 0");
    BandSplit out{{}, {}, {}, 0.0};
    for (const auto& m : bath.modes) {
        if (m.omega <= 0.5 * nu) out.low.push_back(m);
        else if (m.omega <= 1.5 * nu) out.natural.push_back(m);
        else out.rotating.push_back(m);
    }
    if (const auto c = nearest(bath, 0.5 * nu, 1.5 * nu, nu); c != std::string::npos) {
        const double g = bath.modes[c].g;
        out.kappa_estimate += A * A * g * g * local_density(bath, c);
    }
    if (const auto d = nearest(bath, 1.5 * nu, inf, 2.0 * nu); d != std::string::npos) {
        const double h = bath.modes[d].g;
        out.kappa_estimate += 0.25 * lambda * lambda * h * h * local_density(bath, d);
    }
    return out;
}

void write_table(std::ostream& os, const DiscreteBath& bath) {
    fmt::print(os, "# omega weight g\n");
    for (const auto& m : bath.modes) fmt::print(os, "{:.17g} {:.17g} {:.17g}\n", m.omega, m.weight, m.g);
}

} // namespace lightmu::bathdisc
