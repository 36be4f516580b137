#include "lightmu/analytic.hpp"

#include "lightmu/error.hpp"
#include "lightmu/rates.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace lightmu::analytic {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double theta(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? 0.0 : 0.5); }

double bose(double beta, double nu) { return rates::n_th(beta, std::abs(nu)); }

} // namespace

void SingleSiteParams::validate() const {
    if (!(U > 0.0)) throw ArgumentError("SingleSiteParams: U must be > 0");
    if (!(beta > 0.0)) throw ArgumentError("SingleSiteParams: beta must be > 0");
    if (!(gamma0 >= 0.0) || !(kappa >= 0.0)) {
        throw ArgumentError("SingleSiteParams: gamma0 and kappa must be >= 0");
    }
    if (n_max < 1) throw ArgumentError("SingleSiteParams: n_max must be >= 1");
}

double site_energy(int n, double U, double mu) { return 0.5 * U * n * (n - 1.0) - mu * n; }

double delta_e(int n, double U, double mu) {
    if (n < 0) throw ArgumentError("delta_e: n must be >= 0");
    return n * U - mu;
}

double f_plus(int n, const SingleSiteParams& p) {
    const double dE = delta_e(n, p.U, p.mu);
    return (n + 1) * (bose(p.beta, dE) + theta(-dE));
}

double f_minus(int n, const SingleSiteParams& p) {
    const double dE = delta_e(n, p.U, p.mu);
    return (n + 1) * (bose(p.beta, dE) + theta(dE));
}

double up_rate(int n, const SingleSiteParams& p) {
    const double dE = delta_e(n, p.U, p.mu);
    // The transition n -> n+1 lowers the energy by -dE.
    const rates::BathParams bath{p.gamma0, p.kappa, p.beta, p.U};
    return (n + 1) * rates::parametric_rate(bath, -dE);
}

double down_rate(int n, const SingleSiteParams& p) {
    const double dE = delta_e(n, p.U, p.mu);
    const rates::BathParams bath{p.gamma0, p.kappa, p.beta, p.U};
    return (n + 1) * (rates::parametric_rate(bath, dE) + p.kappa);
}

std::vector<double> single_site_steady(const SingleSiteParams& p) {
    p.validate();
    std::vector<double> logp(std::size_t(p.n_max) + 1, 0.0);
    for (int n = 0; n < p.n_max; ++n) {
        const double up = up_rate(n, p);
        const double down = down_rate(n, p);
        if (!(down > 0.0)) {
            throw SingularityError(fmt::format(
                "single_site_steady: no downward rate out of n = {} (gamma0 = kappa = 0?)", n + 1));
        }
        logp[std::size_t(n) + 1] = logp[std::size_t(n)] + std::log(up / down);
    }
    double top = -std::numeric_limits<double>::infinity();
    for (double v : logp) top = std::max(top, v);
    std::vector<double> out(logp.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) sum += (out[i] = std::exp(logp[i] - top));
    for (double& v : out) v /= sum;
    return out;
}

double n_eff_particle(double dE, double beta, double kappa, double gamma) {
    if (!(gamma > 0.0)) throw ArgumentError("n_eff_particle: gamma must be > 0");
    return bose(beta, dE) / (1.0 + kappa / gamma);
}

double n_eff_hole(double dE, double beta, double kappa, double gamma) {
    if (!(gamma > 0.0)) throw ArgumentError("n_eff_hole: gamma must be > 0");
    const double ratio = kappa / gamma;
    if (ratio >= 1.0) {
        throw BreakdownError(fmt::format(
            "n_eff_hole: kappa/gamma = {:.6g} >= 1, no thermal description of holes", ratio));
    }
    return (bose(beta, dE) + ratio) / (1.0 - ratio);
}

Excitations excitation_energies(int n0, double U, double mu, double J, double z) {
    if (n0 < 1) throw ArgumentError("excitation_energies: n0 must be >= 1");
    if (J < 0.0) throw ArgumentError("excitation_energies: J must be >= 0");
    if (z < 1.0) throw ArgumentError("excitation_energies: z must be >= 1");
    const double n = n0;
    const double second = z * z * J * J / U * n * (n + 1.0);
    Excitations e{};
    e.particle = -z * J * (n + 1.0) + n * U - mu + z * J * J / (2.0 * U) * n * (5.0 * n + 4.0) - second;
    e.hole = -z * J * n - (n - 1.0) * U + mu + z * J * J / (2.0 * U) * (n + 1.0) * (5.0 * n + 1.0) - second;
    return e;
}

void LobeParams::validate() const {
    if (!(U > 0.0)) throw ArgumentError("LobeParams: U must be > 0");
    if (!(beta > 0.0)) throw ArgumentError("LobeParams: beta must be > 0");
    if (!(gamma0 > 0.0)) throw ArgumentError("LobeParams: gamma0 must be > 0");
    if (!(kappa >= 0.0)) throw ArgumentError("LobeParams: kappa must be >= 0");
    if (!(threshold > 0.0)) throw ArgumentError("LobeParams: threshold must be > 0");
    if (!(mu_tol > 0.0)) throw ArgumentError("LobeParams: mu_tol must be > 0");
}

LobePoint lobe_point(int n0, double z, double J, double mu, const LobeParams& p) {
    const auto e = excitation_energies(n0, p.U, mu, J, z);
    LobePoint out{n0, z, J, p.U, mu, e.particle, e.hole, nan, nan};
    if (e.particle > 0.0) {
        out.n_eff_particle = n_eff_particle(e.particle, p.beta, p.kappa, p.gamma0 * e.particle / p.U);
    }
    if (e.hole > 0.0) {
        const double gamma_h = p.gamma0 * e.hole / p.U;
        if (p.kappa / gamma_h < 1.0) out.n_eff_hole = n_eff_hole(e.hole, p.beta, p.kappa, gamma_h);
    }
    return out;
}

namespace {

bool particle_ok(const LobePoint& pt, double threshold) {
    return pt.dE_particle > 0.0 && pt.n_eff_particle < threshold;
}

bool hole_ok(const LobePoint& pt, double threshold) {
    // NaN (breakdown) compares false.
    return pt.dE_hole > 0.0 && pt.n_eff_hole < threshold;
}

// Bisect a monotone predicate with pred(good) true and pred(bad) false.
template <typename Pred>
double bisect(double good, double bad, double tol, Pred pred) {
    while (std::abs(bad - good) > tol) {
        const double mid = 0.5 * (good + bad);
        (pred(mid) ? good : bad) = mid;
    }
    return good;
}

} // namespace

std::vector<LobeBoundary> lobe_boundary(int n0, double z, std::span<const double> J_grid,
                                        const LobeParams& p) {
    p.validate();
    std::vector<LobeBoundary> out;
    out.reserve(J_grid.size());
    for (double J : J_grid) {
        if (J < 0.0) throw ArgumentError("lobe_boundary: J values must be >= 0");
        // Excitation energies are linear in mu with slope -1 (particle) and
        // +1 (hole); locate their zeros.
        const double mu_p0 = excitation_energies(n0, p.U, 0.0, J, z).particle;
        const double mu_h0 = -excitation_energies(n0, p.U, 0.0, J, z).hole;

        auto pok = [&](double mu) { return particle_ok(lobe_point(n0, z, J, mu, p), p.threshold); };
        auto hok = [&](double mu) { return hole_ok(lobe_point(n0, z, J, mu, p), p.threshold); };

        double step = p.U;
        double lo = mu_p0 - step;
        while (!pok(lo)) {
            step *= 2.0;
            lo = mu_p0 - step;
            if (step > 1e6 * p.U) throw NumericalError("lobe_boundary: particle side not bracketed");
        }
        const double mu_high = bisect(lo, mu_p0, p.mu_tol, pok);

        step = p.U;
        double hi = mu_h0 + step;
        while (!hok(hi)) {
            step *= 2.0;
            hi = mu_h0 + step;
            if (step > 1e6 * p.U) throw NumericalError("lobe_boundary: hole side not bracketed");
        }
        const double mu_low = bisect(hi, mu_h0, p.mu_tol, hok);

        LobeBoundary b{J, mu_low, mu_high, !(mu_low < mu_high), nan};
        if (p.kappa > 0.0) b.mu_hole_breakdown = mu_h0 + p.kappa * p.U / p.gamma0;
        out.push_back(b);
    }
    return out;
}

CriticalTemperatures t_c(double dE_particle, double dE_hole, double gamma_p, double gamma_h,
                         double kappa) {
    if (!(dE_particle > 0.0) || !(dE_hole > 0.0)) {
        throw ArgumentError("t_c: excitation energies must be > 0");
    }
    if (!(gamma_p > 0.0)) throw ArgumentError("t_c: gamma_p must be > 0");
    if (!(kappa >= 0.0)) throw ArgumentError("t_c: kappa must be >= 0");
    if (!(gamma_h > 2.0 * kappa)) {
        throw BreakdownError(fmt::format(
            "t_c: gamma_h = {:.6g} <= 2 kappa = {:.6g}, hole temperature undefined", gamma_h,
            2.0 * kappa));
    }
    CriticalTemperatures out{};
    out.equilibrium = std::min(dE_hole, dE_particle) / std::log(2.0);
    const double hole = dE_hole / std::log(2.0 * (gamma_h - kappa) / (gamma_h - 2.0 * kappa));
    const double particle = dE_particle / std::log((2.0 * gamma_p + kappa) / (gamma_p + kappa));
    out.non_equilibrium = std::min(hole, particle);
    return out;
}

CriticalTemperatures t_c_ohmic(double dE_particle, double dE_hole, double gamma0, double kappa,
                               double U) {
    return t_c(dE_particle, dE_hole, gamma0 * dE_particle / U, gamma0 * dE_hole / U, kappa);
}

} // namespace lightmu::analytic
