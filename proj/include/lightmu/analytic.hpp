// analytic.hpp: strong-interaction results: single-site detailed balance,
// effective particle/hole occupations, Mott-lobe boundaries and critical
// temperatures. k_B = 1; energies and temperatures are in units of U.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lightmu::analytic {

struct SingleSiteParams {
    double U{1.0};
    double mu{0.4};
    double beta{10.0};
    double gamma0{0.01};
    double kappa{0.0};
    int n_max{3};

    void validate() const;
};

// E_0(n) = U/2 n (n-1) - mu n
double site_energy(int n, double U, double mu);

// Delta E(n) = E_0(n+1) - E_0(n) = n U - mu
double delta_e(int n, double U, double mu);

// (n+1) [N_th(|dE|) + Theta(-dE)] and (n+1) [N_th(|dE|) + Theta(dE)]. Both
// diverge at dE == 0; use up_rate/down_rate there.
double f_plus(int n, const SingleSiteParams& p);
double f_minus(int n, const SingleSiteParams& p);

// Single-site transition rates n -> n+1 (gamma f_+) and n+1 -> n
// (gamma f_- + (n+1) kappa), with gamma = gamma0 |dE| / U and the finite
// dE -> 0 limit taken.
double up_rate(int n, const SingleSiteParams& p);
double down_rate(int n, const SingleSiteParams& p);

// Populations p_0..p_{n_max} from the detailed-balance ratio chain
// p_{n+1}/p_n = up_rate(n)/down_rate(n). Throws SingularityError when a
// denominator vanishes.
std::vector<double> single_site_steady(const SingleSiteParams& p);

// N_th/(1 + kappa/gamma), evaluated at |dE|. Requires gamma > 0.
double n_eff_particle(double dE, double beta, double kappa, double gamma);

// (N_th + kappa/gamma)/(1 - kappa/gamma), evaluated at |dE|. Throws
// BreakdownError for kappa/gamma >= 1.
double n_eff_hole(double dE, double beta, double kappa, double gamma);

struct Excitations {
    double particle;
    double hole;
};

// k = 0 particle and hole energies above the n0-filled Mott state to order
// J^2/U; z is the coordination number.
Excitations excitation_energies(int n0, double U, double mu, double J, double z);

struct LobeParams {
    double U{1.0};
    double beta{10.0};
    double gamma0{0.07};
    double kappa{0.07 / 30};
    double threshold{1.0}; // N_eff level defining the boundary
    double mu_tol{1e-6};   // bisection tolerance in units of U

    void validate() const;
};

// All quantities of one (n0, z, J, mu) point. n_eff_hole is NaN where the
// hole form has broken down or an excitation energy is non-positive.
struct LobePoint {
    int n0;
    double z;
    double J;
    double U;
    double mu;
    double dE_particle;
    double dE_hole;
    double n_eff_particle;
    double n_eff_hole;
};

LobePoint lobe_point(int n0, double z, double J, double mu, const LobeParams& p);

struct LobeBoundary {
    double J;
    double mu_low;  // hole side
    double mu_high; // particle side
    bool closed;    // no Mott interval left at this J (beyond the lobe tip)
    // Below this mu the hole occupation form is invalid (kappa/gamma_h >= 1);
    // NaN when kappa == 0.
    double mu_hole_breakdown;
};

// For each J, the mu interval where both excitation energies are positive
// and both effective occupations stay below the threshold.
std::vector<LobeBoundary> lobe_boundary(int n0, double z, std::span<const double> J_grid,
                                        const LobeParams& p);

struct CriticalTemperatures {
    double equilibrium;     // Min[dE_h, dE_p] / ln 2
    double non_equilibrium; // including photon loss
};

// Throws ArgumentError for non-positive excitation energies and
// BreakdownError when gamma_h <= 2 kappa.
CriticalTemperatures t_c(double dE_particle, double dE_hole, double gamma_p, double gamma_h,
                         double kappa);

// t_c with gamma_{p,h} = gamma0 dE_{p,h} / U.
CriticalTemperatures t_c_ohmic(double dE_particle, double dE_hole, double gamma0, double kappa,
                               double U);

} // namespace lightmu::analytic
