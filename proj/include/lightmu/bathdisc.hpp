// bathdisc.hpp: discrete-mode approximation of a continuum Ohmic bath
//
// A spectral density J(w) = f(w) h(w) is replaced by N oscillators at the
// Gaussian nodes w_j of the weight f, with couplings g_j = sqrt(w_j h(w_j)).
// Two families are supported:
//   ohmic_exponential  J = w exp(-w/nu_c),            f = exp(-w/nu_c)   (Laguerre)
//   ohmic_rc_filtered  J = w / (1 + w^2 tau_rc^2),    f = 1 on [0, w_c]  (Legendre)

#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace lightmu::bathdisc {

enum class Family { ohmic_exponential, ohmic_rc_filtered };

Family parse_family(const std::string& name);
std::string to_string(Family f);

struct SpectralDensity {
    Family family{Family::ohmic_rc_filtered};
    double nu_c{1.0};         // exponential cutoff
    double tau_rc{4.0};       // RC time; 0 disables the filter
    double omega_cutoff{2.5}; // hard upper limit of the filtered family

    void validate() const;
    double J(double omega) const;
    // Quadrature weight function f; zero outside the support.
    double f(double omega) const;
    double upper_limit() const; // +inf for the exponential family
};

constexpr std::size_t default_quadrature_cap = 512;

struct Quadrature {
    std::vector<double> nodes;   // ascending, in energy units
    std::vector<double> weights; // integrate F(w) f(w) dw ~ sum w_j F(w_j)
};

// Gauss rule for the weight function of `sd`. Weights below the double
// range underflow to zero for very large N.
Quadrature quadrature(std::size_t n, const SpectralDensity& sd,
                      std::size_t cap = default_quadrature_cap);

// Standard rules on the reference intervals: Laguerre on [0, inf) with weight
// e^{-x}, Legendre on [-1, 1].
Quadrature gauss_laguerre(std::size_t n, std::size_t cap = default_quadrature_cap);
Quadrature gauss_legendre(std::size_t n, std::size_t cap = default_quadrature_cap);

struct Mode {
    double omega;
    double weight;
    double g;
};

struct DiscreteBath {
    SpectralDensity sd;
    std::vector<Mode> modes;

    std::size_t size() const noexcept { return modes.size(); }
};

// Modes with an underflowed (zero) weight carry no coupling and are dropped.
DiscreteBath couplings(const Quadrature& q, const SpectralDensity& sd);

DiscreteBath discretize(std::size_t n, const SpectralDensity& sd);

// beta = +inf gives the zero-temperature correlation.
std::complex<double> correlation(const DiscreteBath& bath, double beta, double t);

struct ReferenceOptions {
    double rel_tol{1e-10};
    unsigned max_depth{20};
};

// Continuum correlation by adaptive Gauss-Kronrod integration; throws
// NumericalError when the error estimate exceeds rel_tol |S(0)|.
std::complex<double> reference_correlation(const SpectralDensity& sd, double beta, double t,
                                           const ReferenceOptions& opt = {});

struct BandSplit {
    std::vector<Mode> low;      // omega <= nu/2
    std::vector<Mode> natural;  // nu/2 < omega <= 3 nu/2
    std::vector<Mode> rotating; // omega > 3 nu/2
    double kappa_estimate;
};

// kappa ~ A^2 g^2 rho(nu) + lambda^2/4 h^2 rho(2 nu), using the mode nearest
// to nu (natural band) and to 2 nu (rotating band) and the inverse local node
// spacing there as rho.
BandSplit band_split(const DiscreteBath& bath, double nu, double A, double lambda);

// One "omega weight g" line per mode.
void write_table(std::ostream& os, const DiscreteBath& bath);

} // namespace lightmu::bathdisc
