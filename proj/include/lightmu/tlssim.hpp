// tlssim.hpp: two-level system coupled to a discrete bosonic bath
//
//   H(t) = w0 sz/2 + [A + lambda cos(mu t)] sum_j g_j sx (b_j + b_j^+) + sum_j w_j b_j^+ b_j
//
// The bath is truncated to at most two quanta. Time is in units of 1/w0 when
// w0 = 1.

#pragma once

#include "lightmu/bathdisc.hpp"

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace lightmu::tlssim {

using cplx = std::complex<double>;
using StateVector = std::vector<cplx>;

enum class Spin { down = 0, up = 1 };

struct DriveParams {
    double omega0{1.0};
    double A{0.0};
    double lambda{0.0};
    double mu_drive{0.0};

    void validate() const;
};

// Bath configurations: vacuum, one quantum in mode j, quanta in modes j <= k.
// State index = 2 * config + spin.
class TlsBasis {
public:
    explicit TlsBasis(std::size_t n_modes);

    std::size_t n_modes() const noexcept { return n_; }
    std::size_t n_configs() const noexcept { return 1 + n_ + n_ * (n_ + 1) / 2; }
    std::size_t dimension() const noexcept { return 2 * n_configs(); }

    std::size_t vacuum() const noexcept { return 0; }
    std::size_t single(std::size_t j) const;
    std::size_t pair(std::size_t j, std::size_t k) const; // order-insensitive
    int quanta(std::size_t config) const noexcept;
    static std::size_t index(std::size_t config, Spin s) noexcept { return 2 * config + std::size_t(s); }

private:
    std::size_t n_;
};

class Generator {
public:
    Generator(const bathdisc::DiscreteBath& bath, const DriveParams& drive);

    const TlsBasis& basis() const noexcept { return basis_; }
    const DriveParams& drive() const noexcept { return drive_; }
    std::size_t dimension() const noexcept { return basis_.dimension(); }

    // A + lambda cos(mu t)
    double coupling(double t) const;

    // Dense H(t); meant for checks on small baths.
    std::vector<std::vector<cplx>> hamiltonian(double t) const;

    // out = -i H(t) psi
    void apply(double t, const StateVector& psi, StateVector& out) const;

    StateVector initial_state(Spin s) const;

private:
    struct Link {
        std::size_t lo, hi; // bath configurations
        double x;           // <hi| sum_j g_j (b_j + b_j^+) |lo>
    };

    TlsBasis basis_;
    DriveParams drive_;
    std::vector<double> diag_; // w0 sz/2 + bath energy, per state index
    std::vector<Link> links_;
};

struct Sample {
    double t;
    double sigma_z;
    double bath_quanta;
    double norm_drift; // |<psi|psi> - 1|
};

using Trajectory = std::vector<Sample>;

struct EvolveOptions {
    double rel_tol{1e-9};
    double abs_tol{1e-12};
    double dt_sample{0.1};
    double max_norm_drift{1e-7};
};

// Adaptive Dormand-Prince integration; throws IntegrationError when the
// stepper fails or the final norm drift exceeds max_norm_drift.
Trajectory evolve(const StateVector& psi0, const Generator& gen, double t_final,
                  const EvolveOptions& opt = {});

struct FitOptions {
    double t_start{2.0};
    double t_end{30.0};
    double max_residual{0.05}; // relative, on the excited population
};

struct DecayFit {
    double rate;
    double uncertainty; // standard error of the rate
    double max_residual;
    double amplitude;
    std::size_t points;
};

// Straight-line fit of ln P_up(t), P_up = (1 + sz)/2, over the window.
DecayFit fit_decay(const Trajectory& traj, const FitOptions& opt = {});

struct InversionRun {
    double mu_drive;
    Trajectory trajectory;
};

// Start in |down> x vacuum with A = 0; one trajectory per drive frequency,
// run on up to `threads` threads (0: hardware concurrency).
std::vector<InversionRun> inversion_experiment(const bathdisc::DiscreteBath& bath, double lambda,
                                               const std::vector<double>& mu_list, double t_final,
                                               double omega0 = 1.0, const EvolveOptions& opt = {},
                                               unsigned threads = 0);

// Columns t, sigma_z, bath_quanta, norm_drift.
void write_csv(std::ostream& os, const Trajectory& traj);

} // namespace lightmu::tlssim
