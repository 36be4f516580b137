// rates.hpp: golden-rule transition rates between Bose-Hubbard eigenstates
//
// Two baths act on the lattice. The parametric bath is Ohmic with coupling
// gamma = gamma0 |eps_k - eps_l| / U and inverse temperature beta; in the
// rotating frame it can both raise and lower the photon number. The loss
// bath is flat (rate kappa) and only lowers it.

#pragma once

#include "lightmu/fock.hpp"
#include "lightmu/hamiltonian.hpp"

#include <Eigen/Sparse>

#include <cstddef>
#include <vector>

namespace lightmu::rates {

struct BathParams {
    double gamma0{0.01}; // parametric-bath coupling strength
    double kappa{0.0};   // photon loss rate
    double beta{10.0};   // inverse temperature of the parametric bath
    double U_ref{1.0};   // energy unit in gamma = gamma0 |delta| / U_ref

    void validate() const;
};

// Bose occupancy 1/(exp(beta nu) - 1); +infinity at nu == 0.
double n_th(double beta, double nu);

struct OhmicRates {
    double absorb; // gamma(|delta|) N_th(|delta|)
    double emit;   // gamma(|delta|) (N_th(|delta|) + 1)
};

// delta is the signed energy difference eps_source - eps_target. At delta
// == 0 both rates equal the finite limit gamma0 / (beta U_ref).
OhmicRates ohmic_weight(double beta, double delta, double gamma0, double U_ref);

// Rate of an eigenstate transition whose energy drops by `delta` (>0 means
// the target lies lower), i.e. gamma (N_th + Theta(delta)) with
// Theta(0) = 1/2.
double parametric_rate(const BathParams& params, double delta);

// Generator of the population rate equation dp/dt = W p. W(l, k) for l != k
// is the rate k -> l; each diagonal entry is minus the column's outflow.
struct RateMatrix {
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> W;

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(W.rows()); }
    double rate(std::size_t to, std::size_t from) const { return W.coeff(int(to), int(from)); }
    double max_column_sum() const;
};

struct RateOptions {
    // |<l|a_i|k>|^2 summed over sites below this is treated as an exact
    // selection-rule zero.
    double matrix_element_floor{1e-24};
};

// Throws ArgumentError if the ladder operators do not match the eigensystem.
RateMatrix build_rates(const hamiltonian::EigenSystem& eig,
                       const std::vector<fock::SparseOperator>& annihilators,
                       const BathParams& params, const RateOptions& options = {});

} // namespace lightmu::rates
