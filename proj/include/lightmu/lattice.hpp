// lattice.hpp: end-to-end pipeline for one lattice parameter point:
// basis -> Hamiltonian -> eigensystem -> rates -> steady state -> observables

#pragma once

#include "lightmu/fock.hpp"
#include "lightmu/hamiltonian.hpp"
#include "lightmu/rates.hpp"
#include "lightmu/steadystate.hpp"

#include <vector>

namespace lightmu {

struct LatticeModel {
    fock::FockBasis basis;
    hamiltonian::LatticeSpec spec;
    hamiltonian::EigenSystem eig;
    std::vector<fock::SparseOperator> annihilators;
    std::vector<fock::SparseOperator> numbers;
};

LatticeModel build_lattice_model(const hamiltonian::LatticeSpec& spec, int n_max,
                                 std::size_t dimension_cap = fock::default_dimension_cap);

// Ring of n_sites (single site when n_sites == 1) in units of U.
hamiltonian::LatticeSpec ring_spec(std::size_t n_sites, double U, double mu, double J);

struct PointResult {
    steadystate::SteadyState state;
    double mandel_q;  // NaN when <n> == 0
    double coherence; // NaN without edges
    int ground_N;     // photon number of the rotating-frame ground state
};

PointResult solve_point(const LatticeModel& model, const rates::BathParams& bath,
                        double tol = 1e-11);

} // namespace lightmu
