// steadystate.hpp: stationary solution of the population rate equation and
// the lattice observables evaluated on it

#pragma once

#include "lightmu/fock.hpp"
#include "lightmu/hamiltonian.hpp"
#include "lightmu/rates.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace lightmu::steadystate {

struct SteadyState {
    Eigen::VectorXd populations; // over eigenstates, sums to 1
    double residual{0.0};        // max |W p|
};

// Kernel of W normalized to a probability vector. Throws DegeneracyError
// when the transition graph has more than one closed class (the kernel is
// then multi-dimensional) and SolverError when the residual exceeds tol.
SteadyState solve_steady(const rates::RateMatrix& W, double tol = 1e-11);

// Closed communicating classes of the transition graph, each sorted.
std::vector<std::vector<std::size_t>> closed_classes(const rates::RateMatrix& W);

// Site-averaged Mandel Q. The per-site moments <n_i>, <n_i^2> are averaged
// over sites before Q is formed. Throws UndefinedError if <n> == 0.
double mandel_q(const SteadyState& state, const hamiltonian::EigenSystem& eig,
                const std::vector<fock::SparseOperator>& number_ops);

// Mean over edges of sqrt(|<a_i^dag a_j>|).
double coherence(const SteadyState& state, const hamiltonian::EigenSystem& eig,
                 const std::vector<fock::SparseOperator>& annihilators,
                 const std::vector<hamiltonian::Edge>& edges);

// Grand-canonical weights exp(-beta eps_k), normalized. beta may be
// +infinity, in which case the ground-state manifold is weighted equally.
Eigen::VectorXd grand_canonical(const hamiltonian::EigenSystem& eig, double beta);

// Total population per photon number, indexed by N.
std::vector<double> number_distribution(const Eigen::VectorXd& populations,
                                        const hamiltonian::EigenSystem& eig);

} // namespace lightmu::steadystate
