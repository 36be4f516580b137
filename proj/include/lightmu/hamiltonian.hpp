// hamiltonian.hpp: rotating-frame Bose-Hubbard Hamiltonian and its eigensystem

#pragma once

#include "lightmu/fock.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace lightmu::hamiltonian {

using Edge = std::pair<std::size_t, std::size_t>;

struct LatticeSpec {
    std::size_t n_sites{1};
    std::vector<Edge> edges;
    double U{1.0};  // on-site interaction
    double mu{0.0}; // chemical potential (parametric drive frequency)
    double J{0.0};  // tunneling rate

    // Throws ArgumentError on invalid site references, self-loops or
    // duplicate edges.
    void validate() const;
};

// Periodic chain 0-1-...-(L-1)-0. Two sites get a single bond.
std::vector<Edge> ring_lattice(std::size_t n_sites);

// Coordination number of each site.
std::vector<std::size_t> degrees(const LatticeSpec& spec);

// H = sum_i [U/2 n_i(n_i-1) - mu n_i] - J sum_<ij> (a_i^dag a_j + a_j^dag a_i)
fock::SparseOperator bose_hubbard(const fock::FockBasis& basis, const LatticeSpec& spec);

// Complete spectrum of a number-conserving Hamiltonian. Column k of
// `vectors` is the eigenvector with energy energies[k]; every column is also
// an eigenvector of the total number operator with eigenvalue
// photon_number[k].
struct EigenSystem {
    Eigen::VectorXd energies;
    fock::SparseMatrix vectors;
    std::vector<int> photon_number;

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(energies.size()); }
    Eigen::VectorXcd vector(std::size_t k) const;

    // V^dag O V, i.e. the operator's matrix elements <k|O|l>.
    fock::SparseMatrix to_eigenbasis(const fock::SparseOperator& op) const;
};

struct DiagonalizeOptions {
    double commutator_tol{1e-10};
    double cluster_rel_tol{1e-9};     // energy cluster width relative to max|eps|
    double number_integer_tol{1e-8};  // distance of <N> from an integer
    // Diagonal number operators are handled sector by sector; set to force
    // the full dense route with cluster-wise number rotation.
    bool force_dense{false};
};

// Throws ConsistencyError if H or n_op is not Hermitian, if [H, n_op] != 0,
// or if an eigenvector cannot be given an integer photon number.
EigenSystem diagonalize(const fock::SparseOperator& H, const fock::SparseOperator& n_op,
                        const DiagonalizeOptions& options = {});

} // namespace lightmu::hamiltonian
