// fock.hpp: truncated many-boson Fock spaces and sparse ladder operators

#pragma once

#include <Eigen/Sparse>

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace lightmu::fock {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;

inline constexpr std::size_t default_dimension_cap = 1'000'000;

// Occupation-number basis of an L-site lattice with at most n_max bosons per
// site. States are ordered lexicographically with site 0 as the most
// significant digit, so state k is the base-(n_max+1) expansion of k.
class FockBasis {
public:
    FockBasis(std::size_t n_sites, int n_max,
              std::size_t dimension_cap = default_dimension_cap);

    std::size_t n_sites() const noexcept { return n_sites_; }
    int n_max() const noexcept { return n_max_; }
    std::size_t dimension() const noexcept { return dim_; }

    std::span<const int> state(std::size_t k) const;
    int occupation(std::size_t k, std::size_t site) const {
        return occupations_[k * n_sites_ + site];
    }
    int total(std::size_t k) const { return totals_[k]; }

    // Position of an occupation vector; throws IndexError if it is not in
    // the basis.
    std::size_t index_of(std::span<const int> occupations) const;

    // Index shift produced by adding one boson on `site` (mixed radix).
    std::size_t stride(std::size_t site) const { return strides_[site]; }

private:
    std::size_t n_sites_;
    int n_max_;
    std::size_t dim_;
    std::vector<std::size_t> strides_;
    std::vector<int> occupations_; // dim_ x n_sites_, row major
    std::vector<int> totals_;
};

// Complex sparse operator on a Fock basis. Hermiticity is a property checked
// on demand, not a storage constraint, so ladder operators share the type.
class SparseOperator {
public:
    SparseOperator() = default;
    explicit SparseOperator(SparseMatrix m);

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    const SparseMatrix& matrix() const noexcept { return m_; }

    struct Entry {
        std::size_t row;
        std::size_t col;
        cplx value;
    };
    // Stored entries in column-major order.
    std::vector<Entry> entries() const;

    bool is_hermitian(double tol = 1e-12) const;
    SparseOperator adjoint() const;

    SparseOperator operator*(const SparseOperator& rhs) const;
    SparseOperator operator+(const SparseOperator& rhs) const;
    SparseOperator operator-(const SparseOperator& rhs) const;
    SparseOperator scaled(cplx factor) const;

    double max_abs() const;

private:
    SparseMatrix m_;
};

inline constexpr std::size_t all_sites = std::numeric_limits<std::size_t>::max();

FockBasis build_basis(std::size_t n_sites, int n_max,
                      std::size_t dimension_cap = default_dimension_cap);

SparseOperator annihilation(const FockBasis& basis, std::size_t site);
SparseOperator creation(const FockBasis& basis, std::size_t site);

// n_site, or the total number operator when site == all_sites.
SparseOperator number_operator(const FockBasis& basis, std::size_t site = all_sites);

SparseOperator identity(std::size_t dimension);

} // namespace lightmu::fock
