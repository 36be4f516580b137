#include "lightmu/fock.hpp"

#include "lightmu/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace lightmu::fock {

FockBasis::FockBasis(std::size_t n_sites, int n_max, std::size_t dimension_cap)
    : n_sites_(n_sites), n_max_(n_max), dim_(1) {
    if (n_sites == 0) {
        throw ArgumentError("build_basis: n_sites must be >= 1");
    }
    if (n_max < 0) {
        throw ArgumentError("build_basis: n_max must be non-negative");
    }
    const auto radix = static_cast<std::size_t>(n_max) + 1;
    // Dimension as double first so the overflow check cannot wrap.
    const double requested = std::pow(static_cast<double>(radix), static_cast<double>(n_sites));
    if (requested > static_cast<double>(dimension_cap)) {
        throw CapacityError(fmt::format(
            "build_basis: requested dimension {:.0f} ({}^{}) exceeds cap {}", requested,
            radix, n_sites, dimension_cap));
    }
    for (std::size_t i = 0; i < n_sites; ++i) dim_ *= radix;

    strides_.assign(n_sites, 1);
    for (std::size_t i = n_sites - 1; i-- > 0;) strides_[i] = strides_[i + 1] * radix;

    occupations_.resize(dim_ * n_sites);
    totals_.resize(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
        std::size_t rest = k;
        int total = 0;
        for (std::size_t i = 0; i < n_sites; ++i) {
            const int n = static_cast<int>(rest / strides_[i]);
            rest %= strides_[i];
            occupations_[k * n_sites + i] = n;
            total += n;
        }
        totals_[k] = total;
    }
}

std::span<const int> FockBasis::state(std::size_t k) const {
    if (k >= dim_) {
        throw IndexError(fmt::format("FockBasis::state: index {} out of range {}", k, dim_));
    }
    return {occupations_.data() + k * n_sites_, n_sites_};
}

std::size_t FockBasis::index_of(std::span<const int> occupations) const {
    if (occupations.size() != n_sites_) {
        throw IndexError("FockBasis::index_of: occupation vector has wrong length");
    }
    std::size_t k = 0;
    for (std::size_t i = 0; i < n_sites_; ++i) {
        const int n = occupations[i];
        if (n < 0 || n > n_max_) {
            throw IndexError(fmt::format(
                "FockBasis::index_of: occupation {} on site {} outside 0..{}", n, i, n_max_));
        }
        k += static_cast<std::size_t>(n) * strides_[i];
    }
    return k;
}

SparseOperator::SparseOperator(SparseMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw ArgumentError("SparseOperator: matrix must be square");
    }
    m_.prune(cplx{0.0, 0.0}, 0.0);
    m_.makeCompressed();
}

std::vector<SparseOperator::Entry> SparseOperator::entries() const {
    std::vector<Entry> out;
    out.reserve(static_cast<std::size_t>(m_.nonZeros()));
    for (int c = 0; c < m_.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(m_, c); it; ++it) {
            out.push_back({static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()),
                           it.value()});
        }
    }
    return out;
}

bool SparseOperator::is_hermitian(double tol) const {
    const SparseMatrix diff = m_ - SparseMatrix(m_.adjoint());
    for (int c = 0; c < diff.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(diff, c); it; ++it) {
            if (std::abs(it.value()) > tol) return false;
        }
    }
    return true;
}

SparseOperator SparseOperator::adjoint() const { return SparseOperator(SparseMatrix(m_.adjoint())); }

SparseOperator SparseOperator::operator*(const SparseOperator& rhs) const {
    if (dimension() != rhs.dimension()) throw ArgumentError("SparseOperator: dimension mismatch");
    return SparseOperator(SparseMatrix(m_ * rhs.m_));
}

SparseOperator SparseOperator::operator+(const SparseOperator& rhs) const {
    if (dimension() != rhs.dimension()) throw ArgumentError("SparseOperator: dimension mismatch");
    return SparseOperator(SparseMatrix(m_ + rhs.m_));
}

SparseOperator SparseOperator::operator-(const SparseOperator& rhs) const {
    if (dimension() != rhs.dimension()) throw ArgumentError("SparseOperator: dimension mismatch");
    return SparseOperator(SparseMatrix(m_ - rhs.m_));
}

SparseOperator SparseOperator::scaled(cplx factor) const { return SparseOperator(SparseMatrix(m_ * factor)); }

double SparseOperator::max_abs() const {
    double out = 0.0;
    for (int c = 0; c < m_.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(m_, c); it; ++it) out = std::max(out, std::abs(it.value()));
    }
    return out;
}

FockBasis build_basis(std::size_t n_sites, int n_max, std::size_t dimension_cap) {
    return FockBasis(n_sites, n_max, dimension_cap);
}

namespace {

void check_site(const FockBasis& basis, std::size_t site) {
    if (site >= basis.n_sites()) {
        throw IndexError(fmt::format("site {} out of range for {}-site basis", site, basis.n_sites()));
    }
}

} // namespace

SparseOperator annihilation(const FockBasis& basis, std::size_t site) {
    check_site(basis, site);
    const auto dim = basis.dimension();
    std::vector<Eigen::Triplet<cplx, int>> trip;
    trip.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const int n = basis.occupation(k, site);
        if (n == 0) continue;
        trip.emplace_back(static_cast<int>(k - basis.stride(site)), static_cast<int>(k),
                          cplx{std::sqrt(static_cast<double>(n)), 0.0});
    }
    SparseMatrix m(static_cast<int>(dim), static_cast<int>(dim));
    m.setFromTriplets(trip.begin(), trip.end());
    return SparseOperator(std::move(m));
}

SparseOperator creation(const FockBasis& basis, std::size_t site) {
    return annihilation(basis, site).adjoint();
}

SparseOperator number_operator(const FockBasis& basis, std::size_t site) {
    if (site != all_sites) check_site(basis, site);
    const auto dim = basis.dimension();
    std::vector<Eigen::Triplet<cplx, int>> trip;
    trip.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const int n = site == all_sites ? basis.total(k) : basis.occupation(k, site);
        if (n != 0) trip.emplace_back(static_cast<int>(k), static_cast<int>(k), cplx{double(n), 0.0});
    }
    SparseMatrix m(static_cast<int>(dim), static_cast<int>(dim));
    m.setFromTriplets(trip.begin(), trip.end());
    return SparseOperator(std::move(m));
}

SparseOperator identity(std::size_t dimension) {
    SparseMatrix m(static_cast<int>(dimension), static_cast<int>(dimension));
    m.setIdentity();
    return SparseOperator(std::move(m));
}

} // namespace lightmu::fock
