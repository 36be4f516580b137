#include "lightmu/rates.hpp"

#include "lightmu/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace lightmu::rates {

using fock::cplx;

void BathParams::validate() const {
    if (!(gamma0 >= 0.0)) throw ArgumentError("BathParams: gamma0 must be >= 0");
    if (!(kappa >= 0.0)) throw ArgumentError("BathParams: kappa must be >= 0");
    if (!(beta > 0.0)) throw ArgumentError("BathParams: beta must be > 0");
    if (!(U_ref > 0.0)) throw ArgumentError("BathParams: U_ref must be > 0");
}

double n_th(double beta, double nu) {
    if (!(beta > 0.0)) throw ArgumentError("n_th: beta must be > 0");
    if (nu < 0.0) throw ArgumentError(fmt::format("n_th: negative frequency {}", nu));
    if (nu == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::expm1(beta * nu);
}

OhmicRates ohmic_weight(double beta, double delta, double gamma0, double U_ref) {
    if (!(beta > 0.0)) throw ArgumentError("ohmic_weight: beta must be > 0");
    if (delta == 0.0) {
        const double limit = gamma0 / (beta * U_ref);
        return {limit, limit};
    }
    const double nu = std::abs(delta);
    const double gamma = gamma0 * nu / U_ref;
    const double occ = n_th(beta, nu);
    return {gamma * occ, gamma * (occ + 1.0)};
}

double parametric_rate(const BathParams& p, double delta) {
    const auto w = ohmic_weight(p.beta, delta, p.gamma0, p.U_ref);
    if (delta > 0.0) return w.emit;
    if (delta < 0.0) return w.absorb;
    // Theta(0) = 1/2; gamma -> 0 so only the finite nu N_th limit survives.
    return 0.5 * (w.absorb + w.emit);
}

double RateMatrix::max_column_sum() const {
    double worst = 0.0;
    for (int c = 0; c < W.outerSize(); ++c) {
        double s = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(W, c); it; ++it) s += it.value();
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

RateMatrix build_rates(const hamiltonian::EigenSystem& eig,
                       const std::vector<fock::SparseOperator>& annihilators,
                       const BathParams& params, const RateOptions& options) {
    params.validate();
    const auto dim = eig.dimension();
    if (annihilators.empty()) throw ArgumentError("build_rates: no ladder operators given");
    for (const auto& a : annihilators) {
        if (a.dimension() != dim) {
            throw ArgumentError(fmt::format(
                "build_rates: ladder operator dimension {} does not match eigensystem {}",
                a.dimension(), dim));
        }
    }

    // S(l, k) = sum_i |<l|a_i|k>|^2; the raising elements are its transpose.
    Eigen::SparseMatrix<double> S{int(dim), int(dim)};
    for (const auto& a : annihilators) {
        const fock::SparseMatrix ak = eig.to_eigenbasis(a);
        S += Eigen::SparseMatrix<double>(ak.cwiseAbs2());
    }

    std::vector<Eigen::Triplet<double, int>> trip;
    trip.reserve(2 * std::size_t(S.nonZeros()) + dim);
    std::vector<double> outflow(dim, 0.0);
    auto add = [&](std::size_t to, std::size_t from, double rate) {
        if (rate <= 0.0) return;
        trip.emplace_back(int(to), int(from), rate);
        outflow[from] += rate;
    };

    for (int k = 0; k < S.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(S, k); it; ++it) {
            const double m2 = it.value();
            if (m2 <= options.matrix_element_floor) continue;
            const auto l = std::size_t(it.row());
            const auto src = std::size_t(k);
            if (eig.photon_number[l] != eig.photon_number[src] - 1) {
                throw ConsistencyError(fmt::format(
                    "build_rates: a_i connects states with N = {} and N = {}",
                    eig.photon_number[src], eig.photon_number[l]));
            }
            const double e_hi = eig.energies[Eigen::Index(src)]; // N
            const double e_lo = eig.energies[Eigen::Index(l)];   // N - 1
            // Lowering src -> l, with the loss channel.
            add(l, src, (parametric_rate(params, e_hi - e_lo) + params.kappa) * m2);
            // Raising l -> src.
            add(src, l, parametric_rate(params, e_lo - e_hi) * m2);
        }
    }
    for (std::size_t k = 0; k < dim; ++k) {
        if (outflow[k] != 0.0) trip.emplace_back(int(k), int(k), -outflow[k]);
    }

    RateMatrix out;
    out.W.resize(int(dim), int(dim));
    out.W.setFromTriplets(trip.begin(), trip.end());
    out.W.makeCompressed();
    return out;
}

} // namespace lightmu::rates
