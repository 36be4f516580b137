#include "lightmu/lattice.hpp"

#include "lightmu/error.hpp"

#include <limits>

namespace lightmu {

LatticeModel build_lattice_model(const hamiltonian::LatticeSpec& spec, int n_max,
                                 std::size_t dimension_cap) {
    auto basis = fock::build_basis(spec.n_sites, n_max, dimension_cap);
    const auto H = hamiltonian::bose_hubbard(basis, spec);
    auto eig = hamiltonian::diagonalize(H, fock::number_operator(basis));
    std::vector<fock::SparseOperator> a, n;
    for (std::size_t i = 0; i < spec.n_sites; ++i) {
        a.push_back(fock::annihilation(basis, i));
        n.push_back(fock::number_operator(basis, i));
    }
    return {std::move(basis), spec, std::move(eig), std::move(a), std::move(n)};
}

hamiltonian::LatticeSpec ring_spec(std::size_t n_sites, double U, double mu, double J) {
    hamiltonian::LatticeSpec spec{n_sites, {}, U, mu, J};
    if (n_sites >= 2) spec.edges = hamiltonian::ring_lattice(n_sites);
    return spec;
}

PointResult solve_point(const LatticeModel& model, const rates::BathParams& bath, double tol) {
    const auto W = rates::build_rates(model.eig, model.annihilators, bath);
    PointResult out{steadystate::solve_steady(W, tol), std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN(), model.eig.photon_number.front()};
    try {
        out.mandel_q = steadystate::mandel_q(out.state, model.eig, model.numbers);
    } catch (const UndefinedError&) {
    }
    if (!model.spec.edges.empty()) {
        out.coherence = steadystate::coherence(out.state, model.eig, model.annihilators, model.spec.edges);
    }
    return out;
}

} // namespace lightmu
