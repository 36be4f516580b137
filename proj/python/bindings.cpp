#include "lightmu/analytic.hpp"
#include "lightmu/bathdisc.hpp"
#include "lightmu/error.hpp"
#include "lightmu/lattice.hpp"
#include "lightmu/tlssim.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <map>

namespace py = pybind11;
using namespace lightmu;

namespace {

py::dict solve_lattice(std::size_t sites, double mu, double J, double gamma0, double kappa, double beta, int n_max,
                       double tol) {
    const auto model = build_lattice_model(ring_spec(sites, 1.0, mu, J), n_max);
    const rates::BathParams bath{gamma0, kappa, beta, 1.0};
    PointResult r;
    {
        py::gil_scoped_release release;
        r = solve_point(model, bath, tol);
    }
    py::dict d;
    d["energies"] = Eigen::VectorXd(model.eig.energies);
    d["photon_number"] = model.eig.photon_number;
    d["populations"] = Eigen::VectorXd(r.state.populations);
    d["gibbs"] = steadystate::grand_canonical(model.eig, beta);
    d["number_distribution"] = steadystate::number_distribution(r.state.populations, model.eig);
    d["mandel_q"] = r.mandel_q;
    d["coherence"] = r.coherence;
    d["ground_N"] = r.ground_N;
    d["residual"] = r.state.residual;
    return d;
}

bathdisc::SpectralDensity density(const std::string& family, double nu_c, double tau_rc, double omega_cutoff) {
    bathdisc::SpectralDensity sd{bathdisc::parse_family(family), nu_c, tau_rc, omega_cutoff};
    sd.validate();
    return sd;
}

py::dict trajectory_dict(const tlssim::Trajectory& tr) {
    std::vector<double> t, sz, nq, drift;
    for (const auto& s : tr) {
        t.push_back(s.t);
        sz.push_back(s.sigma_z);
        nq.push_back(s.bath_quanta);
        drift.push_back(s.norm_drift);
    }
    py::dict d;
    d["t"] = t;
    d["sigma_z"] = sz;
    d["bath_quanta"] = nq;
    d["norm_drift"] = drift;
    return d;
}

tlssim::Trajectory to_trajectory(const std::vector<double>& t, const std::vector<double>& sz) {
    if (t.size() != sz.size()) throw ArgumentError("fit_decay: t and sigma_z differ in length");
    tlssim::Trajectory tr;
    for (std::size_t i = 0; i < t.size(); ++i) tr.push_back({t[i], sz[i], 0.0, 0.0});
    return tr;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Driven-dissipative photon lattices with a photonic chemical potential";

    // Exception types live for the interpreter's lifetime; handles are never released.
    auto make_type = [&m](const std::string& name, PyObject* parent) {
        PyObject* type = PyErr_NewException(("lightmu." + name).c_str(), parent, nullptr);
        m.add_object(name.c_str(), py::handle(type).inc_ref());
        return type;
    };
    PyObject* base = make_type("Error", PyExc_RuntimeError);
    static std::map<std::string, PyObject*> by_kind{{"", base}};
    const std::pair<const char*, const char*> types[] = {
        {"argument", "ArgumentError"},       {"index", "IndexError"},           {"capacity", "CapacityError"},
        {"consistency", "ConsistencyError"}, {"degeneracy", "DegeneracyError"}, {"solver", "SolverError"},
        {"undefined", "UndefinedError"},     {"singularity", "SingularityError"}, {"breakdown", "BreakdownError"},
        {"numerical", "NumericalError"},     {"integration", "IntegrationError"}, {"fit_quality", "FitQualityError"},
        {"config", "ConfigError"}};
    for (const auto& [kind, name] : types) by_kind[kind] = make_type(name, base);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const auto it = by_kind.find(e.kind());
            PyErr_SetString(it != by_kind.end() ? it->second : by_kind.at(""), e.what());
        }
    });

    m.def("solve_lattice", &solve_lattice, py::arg("sites") = 4, py::arg("mu") = 0.4, py::arg("J") = 0.1,
          py::arg("gamma0") = 0.01, py::arg("kappa") = 0.0, py::arg("beta") = 10.0, py::arg("n_max") = 3,
          py::arg("tol") = 1e-11,
          "Steady state of a ring of `sites` sites (energies in U). Returns a dict with eigen-energies, "
          "populations, Gibbs weights, Mandel Q and coherence.");

    m.def(
        "single_site_steady",
        [](double mu, double beta, double gamma0, double kappa, int n_max) {
            return analytic::single_site_steady({1.0, mu, beta, gamma0, kappa, n_max});
        },
        py::arg("mu"), py::arg("beta") = 10.0, py::arg("gamma0") = 0.01, py::arg("kappa") = 0.0,
        py::arg("n_max") = 3, "Detailed-balance populations p_n of one site.");
    m.def("n_eff_particle", &analytic::n_eff_particle, py::arg("dE"), py::arg("beta"), py::arg("kappa"),
          py::arg("gamma"));
    m.def("n_eff_hole", &analytic::n_eff_hole, py::arg("dE"), py::arg("beta"), py::arg("kappa"), py::arg("gamma"));
    m.def(
        "excitation_energies",
        [](int n0, double mu, double J, double z) {
            const auto e = analytic::excitation_energies(n0, 1.0, mu, J, z);
            return py::make_tuple(e.particle, e.hole);
        },
        py::arg("n0"), py::arg("mu"), py::arg("J"), py::arg("z") = 2.0, "(particle, hole) excitation energies.");
    m.def(
        "lobe_boundary",
        [](int n0, double z, const std::vector<double>& J, double beta, double gamma0, double kappa, double threshold) {
            analytic::LobeParams lp;
            lp.beta = beta;
            lp.gamma0 = gamma0;
            lp.kappa = kappa;
            lp.threshold = threshold;
            py::dict d;
            std::vector<double> lo, hi, brk;
            std::vector<bool> closed;
            for (const auto& b : analytic::lobe_boundary(n0, z, J, lp)) {
                lo.push_back(b.mu_low);
                hi.push_back(b.mu_high);
                closed.push_back(b.closed);
                brk.push_back(b.mu_hole_breakdown);
            }
            d["J"] = J;
            d["mu_low"] = lo;
            d["mu_high"] = hi;
            d["closed"] = closed;
            d["mu_hole_breakdown"] = brk;
            return d;
        },
        py::arg("n0"), py::arg("z"), py::arg("J"), py::arg("beta") = 10.0, py::arg("gamma0") = 0.07,
        py::arg("kappa") = 0.07 / 30.0, py::arg("threshold") = 1.0);
    m.def(
        "t_c",
        [](double dEp, double dEh, double gp, double gh, double kappa) {
            const auto t = analytic::t_c(dEp, dEh, gp, gh, kappa);
            return py::make_tuple(t.equilibrium, t.non_equilibrium);
        },
        py::arg("dE_particle"), py::arg("dE_hole"), py::arg("gamma_p"), py::arg("gamma_h"), py::arg("kappa"),
        "(equilibrium, non_equilibrium) critical temperatures.");

    m.def(
        "discretize",
        [](std::size_t n, const std::string& family, double nu_c, double tau_rc, double omega_cutoff) {
            const auto bath = bathdisc::discretize(n, density(family, nu_c, tau_rc, omega_cutoff));
            std::vector<double> w, wt, g;
            for (const auto& md : bath.modes) {
                w.push_back(md.omega);
                wt.push_back(md.weight);
                g.push_back(md.g);
            }
            py::dict d;
            d["omega"] = w;
            d["weight"] = wt;
            d["g"] = g;
            return d;
        },
        py::arg("n"), py::arg("family") = "ohmic_rc_filtered", py::arg("nu_c") = 1.0, py::arg("tau_rc") = 4.0,
        py::arg("omega_cutoff") = 2.5, "Quadrature modes (omega, weight, g) of a continuum bath.");
    m.def(
        "correlation",
        [](std::size_t n, const std::vector<double>& t, double beta, const std::string& family, double nu_c,
           double tau_rc, double omega_cutoff) {
            const auto sd = density(family, nu_c, tau_rc, omega_cutoff);
            const auto bath = bathdisc::discretize(n, sd);
            std::vector<std::complex<double>> disc, ref;
            for (double x : t) {
                disc.push_back(bathdisc::correlation(bath, beta, x));
                ref.push_back(bathdisc::reference_correlation(sd, beta, x));
            }
            return py::make_tuple(disc, ref);
        },
        py::arg("n"), py::arg("t"), py::arg("beta") = std::numeric_limits<double>::infinity(),
        py::arg("family") = "ohmic_exponential", py::arg("nu_c") = 1.0, py::arg("tau_rc") = 4.0,
        py::arg("omega_cutoff") = 2.5, "(discrete, reference) bath correlation at the given times.");

    m.def(
        "tls_evolve",
        [](std::size_t n, double A, double lambda, double mu_drive, double t_final, bool start_up,
           const std::string& family, double tau_rc, double omega_cutoff, double dt) {
            const auto bath = bathdisc::discretize(n, density(family, 1.0, tau_rc, omega_cutoff));
            const tlssim::Generator gen(bath, {1.0, A, lambda, mu_drive});
            tlssim::EvolveOptions eo;
            eo.dt_sample = dt;
            tlssim::Trajectory tr;
            {
                py::gil_scoped_release release;
                tr = tlssim::evolve(gen.initial_state(start_up ? tlssim::Spin::up : tlssim::Spin::down), gen,
                                    t_final, eo);
            }
            return trajectory_dict(tr);
        },
        py::arg("n") = 50, py::arg("A") = 0.5, py::arg("lam") = 0.0, py::arg("mu_drive") = 0.0,
        py::arg("t_final") = 40.0, py::arg("start_up") = true, py::arg("family") = "ohmic_rc_filtered",
        py::arg("tau_rc") = 4.0, py::arg("omega_cutoff") = 2.5, py::arg("dt") = 0.1,
        "Spin plus at most two bath quanta; returns t, sigma_z, bath_quanta, norm_drift.");
    m.def(
        "fit_decay",
        [](const std::vector<double>& t, const std::vector<double>& sz, double t_start, double t_end,
           double max_residual) {
            const auto f = tlssim::fit_decay(to_trajectory(t, sz), {t_start, t_end, max_residual});
            py::dict d;
            d["rate"] = f.rate;
            d["uncertainty"] = f.uncertainty;
            d["max_residual"] = f.max_residual;
            d["amplitude"] = f.amplitude;
            d["points"] = f.points;
            return d;
        },
        py::arg("t"), py::arg("sigma_z"), py::arg("t_start") = 2.0, py::arg("t_end") = 30.0,
        py::arg("max_residual") = 0.05);
}
