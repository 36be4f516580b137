#include "app/commands.hpp"

#include "lightmu/analytic.hpp"
#include "lightmu/bathdisc.hpp"
#include "lightmu/error.hpp"
#include "lightmu/lattice.hpp"
#include "lightmu/tlssim.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#ifndef LIGHTMU_VERSION
#define LIGHTMU_VERSION "unknown"
#endif

namespace lightmu::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

unsigned thread_count(unsigned requested) {
    return requested ? requested : std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> linspace(double lo, double hi, long n) {
    if (n < 1) throw ConfigError("grid needs at least one point");
    std::vector<double> v(std::size_t(n), lo);
    for (long i = 1; i < n; ++i) v[std::size_t(i)] = lo + (hi - lo) * double(i) / double(n - 1);
    return v;
}

std::string num(double v) { return fmt::format("{:.12g}", v); }

// Quote-free, comma-free single line for CSV error columns.
std::string clean(std::string s) {
    for (auto& c : s)
        if (c == ',' || c == '\n' || c == '"') c = ';';
    return s;
}

class OutputFile {
public:
    OutputFile(const RunContext& ctx, const std::string& name, const std::string& command,
               const std::string& units, const Config& cfg)
        : path_(ctx.out_dir / name), os_(path_) {
        if (!os_) throw std::runtime_error(fmt::format("cannot write '{}'", path_.string()));
        fmt::print(os_, "# lightmu {} {}\n# units: {}\n# effective config:\n", LIGHTMU_VERSION, command, units);
        std::istringstream ini(cfg.effective_ini());
        for (std::string line; std::getline(ini, line);) fmt::print(os_, "#   {}\n", line);
    }
    std::ostream& stream() { return os_; }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
    std::ofstream os_;
};

const char* lattice_units = "energies, rates and temperatures in units of U (U = 1), k_B = 1";
const char* tls_units = "frequencies in units of omega0 (omega0 = 1), time in 1/omega0";

struct LatticeSettings {
    std::size_t sites;
    int n_max;
    double mu;
    double J;
    rates::BathParams bath;
    double tol;
};

LatticeSettings lattice_settings(Config& cfg, double mu, double J, double gamma0, double kappa_ratio,
                                 double kappa_abs) {
    LatticeSettings s{};
    const long sites = cfg.integer("lattice", "sites", 4);
    if (sites < 1 || sites > 6) throw ConfigError(fmt::format("[lattice] sites = {} outside 1..6", sites));
    s.sites = std::size_t(sites);
    s.n_max = int(cfg.integer("lattice", "n_max", 3));
    if (s.n_max < 1) throw ConfigError("[lattice] n_max must be >= 1");
    s.mu = cfg.number("lattice", "mu", mu);
    s.J = cfg.number("lattice", "J", J);
    s.bath.gamma0 = cfg.number("bath", "gamma0", gamma0);
    s.bath.kappa = cfg.number("bath", "kappa", std::isnan(kappa_abs) ? kappa_ratio * s.bath.gamma0 : kappa_abs);
    s.bath.beta = cfg.number("bath", "beta", 10.0);
    s.bath.U_ref = 1.0;
    s.tol = cfg.number("solver", "tol", 1e-11);
    try {
        s.bath.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
    }
    return s;
}

// Coordination number of the ring used by the lattice commands.
double ring_z(std::size_t sites) { return sites >= 3 ? 2.0 : (sites == 2 ? 1.0 : 0.0); }

bathdisc::SpectralDensity spectral_density(Config& cfg, const std::string& section, const std::string& family) {
    bathdisc::SpectralDensity sd;
    try {
        sd.family = bathdisc::parse_family(cfg.text(section, "family", family));
    } catch (const ArgumentError& e) {
        throw ConfigError(fmt::format("[{}] family: {}", section, e.what()));
    }
    if (sd.family == bathdisc::Family::ohmic_exponential) {
        sd.nu_c = cfg.number(section, "nu_c", 1.0);
    } else {
        sd.tau_rc = cfg.number(section, "tau_rc", 4.0);
        sd.omega_cutoff = cfg.number(section, "omega_cutoff", 2.5);
    }
    try {
        sd.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
    }
    return sd;
}

std::size_t mode_count(Config& cfg, const std::string& section) {
    const long n = cfg.integer(section, "modes", 50);
    if (n < 1) throw ConfigError(fmt::format("[{}] modes must be >= 1", section));
    return std::size_t(n);
}

} // namespace

RunResult cmd_steady(Config& cfg, const RunContext& ctx) {
    const auto s = lattice_settings(cfg, 0.4, 0.1, 0.01, nan, 0.003);
    cfg.reject_unused();

    const auto model = build_lattice_model(ring_spec(s.sites, 1.0, s.mu, s.J), s.n_max);
    const auto r = solve_point(model, s.bath, s.tol);
    const Eigen::VectorXd gibbs = steadystate::grand_canonical(model.eig, s.bath.beta);

    OutputFile f(ctx, "steady.csv", "steady", lattice_units, cfg);
    fmt::print(f.stream(), "eigenindex,energy,N,population,gibbs\n");
    for (std::size_t k = 0; k < model.eig.dimension(); ++k) {
        const auto i = Eigen::Index(k);
        fmt::print(f.stream(), "{},{},{},{},{}\n", k, num(model.eig.energies[i]), model.eig.photon_number[k],
                   num(r.state.populations[i]), num(gibbs[i]));
    }
    json summary = {{"mandel_q", r.mandel_q},          {"coherence", r.coherence},
                    {"ground_N", r.ground_N},          {"residual", r.state.residual},
                    {"dimension", model.eig.dimension()},
                    {"max_gibbs_deviation", (r.state.populations - gibbs).cwiseAbs().maxCoeff()}};
    return {{f.path()}, summary};
}

RunResult cmd_sweep(Config& cfg, const RunContext& ctx) {
    const auto s = lattice_settings(cfg, 0.0, 0.0, 0.07, 1.0 / 30.0, nan);
    if (s.sites < 2) throw ConfigError("[lattice] sweep needs sites in 2..6");
    const auto mus = linspace(cfg.number("sweep", "mu_min", 0.0), cfg.number("sweep", "mu_max", 1.2),
                              cfg.integer("sweep", "mu_points", 40));
    const auto Js = linspace(cfg.number("sweep", "J_min", 0.0), cfg.number("sweep", "J_max", 0.3),
                             cfg.integer("sweep", "J_points", 40));
    const auto ratios = cfg.numbers("overlay", "kappa_ratios", {1.0 / 30.0, 1.0 / 3.0});
    const auto fillings = cfg.numbers("overlay", "n0", {1.0, 2.0});
    analytic::LobeParams lp;
    lp.beta = s.bath.beta;
    lp.gamma0 = s.bath.gamma0;
    lp.threshold = cfg.number("overlay", "threshold", 1.0);
    lp.mu_tol = cfg.number("overlay", "mu_tol", 1e-6);
    cfg.reject_unused();
    for (double J : Js)
        if (J < 0.0) throw ConfigError("[sweep] J values must be >= 0");

    struct Row {
        double mu, J;
        PointResult r;
        std::string error;
    };
    std::vector<Row> rows;
    for (double mu : mus)
        for (double J : Js) rows.push_back({mu, J, {{}, nan, nan, -1}, {}});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < rows.size();) {
            auto& row = rows[i];
            try {
                const auto model = build_lattice_model(ring_spec(s.sites, 1.0, row.mu, row.J), s.n_max);
                row.r = solve_point(model, s.bath, s.tol);
            } catch (const std::exception& e) {
                row.error = clean(e.what());
            }
        }
    };
    const unsigned n_threads = std::min<unsigned>(thread_count(ctx.threads), unsigned(rows.size()));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n_threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    OutputFile f(ctx, "sweep.csv", "sweep", lattice_units, cfg);
    fmt::print(f.stream(), "mu,J,mandel_q,coherence,ground_N,residual,error\n");
    std::size_t failed = 0;
    for (const auto& row : rows) {
        if (!row.error.empty()) {
            ++failed;
            fmt::print(f.stream(), "{},{},nan,nan,nan,nan,{}\n", num(row.mu), num(row.J), row.error);
        } else {
            fmt::print(f.stream(), "{},{},{},{},{},{},\n", num(row.mu), num(row.J), num(row.r.mandel_q),
                       num(row.r.coherence), row.r.ground_N, num(row.r.state.residual));
        }
    }

    OutputFile o(ctx, "lobes_overlay.csv", "sweep", lattice_units, cfg);
    fmt::print(o.stream(), "kappa_over_gamma0,n0,J,mu_low,mu_high,closed,mu_hole_breakdown\n");
    const double z = ring_z(s.sites);
    for (double ratio : ratios) {
        lp.kappa = ratio * lp.gamma0;
        for (double n0 : fillings) {
            for (const auto& b : analytic::lobe_boundary(int(n0), z, Js, lp)) {
                fmt::print(o.stream(), "{},{},{},{},{},{},{}\n", num(ratio), int(n0), num(b.J), num(b.mu_low),
                           num(b.mu_high), int(b.closed), num(b.mu_hole_breakdown));
            }
        }
    }
    return {{f.path(), o.path()}, {{"points", rows.size()}, {"failed_points", failed}, {"threads", n_threads}}};
}

RunResult cmd_lobes(Config& cfg, const RunContext& ctx) {
    const int n0 = int(cfg.integer("lobes", "n0", 1));
    const double z = cfg.number("lobes", "z", 2.0);
    analytic::LobeParams lp;
    lp.beta = cfg.number("lobes", "beta", 10.0);
    lp.gamma0 = cfg.number("lobes", "gamma0", 0.07);
    lp.threshold = cfg.number("lobes", "threshold", 1.0);
    lp.mu_tol = cfg.number("lobes", "mu_tol", 1e-6);
    const auto ratios = cfg.numbers("lobes", "kappa_ratios", {1.0 / 30.0, 1.0 / 3.0});
    const auto Js = linspace(cfg.number("lobes", "J_min", 0.0), cfg.number("lobes", "J_max", 0.3),
                             cfg.integer("lobes", "J_points", 61));
    cfg.reject_unused();

    OutputFile f(ctx, "lobes.csv", "lobes", lattice_units, cfg);
    fmt::print(f.stream(), "kappa_over_gamma0,J,mu_low,mu_high,closed,mu_hole_breakdown\n");
    json curves = json::array();
    for (double ratio : ratios) {
        lp.kappa = ratio * lp.gamma0;
        try {
            lp.validate();
        } catch (const ArgumentError& e) {
            throw ConfigError(e.what());
        }
        std::size_t open = 0;
        for (const auto& b : analytic::lobe_boundary(n0, z, Js, lp)) {
            open += !b.closed;
            fmt::print(f.stream(), "{},{},{},{},{},{}\n", num(ratio), num(b.J), num(b.mu_low), num(b.mu_high),
                       int(b.closed), num(b.mu_hole_breakdown));
        }
        curves.push_back({{"kappa_over_gamma0", ratio}, {"open_points", open}});
    }
    return {{f.path()}, {{"curves", curves}}};
}

RunResult cmd_bath(Config& cfg, const RunContext& ctx) {
    const auto sd = spectral_density(cfg, "bath", "ohmic_exponential");
    const auto n = mode_count(cfg, "bath");
    const double beta = cfg.number("bath", "beta", std::numeric_limits<double>::infinity());
    const auto ts = linspace(0.0, cfg.number("correlation", "t_max", 30.0), cfg.integer("correlation", "t_points", 301));
    bathdisc::ReferenceOptions ro;
    ro.rel_tol = cfg.number("correlation", "rel_tol", 1e-10);
    cfg.reject_unused();
    if (!(beta > 0.0)) throw ConfigError("[bath] beta must be > 0");

    const auto bath = bathdisc::discretize(n, sd);
    OutputFile table(ctx, "bath_table.txt", "bath", tls_units, cfg);
    bathdisc::write_table(table.stream(), bath);

    OutputFile corr(ctx, "bath_correlation.csv", "bath", tls_units, cfg);
    fmt::print(corr.stream(), "t,discrete_re,discrete_im,reference_re,reference_im,rel_error\n");
    double worst = 0.0, t_valid = ts.back();
    bool left = false;
    for (double t : ts) {
        const auto d = bathdisc::correlation(bath, beta, t);
        const auto r = bathdisc::reference_correlation(sd, beta, t, ro);
        const double rel = std::abs(d - r) / std::abs(r);
        worst = std::max(worst, rel);
        if (!left && rel >= 1e-3) {
            left = true;
            t_valid = t;
        }
        fmt::print(corr.stream(), "{},{},{},{},{},{}\n", num(t), num(d.real()), num(d.imag()), num(r.real()),
                   num(r.imag()), num(rel));
    }
    return {{table.path(), corr.path()},
            {{"modes", bath.size()}, {"max_rel_error", worst}, {"t_valid_1e-3", left ? t_valid : ts.back()}}};
}

RunResult cmd_tls(Config& cfg, const RunContext& ctx) {
    const auto sd = spectral_density(cfg, "tls", "ohmic_rc_filtered");
    const auto n = mode_count(cfg, "tls");
    const double omega0 = cfg.number("tls", "omega0", 1.0);
    tlssim::EvolveOptions eo;
    eo.dt_sample = cfg.number("tls", "dt", 0.1);
    eo.rel_tol = cfg.number("tls", "rel_tol", 1e-9);
    eo.abs_tol = cfg.number("tls", "abs_tol", 1e-12);
    const double t_final = cfg.number("tls", "t_final", 100.0);

    const bool decay_on = cfg.integer("decay", "enabled", 1) != 0;
    const double A = cfg.number("decay", "A", 0.5);
    tlssim::FitOptions fo;
    fo.t_start = cfg.number("decay", "fit_t_start", 2.0);
    fo.t_end = cfg.number("decay", "fit_t_end", 30.0);
    fo.max_residual = cfg.number("decay", "fit_max_residual", 0.05);

    const bool inversion_on = cfg.integer("inversion", "enabled", 1) != 0;
    const double lambda = cfg.number("inversion", "lambda", 0.5);
    const auto mu_list = cfg.numbers("inversion", "mu_list", {0.9, 1.0, 1.1});
    cfg.reject_unused();
    if (!(t_final > 0.0)) throw ConfigError("[tls] t_final must be > 0");

    const auto bath = bathdisc::discretize(n, sd);
    RunResult res;
    res.summary = {{"modes", bath.size()}};
    if (decay_on) {
        const tlssim::Generator gen(bath, {omega0, A, 0.0, 0.0});
        const auto tr = tlssim::evolve(gen.initial_state(tlssim::Spin::up), gen, t_final, eo);
        OutputFile f(ctx, "tls_decay.csv", "tls", tls_units, cfg);
        tlssim::write_csv(f.stream(), tr);
        res.files.push_back(f.path());
        json fit;
        try {
            const auto d = tlssim::fit_decay(tr, fo);
            fit = {{"rate", d.rate}, {"lifetime", 1.0 / d.rate}, {"uncertainty", d.uncertainty},
                   {"max_residual", d.max_residual}, {"points", d.points}};
        } catch (const Error& e) {
            fit = {{"error", {{"kind", e.kind()}, {"message", e.what()}}}};
        }
        res.summary["decay"] = {{"final_sigma_z", tr.back().sigma_z}, {"fit", fit}};
    }
    if (inversion_on) {
        const auto runs = tlssim::inversion_experiment(bath, lambda, mu_list, t_final, omega0, eo, thread_count(ctx.threads));
        json inv = json::array();
        for (const auto& r : runs) {
            OutputFile f(ctx, fmt::format("tls_inversion_mu_{}.csv", num(r.mu_drive)), "tls", tls_units, cfg);
            tlssim::write_csv(f.stream(), r.trajectory);
            res.files.push_back(f.path());
            double peak = -1.0, quanta = 0.0;
            for (const auto& x : r.trajectory) {
                peak = std::max(peak, x.sigma_z);
                quanta = std::max(quanta, x.bath_quanta);
            }
            inv.push_back({{"mu", r.mu_drive}, {"final_sigma_z", r.trajectory.back().sigma_z},
                           {"max_sigma_z", peak}, {"max_bath_quanta", quanta}});
        }
        res.summary["inversion"] = inv;
    }
    return res;
}

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json error_json(const std::string& kind, const std::string& message, int code) {
    return {{"error", {{"kind", kind}, {"message", message}}}, {"exit_code", code}};
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"lightmu: photonic chemical potential toolkit", "lightmu"};
    app.set_version_flag("--version", LIGHTMU_VERSION);
    std::string config_path, out_dir = ".";
    unsigned threads = 0;
    std::optional<long> seed;
    app.add_option("--config", config_path, "run configuration (sectioned key = value)");
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "reserved; nothing is stochastic yet");
    app.require_subcommand(1);
    using Command = RunResult (*)(Config&, const RunContext&);
    const std::vector<std::tuple<std::string, std::string, Command>> table{
        {"sweep", "Mandel Q / coherence over a (mu, J) grid with lobe overlay", cmd_sweep},
        {"steady", "eigenstate populations at one lattice point", cmd_steady},
        {"tls", "two-level system decay and parametric inversion runs", cmd_tls},
        {"bath", "discrete bath table and correlation check", cmd_bath},
        {"lobes", "analytic Mott-lobe boundaries", cmd_lobes}};
    for (const auto& [name, help, fn] : table) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << error_json("usage", e.what(), exit_config).dump() << '\n';
        return exit_config;
    }

    const auto* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    RunContext ctx{out_dir, threads, seed};

    auto fail = [&](const std::string& kind, const std::string& message, int code) {
        const auto j = error_json(kind, message, code);
        err << j.dump() << '\n';
        std::error_code ec;
        if (fs::is_directory(ctx.out_dir, ec)) std::ofstream(ctx.out_dir / "error.json") << j.dump(2) << '\n';
        return code;
    };

    try {
        Config cfg = config_path.empty() ? Config{} : Config::from_file(config_path);
        fs::create_directories(ctx.out_dir);
        const auto started = utc_now();
        const auto t0 = std::chrono::steady_clock::now();
        Command fn = nullptr;
        for (const auto& [name, help, f] : table)
            if (name == command) fn = f;
        auto result = fn(cfg, ctx);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        json files = json::array();
        for (const auto& p : result.files) files.push_back(p.filename().string());
        json meta = {{"command", command},
                     {"version", LIGHTMU_VERSION},
                     {"config_origin", cfg.origin()},
                     {"config_raw", cfg.raw()},
                     {"effective_config", cfg.effective()},
                     {"threads", thread_count(threads)},
                     {"seed", seed ? json(*seed) : json(nullptr)},
                     {"started_utc", started},
                     {"wall_time_s", wall},
                     {"files", files},
                     {"summary", result.summary}};
        const auto meta_path = ctx.out_dir / (command + ".meta.json");
        std::ofstream(meta_path) << meta.dump(2) << '\n';
        fmt::print(out, "{}: wrote {} file(s) to {} in {:.2f} s\n", command, result.files.size() + 1,
                   ctx.out_dir.string(), wall);
        return exit_ok;
    } catch (const ConfigError& e) {
        return fail(e.kind(), e.what(), exit_config);
    } catch (const ArgumentError& e) {
        // Parameters only come from the config here.
        return fail(e.kind(), e.what(), exit_config);
    } catch (const Error& e) {
        return fail(e.kind(), e.what(), exit_numerical);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), exit_numerical);
    }
}

} // namespace lightmu::app
