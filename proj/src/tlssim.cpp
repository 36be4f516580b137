#include "lightmu/tlssim.hpp"

#include "lightmu/error.hpp"

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

namespace lightmu::tlssim {

void DriveParams::validate() const {
    if (!(omega0 > 0.0)) throw ArgumentError("DriveParams: omega0 must be > 0");
    if (!(A >= 0.0) || !(lambda >= 0.0)) throw ArgumentError("DriveParams: A and lambda must be >= 0");
    if (!std::isfinite(mu_drive)) throw ArgumentError("DriveParams: mu_drive must be finite");
}

TlsBasis::TlsBasis(std::size_t n_modes) : n_(n_modes) {
    if (n_modes == 0) throw ArgumentError("TlsBasis: bath has no modes");
}

std::size_t TlsBasis::single(std::size_t j) const {
    if (j >= n_) throw IndexError(fmt::format("TlsBasis: mode {} out of range", j));
    return 1 + j;
}

std::size_t TlsBasis::pair(std::size_t j, std::size_t k) const {
    if (j > k) std::swap(j, k);
    if (k >= n_) throw IndexError(fmt::format("TlsBasis: mode {} out of range", k));
    // Row j holds the N - j pairs (j, k >= j).
    const std::size_t row = j * n_ - (j * (j > 0 ? j - 1 : 0)) / 2;
    return 1 + n_ + row + (k - j);
}

int TlsBasis::quanta(std::size_t config) const noexcept {
    if (config == 0) return 0;
    return config <= n_ ? 1 : 2;
}

Generator::Generator(const bathdisc::DiscreteBath& bath, const DriveParams& drive)
    : basis_(bath.size()), drive_(drive) {
    drive.validate();
    const std::size_t n = bath.size();
    std::vector<double> bath_energy(basis_.n_configs(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& mj = bath.modes[j];
        const std::size_t s = basis_.single(j);
        bath_energy[s] = mj.omega;
        links_.push_back({0, s, mj.g});
        for (std::size_t k = j; k < n; ++k) {
            const auto p = basis_.pair(j, k);
            bath_energy[p] = mj.omega + bath.modes[k].omega;
            if (k == j) {
                links_.push_back({s, p, std::sqrt(2.0) * mj.g});
            } else {
                // |j,k> is reached from |j> via b_k^+ and from |k> via b_j^+.
                links_.push_back({s, p, bath.modes[k].g});
                links_.push_back({basis_.single(k), p, mj.g});
            }
        }
    }
    diag_.resize(basis_.dimension());
    for (std::size_t c = 0; c < basis_.n_configs(); ++c) {
        diag_[TlsBasis::index(c, Spin::down)] = bath_energy[c] - 0.5 * drive.omega0;
        diag_[TlsBasis::index(c, Spin::up)] = bath_energy[c] + 0.5 * drive.omega0;
    }
}

double Generator::coupling(double t) const { return drive_.A + drive_.lambda * std::cos(drive_.mu_drive * t); }

std::vector<std::vector<cplx>> Generator::hamiltonian(double t) const {
    const std::size_t dim = dimension();
    std::vector<std::vector<cplx>> h(dim, std::vector<cplx>(dim));
    for (std::size_t i = 0; i < dim; ++i) h[i][i] = diag_[i];
    const double c = coupling(t);
    for (const auto& l : links_) {
        for (Spin s : {Spin::down, Spin::up}) {
            const Spin f = s == Spin::down ? Spin::up : Spin::down;
            const auto a = TlsBasis::index(l.lo, s), b = TlsBasis::index(l.hi, f);
            h[b][a] += c * l.x;
            h[a][b] += c * l.x;
        }
    }
    return h;
}

void Generator::apply(double t, const StateVector& psi, StateVector& out) const {
    const cplx minus_i(0.0, -1.0);
    for (std::size_t i = 0; i < psi.size(); ++i) out[i] = minus_i * diag_[i] * psi[i];
    const cplx cx = minus_i * coupling(t);
    for (const auto& l : links_) {
        const std::size_t lo = 2 * l.lo, hi = 2 * l.hi;
        const cplx v = cx * l.x;
        // sigma_x swaps the spin label.
        out[hi + 1] += v * psi[lo];
        out[hi] += v * psi[lo + 1];
        out[lo + 1] += v * psi[hi];
        out[lo] += v * psi[hi + 1];
    }
}

StateVector Generator::initial_state(Spin s) const {
    StateVector psi(dimension());
    psi[TlsBasis::index(basis_.vacuum(), s)] = 1.0;
    return psi;
}

namespace {

Sample measure(double t, const StateVector& psi, const TlsBasis& basis) {
    double up = 0.0, down = 0.0, quanta = 0.0;
    for (std::size_t c = 0; c < basis.n_configs(); ++c) {
        const double pd = std::norm(psi[2 * c]), pu = std::norm(psi[2 * c + 1]);
        down += pd;
        up += pu;
        quanta += basis.quanta(c) * (pd + pu);
    }
    const double norm = up + down;
    return {t, (up - down) / norm, quanta / norm, std::abs(norm - 1.0)};
}

} // namespace

Trajectory evolve(const StateVector& psi0, const Generator& gen, double t_final, const EvolveOptions& opt) {
    namespace odeint = boost::numeric::odeint;
    if (psi0.size() != gen.dimension()) throw ArgumentError("evolve: state dimension mismatch");
    if (!(t_final > 0.0)) throw ArgumentError("evolve: t_final must be > 0");
    if (!(opt.dt_sample > 0.0)) throw ArgumentError("evolve: dt_sample must be > 0");
    double n0 = 0.0;
    for (const auto& a : psi0) n0 += std::norm(a);
    if (std::abs(n0 - 1.0) > 1e-12) throw ArgumentError("evolve: initial state is not normalized");

    std::vector<double> times;
    const auto steps = std::size_t(std::ceil(t_final / opt.dt_sample - 1e-9));
    for (std::size_t i = 0; i < steps; ++i) times.push_back(double(i) * opt.dt_sample);
    times.push_back(t_final);

    Trajectory traj;
    traj.reserve(times.size());
    StateVector psi = psi0;
    auto rhs = [&gen](const StateVector& x, StateVector& dx, double t) { gen.apply(t, x, dx); };
    auto observe = [&](const StateVector& x, double t) { traj.push_back(measure(t, x, gen.basis())); };
    auto stepper = odeint::make_dense_output(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<StateVector>());
    try {
        odeint::integrate_times(stepper, rhs, psi, times.begin(), times.end(), 0.01, observe);
    } catch (const std::exception& e) {
        throw IntegrationError(fmt::format("evolve: stepper failed at t <= {}: {}",
                                           traj.empty() ? 0.0 : traj.back().t, e.what()));
    }
    const double drift = traj.back().norm_drift;
    if (!(drift <= opt.max_norm_drift)) {
        throw IntegrationError(fmt::format("evolve: norm drift {:.3g} exceeds {:.3g} at t = {}", drift,
                                           opt.max_norm_drift, t_final));
    }
    return traj;
}

DecayFit fit_decay(const Trajectory& traj, const FitOptions& opt) {
    if (!(opt.t_end > opt.t_start)) throw ArgumentError("fit_decay: empty window");
    std::vector<double> ts, ys;
    for (const auto& s : traj) {
        if (s.t < opt.t_start || s.t > opt.t_end) continue;
        const double p = 0.5 * (1.0 + s.sigma_z);
        if (!(p > 0.0)) {
            throw FitQualityError(fmt::format("fit_decay: excited population {} at t = {}", p, s.t));
        }
        ts.push_back(s.t);
        ys.push_back(std::log(p));
    }
    const std::size_t n = ts.size();
    if (n < 3) throw ArgumentError(fmt::format("fit_decay: {} points in the window", n));

    double tm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tm += ts[i];
        ym += ys[i];
    }
    tm /= double(n);
    ym /= double(n);
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        stt += (ts[i] - tm) * (ts[i] - tm);
        sty += (ts[i] - tm) * (ys[i] - ym);
    }
    const double slope = sty / stt, icpt = ym - slope * tm;
    double ssr = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (icpt + slope * ts[i]);
        ssr += r * r;
        worst = std::max(worst, std::abs(std::expm1(r)));
    }
    DecayFit fit{-slope, std::sqrt(ssr / double(n - 2) / stt), worst, std::exp(icpt), n};

    const double span = ts.back() - ts.front();
    if (!(fit.rate * span >= 1.0)) {
        throw FitQualityError(fmt::format(
            "fit_decay: window [{}, {}] covers {:.3g} decay times (rate {:.3g}); need at least one", ts.front(),
            ts.back(), fit.rate * span, fit.rate));
    }
    if (fit.max_residual > opt.max_residual) {
        throw FitQualityError(fmt::format("fit_decay: max relative residual {:.3g} exceeds {:.3g}",
                                          fit.max_residual, opt.max_residual));
    }
    return fit;
}

std::vector<InversionRun> inversion_experiment(const bathdisc::DiscreteBath& bath, double lambda,
                                               const std::vector<double>& mu_list, double t_final, double omega0,
                                               const EvolveOptions& opt, unsigned threads) {
    std::vector<InversionRun> out(mu_list.size());
    std::vector<std::exception_ptr> errors(mu_list.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < mu_list.size();) {
            try {
                const Generator gen(bath, DriveParams{omega0, 0.0, lambda, mu_list[i]});
                out[i] = {mu_list[i], evolve(gen.initial_state(Spin::down), gen, t_final, opt)};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = unsigned(std::min<std::size_t>(threads, std::max<std::size_t>(mu_list.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
    fmt::print(os, "t,sigma_z,bath_quanta,norm_drift\n");
    for (const auto& s : traj) fmt::print(os, "{:.6f},{:.12e},{:.12e},{:.3e}\n", s.t, s.sigma_z, s.bath_quanta, s.norm_drift);
}

} // namespace lightmu::tlssim
