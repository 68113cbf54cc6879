#include "sphkura/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sphkura/parallel.hpp"

namespace sphkura {

namespace {

void check_size(const SphereGraph& g, std::size_t len, const char* what)
{
    if (len != g.size()) {
        std::ostringstream msg;
        msg << what << ": state has " << len << " entries, graph has " << g.size() << " nodes";
        throw std::invalid_argument(msg.str());
    }
}

double node_energy(const SphereGraph& g, std::span<const double> u, std::size_t i)
{
    const auto nbrs = g.neighbors(i);
    const auto w = g.weights(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
        acc += w[k] * (1.0 - std::cos(u[nbrs[k]] - u[i]));
    }
    return acc;
}

TrajectorySample make_sample(const SphereGraph& g, double t, std::span<const double> u)
{
    return {t, energy(g, u), order_parameter(u), phase_diameter(u)};
}

}  // namespace

void rhs(const SphereGraph& g, std::span<const double> u, std::span<double> du, unsigned threads)
{
    check_size(g, u.size(), "rhs");
    check_size(g, du.size(), "rhs");
    const double scale = g.norm_factor();
    parallel_for(g.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto nbrs = g.neighbors(i);
            const auto w = g.weights(i);
            const double ui = u[i];
            double acc = 0.0;
            for (std::size_t k = 0; k < nbrs.size(); ++k) {
                acc += w[k] * std::sin(u[nbrs[k]] - ui);
            }
            du[i] = scale * acc;
        }
    });
}

std::vector<double> rhs(const SphereGraph& g, std::span<const double> u, unsigned threads)
{
    std::vector<double> du(u.size());
    rhs(g, u, du, threads);
    return du;
}

double energy(const SphereGraph& g, std::span<const double> u)
{
    check_size(g, u.size(), "energy");
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        total += node_energy(g, u, i);
    }
    return 0.5 * g.norm_factor() * total;
}

double grad_check(const SphereGraph& g, std::span<const double> u, double h)
{
    check_size(g, u.size(), "grad_check");
    const auto du = rhs(g, u, 1);
    std::vector<double> work(u.begin(), u.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double saved = work[i];
        work[i] = saved + h;
        const double up = energy(g, work);
        work[i] = saved - h;
        const double down = energy(g, work);
        work[i] = saved;
        const double grad = (up - down) / (2.0 * h);
        worst = std::max(worst, std::abs(du[i] + grad));
    }
    return worst;
}

double order_parameter(std::span<const double> u)
{
    if (u.empty()) {
        return 0.0;
    }
    double c = 0.0;
    double s = 0.0;
    for (double v : u) {
        c += std::cos(v);
        s += std::sin(v);
    }
    return std::min(1.0, std::hypot(c, s) / static_cast<double>(u.size()));
}

double phase_diameter(std::span<const double> u)
{
    if (u.empty()) {
        return 0.0;
    }
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    return *hi - *lo;
}

double default_time_step(const SphereGraph& g, std::span<const double> u0, unsigned threads)
{
    const auto du = rhs(g, u0, threads);
    double sup = 0.0;
    for (double v : du) {
        sup = std::max(sup, std::abs(v));
    }
    double dt = 0.1;
    if (sup > 0.0) {
        dt = std::min(dt, 0.1 / sup);
    }
    const double coupling = g.max_coupling();
    if (coupling > 0.0) {
        dt = std::min(dt, 1.25 / coupling);
    }
    return dt;
}

Trajectory integrate(const SphereGraph& g, const PhaseState& start, double t_end, const IntegrateOptions& options)
{
    check_size(g, start.u.size(), "integrate");
    const double span = t_end - start.t;
    if (!(span > 0.0) || !std::isfinite(span)) {
        throw std::invalid_argument("integrate: end time must exceed start time");
    }
    if (options.dt < 0.0 || !std::isfinite(options.dt)) {
        throw std::invalid_argument("integrate: dt must be positive");
    }
    const std::size_t sample_every = std::max<std::size_t>(1, options.sample_every);
    const unsigned threads = options.threads;

    const double dt_cap = options.dt > 0.0 ? options.dt : default_time_step(g, start.u, threads);
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt_cap - 1e-9)));
    const double dt = span / static_cast<double>(steps);

    const std::size_t n = g.size();
    std::vector<double> u = start.u;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    Trajectory traj;
    traj.dt = dt;

    auto record = [&](double t) {
        const auto sample = make_sample(g, t, u);
        traj.samples.push_back(sample);
        if (options.keep_states) {
            traj.states.push_back(u);
        }
        if (options.observer) {
            options.observer(t, u);
        }
        return sample;
    };
    record(start.t);

    for (std::size_t step = 1; step <= steps; ++step) {
        rhs(g, u, k1, threads);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
        rhs(g, tmp, k2, threads);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
        rhs(g, tmp, k3, threads);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
        rhs(g, tmp, k4, threads);
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            finite = finite && std::isfinite(u[i]);
        }
        const double t = step == steps ? t_end : start.t + static_cast<double>(step) * dt;
        if (!finite) {
            std::ostringstream msg;
            msg << "integrate: non-finite phase at t=" << t << " (dt=" << dt << ")";
            throw NumericalError(msg.str());
        }
        traj.steps = step;
        if (step % sample_every == 0 || step == steps) {
            const auto sample = record(t);
            if (options.stop_when && step != steps && options.stop_when(sample)) {
                traj.stopped_early = true;
                break;
            }
        }
    }
    return traj;
}

Trajectory integrate(const SphereGraph& g, std::span<const double> u0, double T, double dt,
                     std::size_t sample_every, unsigned threads)
{
    IntegrateOptions options;
    options.dt = dt;
    options.sample_every = sample_every;
    options.threads = threads;
    return integrate(g, PhaseState{0.0, {u0.begin(), u0.end()}}, T, options);
}

SyncReport detect_sync(bool connected, const Trajectory& traj, double sync_tol)
{
    SyncReport report;
    report.connected = connected;
    if (traj.samples.empty()) {
        throw std::invalid_argument("detect_sync: empty trajectory");
    }
    for (const auto& s : traj.samples) {
        if (!report.t_half_pi && s.diameter < std::numbers::pi / 2.0) {
            report.t_half_pi = s.t;
        }
        if (!report.t_sync && s.diameter < sync_tol) {
            report.t_sync = s.t;
            break;
        }
    }
    report.final_diameter = traj.samples.back().diameter;
    report.synchronized = connected && report.t_sync.has_value();
    return report;
}

SyncReport detect_sync(const SphereGraph& g, const Trajectory& traj, double sync_tol)
{
    return detect_sync(is_connected(g), traj, sync_tol);
}

}  // namespace sphkura
