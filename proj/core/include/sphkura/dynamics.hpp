#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphkura/errors.hpp"
#include "sphkura/graph.hpp"

namespace sphkura {

/// Oscillator phases at time t, kept as real-valued lifts (never wrapped).
struct PhaseState {
    double t = 0.0;
    std::vector<double> u;
};

struct TrajectorySample {
    double t = 0.0;
    double energy = 0.0;
    double order_parameter = 0.0;
    double diameter = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    /// Phase vectors at each sample; empty when states were not kept.
    std::vector<std::vector<double>> states;
    double dt = 0.0;
    std::size_t steps = 0;
    bool stopped_early = false;

    const TrajectorySample& back() const { return samples.back(); }
};

/// du_i = norm_factor * sum_j w_ij sin(u_j - u_i), summed in ascending j.
void rhs(const SphereGraph& g, std::span<const double> u, std::span<double> du, unsigned threads = 0);
std::vector<double> rhs(const SphereGraph& g, std::span<const double> u, unsigned threads = 0);

/// 1/2 sum_{i,j} a_ij (1 - cos(u_j - u_i)) with a_ij = norm_factor * w_ij.
double energy(const SphereGraph& g, std::span<const double> u);

/// max_i |rhs_i + dE/du_i| using central differences of step h.
double grad_check(const SphereGraph& g, std::span<const double> u, double h = 1e-6);

/// |mean of exp(i u_j)|.
double order_parameter(std::span<const double> u);

/// max(u) - min(u).
double phase_diameter(std::span<const double> u);

/// min(0.1, 0.1 / |rhs(u0)|_inf, 1.25 / max_coupling). The last term keeps
/// classical RK4 inside its real-axis stability interval on dense graphs.
double default_time_step(const SphereGraph& g, std::span<const double> u0, unsigned threads = 0);

struct IntegrateOptions {
    /// Fixed step; 0 selects default_time_step. The step is then shrunk so an
    /// integer number of steps lands exactly on the end time.
    double dt = 0.0;
    std::size_t sample_every = 1;
    bool keep_states = true;
    unsigned threads = 0;
    /// Called at every sample with (t, u).
    std::function<void(double, std::span<const double>)> observer;
    /// Checked at every sample after t0; returning true ends the run there.
    std::function<bool(const TrajectorySample&)> stop_when;
};

/// Classical fixed-step RK4 from `start` to `t_end`. Samples always include
/// the start and the final time. Throws NumericalError on a non-finite state
/// and std::invalid_argument on bad sizes or times.
Trajectory integrate(const SphereGraph& g, const PhaseState& start, double t_end,
                     const IntegrateOptions& options = {});

/// Convenience overload starting at t = 0.
Trajectory integrate(const SphereGraph& g, std::span<const double> u0, double T, double dt,
                     std::size_t sample_every, unsigned threads = 0);

struct SyncReport {
    std::optional<double> t_half_pi;
    std::optional<double> t_sync;
    double final_diameter = 0.0;
    bool connected = false;
    bool synchronized = false;
};

inline constexpr double kDefaultSyncTolerance = 1e-3;

/// Scans samples for the first diameter below pi/2 and below sync_tol.
/// synchronized = connected && t_sync present. Never integrates.
SyncReport detect_sync(const SphereGraph& g, const Trajectory& traj, double sync_tol = kDefaultSyncTolerance);
SyncReport detect_sync(bool connected, const Trajectory& traj, double sync_tol = kDefaultSyncTolerance);

}  // namespace sphkura
