#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sphkura/continuum.hpp"
#include "sphkura/dynamics.hpp"
#include "sphkura/errors.hpp"
#include "sphkura/graph.hpp"
#include "sphkura/harmonics.hpp"
#include "sphkura/kernel.hpp"

namespace sphkura {

enum class ExperimentKind { Generate, Simulate, Heat, OperatorTest, Scaling, Sync, Degrees, Solar, Constants };

std::string to_string(ExperimentKind kind);
/// Accepts the CLI subcommand names ("operator-test", ...). Throws ConfigError.
ExperimentKind parse_experiment_kind(std::string_view name);

/// Either an explicit list of eps values or eps(n) = c * n^(-1/3).
struct EpsRule {
    std::vector<double> values;
    double coefficient = 4.0;

    bool is_explicit() const noexcept { return !values.empty(); }
    std::vector<double> eps_for(std::size_t n) const;
    /// "auto", "auto:<c>" or a comma-separated list.
    static EpsRule parse(std::string_view text);
    std::string spec() const;
};

/// Initial phase field u0 on the sphere.
///
///   constant:<c>
///   z:<a>                      a * z
///   harmonic:<l>,<m>,<c>;...   sum of c * Y_lm with l <= 4
///   solar_time                 longitude in [0, 2pi)
///   iid_uniform                independent uniform phases in [0, 2pi)
class InitialCondition {
public:
    enum class Kind { Constant, Harmonic, SolarTime, IidUniform };

    static InitialCondition parse(std::string_view text);
    static InitialCondition constant(double c);
    static InitialCondition z(double amplitude);
    static InitialCondition harmonic(const HarmonicField& field);
    static InitialCondition solar_time();
    static InitialCondition iid_uniform();

    Kind kind() const noexcept { return kind_; }
    std::string spec() const;
    /// Constant and harmonic data are smooth and fall under the scaling-limit
    /// hypotheses; the other kinds are exploration modes.
    bool smooth() const noexcept { return kind_ == Kind::Constant || kind_ == Kind::Harmonic; }
    /// Harmonic coefficients (degree <= 4); only valid when smooth().
    const HarmonicField& field() const;

    /// Phases at the cloud points; `seed` is used by iid_uniform only.
    std::vector<double> sample(const PointCloud& cloud, std::uint64_t seed) const;
    double operator()(const UnitVec3& p) const;

private:
    Kind kind_ = Kind::Constant;
    HarmonicField field_;
    std::string text_;
};

inline constexpr int kMaxInitialDegree = 4;

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Simulate;
    std::vector<std::size_t> n_values{2000};
    EpsRule eps;
    Kernel kernel = Kernel::indicator();
    InitialCondition ic = InitialCondition::z(0.3);
    double T = 1.0;
    std::optional<double> dt;  ///< absent: solver default
    std::uint64_t seed = 1;
    std::size_t replicates = 1;
    std::string out_dir;
    std::size_t grid_theta = 64;
    std::size_t grid_phi = 128;
    int max_degree = 16;
    unsigned threads = 0;
    double sync_tol = kDefaultSyncTolerance;
    double extend_factor = 10.0;
    std::size_t sample_every = 1;
    std::size_t snapshots = 5;

    /// Defaults appropriate to each experiment.
    static ExperimentConfig defaults(ExperimentKind kind);

    /// Throws ConfigError with a distinct message per violated rule.
    void validate() const;

    /// Canonical key=value text of every field that can change an output
    /// (out_dir and threads are excluded).
    std::string canonical() const;
    /// FNV-1a 64 of canonical(), as 16 hex digits.
    std::string hash() const;
};

/// Applies `key = value` lines (# comments, blank lines allowed) on top of
/// `base`. Unknown keys and malformed values throw ConfigError.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base);
/// Sets one key; shared by the config file and the CLI overrides.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// splitmix64-based seed for run (n_index, eps_index, replicate).
std::uint64_t derive_seed(std::uint64_t master, std::size_t n_index, std::size_t eps_index, std::size_t replicate);

/// Stable identifier used in file names: n<n>_e<eps_index>_r<replicate>.
std::string run_id(std::size_t n, std::size_t eps_index, std::size_t replicate);

/// eps^2 n / log n, the quantity that must diverge in the scaling regime.
double regime_indicator(std::size_t n, double eps);

struct RunKey {
    std::string id;
    std::size_t n = 0;
    double eps = 0.0;
    std::size_t eps_index = 0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
};

struct ScalingRecord {
    RunKey key;
    double mean_degree = 0.0;
    bool connected = false;
    double sup_error = 0.0;
    double final_error = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
    std::vector<TrajectorySample> samples;
    std::vector<double> sample_errors;
    double wall_seconds = 0.0;
};

struct SyncRecord {
    RunKey key;
    double mean_degree = 0.0;
    SyncReport report;
    double t_end = 0.0;
    bool extended = false;
    std::vector<TrajectorySample> samples;
    double wall_seconds = 0.0;
};

struct SyncSummary {
    std::size_t n = 0;
    double eps = 0.0;
    std::size_t runs = 0;
    std::size_t synchronized = 0;
    /// Synchronized runs whose pi/2 crossing precedes t_sync on a connected graph.
    std::size_t consistent = 0;
    double fraction() const noexcept { return runs == 0 ? 0.0 : static_cast<double>(synchronized) / runs; }
};

struct DegreeRecord {
    RunKey key;
    DegreeStats stats;
    double outside_025 = 0.0;
    double outside_050 = 0.0;
    double bound_025 = 0.0;
    double bound_050 = 0.0;
    bool connected = false;
    std::size_t components = 0;
    double wall_seconds = 0.0;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> phases;
};

struct SimulationRecord {
    RunKey key;
    double mean_degree = 0.0;
    double initial_order = 0.0;
    double final_order = 0.0;
    double initial_diameter = 0.0;
    SyncReport report;
    std::vector<TrajectorySample> samples;
    std::vector<Snapshot> snapshots;
    PointCloud cloud;
    double wall_seconds = 0.0;
};

struct HeatRecord {
    double eps = 0.0;
    double sup_gap_sine = 0.0;
    double sup_gap_identity = 0.0;
    double sine_identity_gap = 0.0;
    double wall_seconds = 0.0;
};

struct HeatResult {
    double diffusivity = 0.0;
    double mean = 0.0;
    GridField initial;
    GridField final_heat;
    std::vector<HeatRecord> rows;
};

struct ScalingResult {
    std::vector<ScalingRecord> runs;
    /// Median sup error per n, in the order of cfg.n_values.
    std::vector<std::pair<std::size_t, double>> medians;
};

struct SyncResult {
    std::vector<SyncRecord> runs;
    std::vector<SyncSummary> summary;
};

struct GeneratedGraph {
    RunKey key;
    SphereGraph graph;
};

/// One graph per (n, eps, replicate).
std::vector<GeneratedGraph> run_generate(const ExperimentConfig& cfg);
ScalingResult run_scaling_limit(const ExperimentConfig& cfg);
SyncResult run_sync_probability(const ExperimentConfig& cfg);
std::vector<DegreeRecord> run_degree_connectivity(const ExperimentConfig& cfg);
SimulationRecord run_solar_time(const ExperimentConfig& cfg);
/// Single Kuramoto run of cfg.ic on the first (n, eps) with snapshots.
SimulationRecord run_simulation(const ExperimentConfig& cfg);
/// Heat oracle of cfg.ic on the grid, plus the integral-equation gap to it
/// for each explicit eps.
HeatResult run_heat(const ExperimentConfig& cfg);
/// Operator convergence of cfg.ic's harmonic field over the explicit eps list
/// at 50 uniform sample points drawn from cfg.seed.
OperatorConvergenceReport run_operator_test(const ExperimentConfig& cfg);

/// Assigns real-valued lifts to circle-valued phases: within each connected
/// component, a BFS tree from the lowest index carries differences mapped
/// into (-pi, pi].
std::vector<double> unwrap_phases(const SphereGraph& g, std::span<const double> wrapped);

double median(std::vector<double> values);

}  // namespace sphkura
