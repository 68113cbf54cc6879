#include "sphkura/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <sstream>

namespace sphkura {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value)
{
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
}

double parse_real(std::string_view text, std::string_view key)
{
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v)) {
        bad_value(key, text);
    }
    return v;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view key)
{
    text = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        bad_value(key, text);
    }
    return v;
}

long parse_signed(std::string_view text, std::string_view key)
{
    text = trim(text);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        bad_value(key, text);
    }
    return v;
}

std::string real_text(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct RunPlan {
    RunKey key;
    std::size_t n_index = 0;
};

std::vector<RunPlan> plan_runs(const ExperimentConfig& cfg)
{
    std::vector<RunPlan> plan;
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
        const std::size_t n = cfg.n_values[ni];
        const auto eps_list = cfg.eps.eps_for(n);
        for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
            for (std::size_t r = 0; r < cfg.replicates; ++r) {
                RunKey key{run_id(n, ei, r), n, eps_list[ei], ei, r, derive_seed(cfg.seed, ni, ei, r)};
                plan.push_back({key, ni});
            }
        }
    }
    return plan;
}

/// Harmonic values of degree <= L at every cloud point, row-major.
std::vector<double> harmonic_table(const PointCloud& cloud, int max_degree)
{
    const std::size_t stride = harmonic_count(max_degree);
    std::vector<double> table(cloud.size() * stride);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        real_spherical_harmonics(max_degree, cloud.points[i], std::span<double>(table.data() + i * stride, stride));
    }
    return table;
}

IntegrateOptions base_options(const ExperimentConfig& cfg)
{
    IntegrateOptions options;
    options.dt = cfg.dt.value_or(0.0);
    options.sample_every = cfg.sample_every;
    options.keep_states = false;
    options.threads = cfg.threads;
    return options;
}

/// Integrates in segments that end on the snapshot times, recording the
/// phases at each one.
SimulationRecord simulate_with_snapshots(const ExperimentConfig& cfg, const RunKey& key, PointCloud cloud,
                                         const SphereGraph& g, std::vector<double> u0)
{
    const auto start = std::chrono::steady_clock::now();
    SimulationRecord rec;
    rec.key = key;
    rec.mean_degree = degree_stats(g).mean;
    rec.initial_order = order_parameter(u0);
    rec.initial_diameter = phase_diameter(u0);

    IntegrateOptions options = base_options(cfg);
    options.dt = cfg.dt.value_or(default_time_step(g, u0, cfg.threads));
    std::vector<double> u = u0;
    options.observer = [&u](double, std::span<const double> state) { u.assign(state.begin(), state.end()); };

    rec.snapshots.push_back({0.0, u0});
    Trajectory merged;
    const std::size_t segments = cfg.snapshots - 1;
    double t = 0.0;
    for (std::size_t s = 1; s <= segments; ++s) {
        const double t_next = s == segments ? cfg.T : cfg.T * static_cast<double>(s) / static_cast<double>(segments);
        auto part = integrate(g, PhaseState{t, u}, t_next, options);
        const std::size_t skip = merged.samples.empty() ? 0 : 1;
        merged.samples.insert(merged.samples.end(), part.samples.begin() + static_cast<std::ptrdiff_t>(skip),
                              part.samples.end());
        merged.steps += part.steps;
        merged.dt = part.dt;
        rec.snapshots.push_back({t_next, u});
        t = t_next;
    }
    rec.final_order = order_parameter(u);
    rec.report = detect_sync(is_connected(g), merged, cfg.sync_tol);
    rec.samples = std::move(merged.samples);
    rec.cloud = std::move(cloud);
    rec.wall_seconds = seconds_since(start);
    return rec;
}

void require_smooth(const ExperimentConfig& cfg, const char* what)
{
    if (!cfg.ic.smooth()) {
        throw ConfigError(std::string(what) + " needs a smooth initial condition (constant, z or harmonic), got " +
                          cfg.ic.spec());
    }
}

}  // namespace

// --- names ------------------------------------------------------------------

std::string to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::Generate: return "generate";
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::Heat: return "heat";
    case ExperimentKind::OperatorTest: return "operator-test";
    case ExperimentKind::Scaling: return "scaling";
    case ExperimentKind::Sync: return "sync";
    case ExperimentKind::Degrees: return "degrees";
    case ExperimentKind::Solar: return "solar";
    case ExperimentKind::Constants: return "constants";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name)
{
    for (auto kind : {ExperimentKind::Generate, ExperimentKind::Simulate, ExperimentKind::Heat,
                      ExperimentKind::OperatorTest, ExperimentKind::Scaling, ExperimentKind::Sync,
                      ExperimentKind::Degrees, ExperimentKind::Solar, ExperimentKind::Constants}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

// --- eps rule ---------------------------------------------------------------

std::vector<double> EpsRule::eps_for(std::size_t n) const
{
    if (is_explicit()) {
        return values;
    }
    return {coefficient * std::cbrt(1.0 / static_cast<double>(std::max<std::size_t>(n, 1)))};
}

EpsRule EpsRule::parse(std::string_view text)
{
    text = trim(text);
    EpsRule rule;
    if (text == "auto") {
        return rule;
    }
    if (text.starts_with("auto:")) {
        rule.coefficient = parse_real(text.substr(5), "eps");
        return rule;
    }
    for (auto part : split(text, ',')) {
        rule.values.push_back(parse_real(part, "eps"));
    }
    return rule;
}

std::string EpsRule::spec() const
{
    if (!is_explicit()) {
        return "auto:" + real_text(coefficient);
    }
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? "," : "") + real_text(values[i]);
    }
    return out;
}

// --- initial conditions -------------------------------------------------------

InitialCondition InitialCondition::constant(double c)
{
    InitialCondition ic;
    ic.kind_ = Kind::Constant;
    ic.field_ = HarmonicField(kMaxInitialDegree);
    ic.field_(0, 0) = c * std::sqrt(4.0 * std::numbers::pi);
    ic.text_ = "constant:" + real_text(c);
    return ic;
}

InitialCondition InitialCondition::z(double amplitude)
{
    InitialCondition ic;
    ic.kind_ = Kind::Harmonic;
    ic.field_ = HarmonicField(kMaxInitialDegree);
    ic.field_(1, 0) = amplitude * std::sqrt(4.0 * std::numbers::pi / 3.0);
    ic.text_ = "z:" + real_text(amplitude);
    return ic;
}

InitialCondition InitialCondition::harmonic(const HarmonicField& field)
{
    if (field.max_degree > kMaxInitialDegree) {
        for (int l = kMaxInitialDegree + 1; l <= field.max_degree; ++l) {
            for (int m = -l; m <= l; ++m) {
                if (field(l, m) != 0.0) {
                    throw ConfigError("harmonic initial condition limited to degree 4");
                }
            }
        }
    }
    InitialCondition ic;
    ic.kind_ = Kind::Harmonic;
    ic.field_ = HarmonicField(kMaxInitialDegree);
    std::string terms;
    for (int l = 0; l <= std::min(field.max_degree, kMaxInitialDegree); ++l) {
        for (int m = -l; m <= l; ++m) {
            const double c = field(l, m);
            ic.field_(l, m) = c;
            if (c != 0.0) {
                terms += (terms.empty() ? "" : ";") + std::to_string(l) + "," + std::to_string(m) + "," + real_text(c);
            }
        }
    }
    ic.text_ = "harmonic:" + (terms.empty() ? std::string("0,0,0") : terms);
    return ic;
}

InitialCondition InitialCondition::solar_time()
{
    InitialCondition ic;
    ic.kind_ = Kind::SolarTime;
    ic.text_ = "solar_time";
    return ic;
}

InitialCondition InitialCondition::iid_uniform()
{
    InitialCondition ic;
    ic.kind_ = Kind::IidUniform;
    ic.text_ = "iid_uniform";
    return ic;
}

InitialCondition InitialCondition::parse(std::string_view text)
{
    text = trim(text);
    if (text == "solar_time") {
        return solar_time();
    }
    if (text == "iid_uniform") {
        return iid_uniform();
    }
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        bad_value("ic", text);
    }
    const auto head = text.substr(0, colon);
    const auto body = text.substr(colon + 1);
    if (head == "constant") {
        return constant(parse_real(body, "ic"));
    }
    if (head == "z") {
        return z(parse_real(body, "ic"));
    }
    if (head == "harmonic") {
        HarmonicField field(kMaxInitialDegree);
        for (auto term : split(body, ';')) {
            const auto parts = split(term, ',');
            if (parts.size() != 3) {
                bad_value("ic", text);
            }
            const long l = parse_signed(parts[0], "ic");
            const long m = parse_signed(parts[1], "ic");
            if (l < 0 || l > kMaxInitialDegree || std::labs(m) > l) {
                throw ConfigError("harmonic initial condition needs 0 <= l <= 4 and |m| <= l, got '" +
                                  std::string(term) + "'");
            }
            field(static_cast<int>(l), static_cast<int>(m)) += parse_real(parts[2], "ic");
        }
        return harmonic(field);
    }
    bad_value("ic", text);
}

std::string InitialCondition::spec() const { return text_; }

const HarmonicField& InitialCondition::field() const
{
    if (!smooth()) {
        throw std::logic_error("InitialCondition::field: " + text_ + " has no harmonic expansion");
    }
    return field_;
}

double InitialCondition::operator()(const UnitVec3& p) const
{
    switch (kind_) {
    case Kind::Constant:
    case Kind::Harmonic: return field_.evaluate(p);
    case Kind::SolarTime: return p.phi();
    case Kind::IidUniform: break;
    }
    throw std::logic_error("InitialCondition: iid_uniform is not a function of position");
}

std::vector<double> InitialCondition::sample(const PointCloud& cloud, std::uint64_t seed) const
{
    std::vector<double> u(cloud.size());
    if (kind_ == Kind::IidUniform) {
        std::mt19937_64 rng(splitmix64(seed ^ 0x5851F42D4C957F2DULL));
        std::uniform_real_distribution<double> phase(0.0, kTwoPi);
        for (auto& v : u) {
            v = phase(rng);
        }
        return u;
    }
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        u[i] = (*this)(cloud.points[i]);
    }
    return u;
}

// --- configuration -----------------------------------------------------------

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind)
{
    ExperimentConfig cfg;
    cfg.kind = kind;
    switch (kind) {
    case ExperimentKind::Generate:
    case ExperimentKind::Constants:
        break;
    case ExperimentKind::Simulate:
        cfg.eps = EpsRule{{0.3}};
        cfg.T = 10.0;
        break;
    case ExperimentKind::Heat:
        cfg.eps = EpsRule{{0.08, 0.02}};
        break;
    case ExperimentKind::OperatorTest:
        cfg.eps = EpsRule{{0.08, 0.04, 0.02, 0.01}};
        cfg.ic = InitialCondition::parse("harmonic:1,0,1");
        break;
    case ExperimentKind::Scaling:
        cfg.n_values = {2000, 8000, 32000};
        cfg.replicates = 3;
        break;
    case ExperimentKind::Sync:
        cfg.eps = EpsRule{{0.3}};
        cfg.T = 50.0;
        cfg.replicates = 10;
        break;
    case ExperimentKind::Degrees:
        cfg.n_values = {10000};
        cfg.eps = EpsRule{{0.1}};
        cfg.replicates = 10;
        break;
    case ExperimentKind::Solar:
        cfg.eps = EpsRule{{0.3}};
        cfg.T = 20.0;
        cfg.ic = InitialCondition::solar_time();
        break;
    }
    return cfg;
}

void ExperimentConfig::validate() const
{
    if (n_values.empty()) {
        throw ConfigError("n: at least one value is required");
    }
    for (auto n : n_values) {
        if (n < 1) {
            throw ConfigError("n: every value must be at least 1");
        }
        if (n > std::numeric_limits<std::uint32_t>::max()) {
            throw ConfigError("n: value too large");
        }
    }
    if (eps.is_explicit()) {
        for (double e : eps.values) {
            if (!(e > 0.0)) {
                throw ConfigError("eps must be positive, got " + real_text(e));
            }
            if (e >= 4.0) {
                throw ConfigError("eps must be below 4 (the sphere diameter squared), got " + real_text(e));
            }
        }
    } else {
        if (!(eps.coefficient > 0.0)) {
            throw ConfigError("eps rule coefficient must be positive, got " + real_text(eps.coefficient));
        }
        for (auto n : n_values) {
            if (eps.eps_for(n).front() >= 4.0) {
                throw ConfigError("eps rule gives eps >= 4 at n=" + std::to_string(n));
            }
        }
    }
    if (!(T > 0.0)) {
        throw ConfigError("T must be positive, got " + real_text(T));
    }
    if (dt && !(*dt > 0.0)) {
        throw ConfigError("dt must be positive, got " + real_text(*dt));
    }
    if (grid_theta < 2 || grid_phi < 4) {
        throw ConfigError("grid must have at least 2 rings and 4 columns");
    }
    if (max_degree < 0) {
        throw ConfigError("L must be non-negative");
    }
    const QuadratureGrid probe(grid_theta, grid_phi);
    if (max_degree > probe.max_resolved_degree()) {
        throw ConfigError("L=" + std::to_string(max_degree) + " exceeds the resolution of the " +
                          std::to_string(grid_theta) + "x" + std::to_string(grid_phi) + " grid (max L=" +
                          std::to_string(probe.max_resolved_degree()) + ")");
    }
    if (replicates < 1) {
        throw ConfigError("replicates must be at least 1");
    }
    if (!(sync_tol > 0.0)) {
        throw ConfigError("sync_tol must be positive");
    }
    if (!(extend_factor >= 1.0)) {
        throw ConfigError("extend_factor must be at least 1");
    }
    if (sample_every < 1) {
        throw ConfigError("sample_every must be at least 1");
    }
    if (snapshots < 2) {
        throw ConfigError("snapshots must be at least 2");
    }
    switch (kind) {
    case ExperimentKind::Scaling:
        require_smooth(*this, "scaling");
        break;
    case ExperimentKind::Heat:
        require_smooth(*this, "heat");
        if (max_degree < kMaxInitialDegree) {
            throw ConfigError("heat needs L >= 4 to represent the initial condition");
        }
        break;
    case ExperimentKind::OperatorTest:
        require_smooth(*this, "operator-test");
        if (!eps.is_explicit()) {
            throw ConfigError("operator-test needs an explicit eps list");
        }
        break;
    default:
        break;
    }
}

std::string ExperimentConfig::canonical() const
{
    std::ostringstream out;
    out << "experiment=" << to_string(kind) << "\n";
    out << "n=";
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        out << (i ? "," : "") << n_values[i];
    }
    out << "\n";
    out << "eps=" << eps.spec() << "\n";
    out << "kernel=" << kernel.spec() << "\n";
    out << "ic=" << ic.spec() << "\n";
    out << "T=" << real_text(T) << "\n";
    out << "dt=" << (dt ? real_text(*dt) : std::string("auto")) << "\n";
    out << "seed=" << seed << "\n";
    out << "replicates=" << replicates << "\n";
    out << "grid_theta=" << grid_theta << "\n";
    out << "grid_phi=" << grid_phi << "\n";
    out << "L=" << max_degree << "\n";
    out << "sync_tol=" << real_text(sync_tol) << "\n";
    out << "extend_factor=" << real_text(extend_factor) << "\n";
    out << "sample_every=" << sample_every << "\n";
    out << "snapshots=" << snapshots << "\n";
    return out.str();
}

std::string ExperimentConfig::hash() const
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value)
{
    key = trim(key);
    value = trim(value);
    if (key == "experiment") {
        cfg.kind = parse_experiment_kind(value);
    } else if (key == "n") {
        cfg.n_values.clear();
        for (auto part : split(value, ',')) {
            cfg.n_values.push_back(parse_unsigned(part, key));
        }
    } else if (key == "eps") {
        cfg.eps = EpsRule::parse(value);
    } else if (key == "kernel") {
        try {
            cfg.kernel = Kernel::parse(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("kernel: ") + e.what());
        }
    } else if (key == "ic") {
        cfg.ic = InitialCondition::parse(value);
    } else if (key == "T") {
        cfg.T = parse_real(value, key);
    } else if (key == "dt") {
        if (value == "auto") {
            cfg.dt.reset();
        } else {
            cfg.dt = parse_real(value, key);
        }
    } else if (key == "seed") {
        cfg.seed = parse_unsigned(value, key);
    } else if (key == "replicates") {
        cfg.replicates = parse_unsigned(value, key);
    } else if (key == "out") {
        cfg.out_dir = std::string(value);
    } else if (key == "grid_theta") {
        cfg.grid_theta = parse_unsigned(value, key);
    } else if (key == "grid_phi") {
        cfg.grid_phi = parse_unsigned(value, key);
    } else if (key == "L") {
        cfg.max_degree = static_cast<int>(parse_signed(value, key));
    } else if (key == "threads") {
        cfg.threads = static_cast<unsigned>(parse_unsigned(value, key));
    } else if (key == "sync_tol") {
        cfg.sync_tol = parse_real(value, key);
    } else if (key == "extend_factor") {
        cfg.extend_factor = parse_real(value, key);
    } else if (key == "sample_every") {
        cfg.sample_every = parse_unsigned(value, key);
    } else if (key == "snapshots") {
        cfg.snapshots = parse_unsigned(value, key);
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base)
{
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), std::move(base));
}

std::uint64_t derive_seed(std::uint64_t master, std::size_t n_index, std::size_t eps_index, std::size_t replicate)
{
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ (0xA0761D6478BD642FULL * (n_index + 1)));
    s = splitmix64(s ^ (0xE7037ED1A0B428DBULL * (eps_index + 1)));
    s = splitmix64(s ^ (0x8EBC6AF09C88C6E3ULL * (replicate + 1)));
    return s;
}

std::string run_id(std::size_t n, std::size_t eps_index, std::size_t replicate)
{
    return "n" + std::to_string(n) + "_e" + std::to_string(eps_index) + "_r" + std::to_string(replicate);
}

double regime_indicator(std::size_t n, double eps)
{
    if (n < 2) {
        return 0.0;
    }
    const double nn = static_cast<double>(n);
    return eps * eps * nn / std::log(nn);
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<double> unwrap_phases(const SphereGraph& g, std::span<const double> wrapped)
{
    const std::size_t n = g.size();
    if (wrapped.size() != n) {
        throw std::invalid_argument("unwrap_phases: length does not match graph");
    }
    std::vector<double> out(n);
    std::vector<char> seen(n, 0);
    std::queue<std::uint32_t> frontier;
    for (std::size_t root = 0; root < n; ++root) {
        if (seen[root]) {
            continue;
        }
        seen[root] = 1;
        out[root] = wrapped[root];
        frontier.push(static_cast<std::uint32_t>(root));
        while (!frontier.empty()) {
            const auto p = frontier.front();
            frontier.pop();
            for (auto v : g.neighbors(p)) {
                if (seen[v]) {
                    continue;
                }
                seen[v] = 1;
                double d = std::remainder(wrapped[v] - wrapped[p], kTwoPi);
                if (d <= -std::numbers::pi) {
                    d += kTwoPi;
                }
                out[v] = out[p] + d;
                frontier.push(v);
            }
        }
    }
    return out;
}

// --- runners -------------------------------------------------------------------

std::vector<GeneratedGraph> run_generate(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::vector<GeneratedGraph> out;
    for (const auto& run : plan_runs(cfg)) {
        out.push_back({run.key, build_rgg(sample_uniform(run.key.n, run.key.seed), run.key.eps, cfg.kernel,
                                          cfg.threads)});
    }
    return out;
}

ScalingResult run_scaling_limit(const ExperimentConfig& cfg)
{
    cfg.validate();
    const double D = diffusion_constant(cfg.kernel).d_effective;
    const HarmonicField& h0 = cfg.ic.field();
    const std::size_t stride = harmonic_count(h0.max_degree);

    ScalingResult result;
    for (const auto& run : plan_runs(cfg)) {
        const auto start = std::chrono::steady_clock::now();
        ScalingRecord rec;
        rec.key = run.key;
        const PointCloud cloud = sample_uniform(run.key.n, run.key.seed);
        const SphereGraph g = build_rgg(cloud, run.key.eps, cfg.kernel, cfg.threads);
        rec.mean_degree = degree_stats(g).mean;
        rec.connected = is_connected(g);
        const auto table = harmonic_table(cloud, h0.max_degree);
        const auto u0 = cfg.ic.sample(cloud, run.key.seed);

        IntegrateOptions options = base_options(cfg);
        options.observer = [&](double t, std::span<const double> u) {
            const HarmonicField h = heat_solve(h0, D, t);
            double sup = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double* y = table.data() + i * stride;
                double exact = 0.0;
                for (std::size_t k = 0; k < stride; ++k) {
                    exact += h.coeffs[k] * y[k];
                }
                sup = std::max(sup, std::abs(u[i] - exact));
            }
            rec.sample_errors.push_back(sup);
        };
        const auto traj = integrate(g, PhaseState{0.0, u0}, cfg.T, options);
        rec.samples = traj.samples;
        rec.dt = traj.dt;
        rec.steps = traj.steps;
        rec.sup_error = *std::max_element(rec.sample_errors.begin(), rec.sample_errors.end());
        rec.final_error = rec.sample_errors.back();
        rec.wall_seconds = seconds_since(start);
        result.runs.push_back(std::move(rec));
    }
    for (auto n : cfg.n_values) {
        std::vector<double> errors;
        for (const auto& rec : result.runs) {
            if (rec.key.n == n) {
                errors.push_back(rec.sup_error);
            }
        }
        result.medians.emplace_back(n, median(errors));
    }
    return result;
}

SyncResult run_sync_probability(const ExperimentConfig& cfg)
{
    cfg.validate();
    SyncResult result;
    for (const auto& run : plan_runs(cfg)) {
        const auto start = std::chrono::steady_clock::now();
        SyncRecord rec;
        rec.key = run.key;
        const PointCloud cloud = sample_uniform(run.key.n, run.key.seed);
        const SphereGraph g = build_rgg(cloud, run.key.eps, cfg.kernel, cfg.threads);
        rec.mean_degree = degree_stats(g).mean;
        const bool connected = is_connected(g);

        std::vector<double> u = cfg.ic.sample(cloud, run.key.seed);
        IntegrateOptions options = base_options(cfg);
        options.observer = [&u](double, std::span<const double> state) { u.assign(state.begin(), state.end()); };
        Trajectory traj = integrate(g, PhaseState{0.0, u}, cfg.T, options);
        rec.report = detect_sync(connected, traj, cfg.sync_tol);

        // after a pi/2 crossing, keep going until sync or extend_factor * T
        if (rec.report.t_half_pi && !rec.report.t_sync && cfg.extend_factor > 1.0) {
            const double tol = cfg.sync_tol;
            options.stop_when = [tol](const TrajectorySample& s) { return s.diameter < tol; };
            options.dt = traj.dt;
            const auto more = integrate(g, PhaseState{cfg.T, u}, cfg.extend_factor * cfg.T, options);
            traj.samples.insert(traj.samples.end(), more.samples.begin() + 1, more.samples.end());
            traj.steps += more.steps;
            rec.extended = true;
            rec.report = detect_sync(connected, traj, cfg.sync_tol);
        }
        rec.t_end = traj.samples.back().t;
        rec.samples = std::move(traj.samples);
        rec.wall_seconds = seconds_since(start);
        result.runs.push_back(std::move(rec));
    }
    for (const auto& rec : result.runs) {
        auto it = std::find_if(result.summary.begin(), result.summary.end(), [&](const SyncSummary& s) {
            return s.n == rec.key.n && s.eps == rec.key.eps;
        });
        if (it == result.summary.end()) {
            result.summary.push_back({rec.key.n, rec.key.eps});
            it = result.summary.end() - 1;
        }
        ++it->runs;
        if (rec.report.synchronized) {
            ++it->synchronized;
            if (rec.report.connected && rec.report.t_half_pi && *rec.report.t_half_pi <= *rec.report.t_sync) {
                ++it->consistent;
            }
        }
    }
    return result;
}

std::vector<DegreeRecord> run_degree_connectivity(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::vector<DegreeRecord> out;
    for (const auto& run : plan_runs(cfg)) {
        const auto start = std::chrono::steady_clock::now();
        DegreeRecord rec;
        rec.key = run.key;
        const SphereGraph g = build_rgg(sample_uniform(run.key.n, run.key.seed), run.key.eps, cfg.kernel, cfg.threads);
        rec.stats = degree_stats(g);
        rec.outside_025 = rec.stats.fraction_outside(0.25);
        rec.outside_050 = rec.stats.fraction_outside(0.5);
        rec.bound_025 = bernstein_bound(0.25, rec.stats.expected);
        rec.bound_050 = bernstein_bound(0.5, rec.stats.expected);
        rec.components = component_count(g);
        rec.connected = rec.components == 1;
        rec.wall_seconds = seconds_since(start);
        out.push_back(std::move(rec));
    }
    return out;
}

SimulationRecord run_solar_time(const ExperimentConfig& cfg)
{
    ExperimentConfig solar = cfg;
    solar.ic = InitialCondition::solar_time();
    solar.validate();
    const auto run = plan_runs(solar).front();
    PointCloud cloud = sample_uniform(run.key.n, run.key.seed);
    const SphereGraph g = build_rgg(cloud, run.key.eps, solar.kernel, solar.threads);
    const auto wrapped = solar.ic.sample(cloud, run.key.seed);
    auto rec = simulate_with_snapshots(solar, run.key, std::move(cloud), g, unwrap_phases(g, wrapped));
    rec.initial_order = order_parameter(wrapped);
    return rec;
}

SimulationRecord run_simulation(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto run = plan_runs(cfg).front();
    PointCloud cloud = sample_uniform(run.key.n, run.key.seed);
    const SphereGraph g = build_rgg(cloud, run.key.eps, cfg.kernel, cfg.threads);
    auto u0 = cfg.ic.sample(cloud, run.key.seed);
    return simulate_with_snapshots(cfg, run.key, std::move(cloud), g, std::move(u0));
}

HeatResult run_heat(const ExperimentConfig& cfg)
{
    cfg.validate();
    HeatResult result;
    const auto grid = std::make_shared<const QuadratureGrid>(cfg.grid_theta, cfg.grid_phi);
    result.diffusivity = diffusion_constant(cfg.kernel).d_effective;
    const HarmonicField& h0 = cfg.ic.field();
    result.mean = mean_value(h0);
    result.initial = evaluate(h0, grid);
    result.final_heat = evaluate(heat_solve(h0, result.diffusivity, cfg.T), grid);
    result.final_heat.t = cfg.T;
    if (!cfg.eps.is_explicit()) {
        return result;
    }
    IntegralSolveOptions options;
    options.dt = cfg.dt.value_or(0.0);
    options.sample_every = std::numeric_limits<std::size_t>::max();
    options.max_degree = cfg.max_degree;
    const auto sup_gap = [](const std::vector<double>& a, const std::vector<double>& b) {
        double sup = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            sup = std::max(sup, std::abs(a[i] - b[i]));
        }
        return sup;
    };
    for (double eps : cfg.eps.values) {
        const auto start = std::chrono::steady_clock::now();
        HeatRecord row;
        row.eps = eps;
        const auto sine = integral_equation_solve(result.initial, eps, cfg.kernel, cfg.T, Coupling::Sine, options);
        const auto linear =
            integral_equation_solve(result.initial, eps, cfg.kernel, cfg.T, Coupling::Identity, options);
        row.sup_gap_sine = sup_gap(sine.back().values, result.final_heat.values);
        row.sup_gap_identity = sup_gap(linear.back().values, result.final_heat.values);
        row.sine_identity_gap = sup_gap(sine.back().values, linear.back().values);
        row.wall_seconds = seconds_since(start);
        result.rows.push_back(row);
    }
    return result;
}

OperatorConvergenceReport run_operator_test(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto points = sample_uniform(50, cfg.seed).points;
    return operator_convergence_test(cfg.ic.field(), cfg.eps.values, cfg.kernel, points);
}

}  // namespace sphkura
