#include "sphkura/output.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace sphkura {

namespace fs = std::filesystem;

namespace {

std::string flag(bool b) { return b ? "1" : "0"; }

std::string count(std::size_t v) { return std::to_string(v); }

std::string wrap_phase(double v)
{
    double w = std::fmod(v, 2.0 * std::numbers::pi);
    if (w < 0.0) {
        w += 2.0 * std::numbers::pi;
    }
    return format_real(w);
}

std::string time_tag(double t)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", t);
    return buf;
}

std::vector<std::string> key_fields(const RunKey& key)
{
    return {key.id, count(key.n), format_real(key.eps), std::to_string(key.replicate), std::to_string(key.seed)};
}

const std::vector<std::string> kKeyColumns{"run_id", "n", "eps", "replicate", "seed"};

std::vector<std::string> with_key(std::vector<std::string> tail)
{
    std::vector<std::string> cols = kKeyColumns;
    cols.insert(cols.end(), tail.begin(), tail.end());
    return cols;
}

void append(std::vector<std::string>& row, std::vector<std::string> tail)
{
    row.insert(row.end(), tail.begin(), tail.end());
}

void write_series(const fs::path& path, const std::string& hash, const std::vector<TrajectorySample>& samples,
                  const std::vector<double>* errors = nullptr)
{
    std::vector<std::string> cols{"t", "energy", "order_parameter", "diameter"};
    if (errors) {
        cols.push_back("sup_error");
    }
    CsvWriter csv(path, errors ? "sphkura.series_error" : "sphkura.series", hash, cols);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& s = samples[k];
        std::vector<std::string> row{format_real(s.t), format_real(s.energy), format_real(s.order_parameter),
                                     format_real(s.diameter)};
        if (errors) {
            row.push_back(format_real((*errors)[k]));
        }
        csv.row(row);
    }
}

void prepare(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
}

}  // namespace

std::string format_real(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& v)
{
    return v ? format_real(*v) : std::string();
}

CsvWriter::CsvWriter(const fs::path& path, std::string_view schema, std::string_view config_hash,
                     const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), columns_(columns.size()), path_(path)
{
    if (!out_) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out_ << "# schema=" << schema << ".v" << kSchemaVersion << " config_hash=" << config_hash << "\n";
    row(columns);
}

void CsvWriter::row(const std::vector<std::string>& fields)
{
    if (fields.size() != columns_) {
        throw std::logic_error("CsvWriter: row width does not match header in " + path_.string());
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            out_ << ',';
        }
        const auto& f = fields[i];
        if (f.find_first_of(",\"\n") == std::string::npos) {
            out_ << f;
            continue;
        }
        out_ << '"';
        for (char c : f) {
            out_ << (c == '"' ? "\"\"" : std::string(1, c));
        }
        out_ << '"';
    }
    out_ << "\n";
}

void write_field_csv(const fs::path& path, const GridField& field, std::string_view config_hash)
{
    CsvWriter csv(path, "sphkura.field", config_hash, {"theta", "phi", "value"});
    const auto& nodes = field.grid->nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        csv.row({format_real(nodes[i].theta()), format_real(nodes[i].phi()), format_real(field.values[i])});
    }
}

std::string constants_json(const ContinuumConstants& c)
{
    nlohmann::ordered_json j;
    j["kernel"] = c.kernel;
    j["c2"] = c.c2;
    j["M2"] = c.second_moment;
    j["kappa"] = c.kappa;
    j["D_effective"] = c.d_effective;
    return j.dump(2);
}

void write_meta(const fs::path& dir, const ExperimentConfig& cfg,
                const std::vector<std::pair<std::string, double>>& wall_seconds)
{
    prepare(dir);
    nlohmann::ordered_json j;
    j["tool"] = "sphkura";
    j["version"] = std::string(kVersion);
    j["schema_version"] = kSchemaVersion;
    j["experiment"] = to_string(cfg.kind);
    j["config_hash"] = cfg.hash();
    j["config"] = cfg.canonical();
    j["threads"] = cfg.threads;
    j["initial_condition_smooth"] = cfg.ic.smooth();
    auto regime = nlohmann::ordered_json::array();
    for (auto n : cfg.n_values) {
        for (double eps : cfg.eps.eps_for(n)) {
            regime.push_back({{"n", n}, {"eps", eps}, {"eps2_n_over_log_n", regime_indicator(n, eps)}});
        }
    }
    j["regime"] = regime;
    auto timings = nlohmann::ordered_json::object();
    double total = 0.0;
    for (const auto& [id, secs] : wall_seconds) {
        timings[id] = secs;
        total += secs;
    }
    j["wall_seconds"] = timings;
    j["wall_seconds_total"] = total;
    std::ofstream out(dir / "meta.json", std::ios::binary);
    out << j.dump(2) << "\n";
}

void write_generate(const fs::path& dir, const ExperimentConfig& cfg, const std::vector<GeneratedGraph>& graphs)
{
    prepare(dir);
    const auto hash = cfg.hash();
    CsvWriter csv(dir / "runs.csv", "sphkura.generate", hash,
                  with_key({"kernel", "directed_edges", "mean_degree", "expected_degree", "connected", "file"}));
    for (const auto& item : graphs) {
        const std::string file = "graph_" + item.key.id + ".bin";
        save_graph((dir / file).string(), item.graph);
        auto row = key_fields(item.key);
        append(row, {cfg.kernel.spec(), count(item.graph.directed_edge_count()),
                     format_real(degree_stats(item.graph).mean), format_real(item.graph.expected_degree()),
                     flag(is_connected(item.graph)), file});
        csv.row(row);
    }
}

void write_scaling(const fs::path& dir, const ExperimentConfig& cfg, const ScalingResult& result)
{
    prepare(dir);
    const auto hash = cfg.hash();
    CsvWriter csv(dir / "runs.csv", "sphkura.scaling", hash,
                  with_key({"kernel", "ic", "T", "dt", "steps", "mean_degree", "connected", "sup_error",
                            "final_error"}));
    for (const auto& rec : result.runs) {
        auto row = key_fields(rec.key);
        append(row, {cfg.kernel.spec(), cfg.ic.spec(), format_real(cfg.T), format_real(rec.dt), count(rec.steps),
                     format_real(rec.mean_degree), flag(rec.connected), format_real(rec.sup_error),
                     format_real(rec.final_error)});
        csv.row(row);
        write_series(dir / ("series_" + rec.key.id + ".csv"), hash, rec.samples, &rec.sample_errors);
    }
    CsvWriter summary(dir / "summary.csv", "sphkura.scaling_summary", hash, {"n", "median_sup_error"});
    for (const auto& [n, med] : result.medians) {
        summary.row({count(n), format_real(med)});
    }
}

void write_sync(const fs::path& dir, const ExperimentConfig& cfg, const SyncResult& result)
{
    prepare(dir);
    const auto hash = cfg.hash();
    CsvWriter csv(dir / "runs.csv", "sphkura.sync", hash,
                  with_key({"kernel", "ic", "mean_degree", "connected", "t_half_pi", "t_sync", "final_diameter",
                            "synchronized", "extended", "t_end"}));
    for (const auto& rec : result.runs) {
        auto row = key_fields(rec.key);
        append(row, {cfg.kernel.spec(), cfg.ic.spec(), format_real(rec.mean_degree), flag(rec.report.connected),
                     format_optional(rec.report.t_half_pi), format_optional(rec.report.t_sync),
                     format_real(rec.report.final_diameter), flag(rec.report.synchronized), flag(rec.extended),
                     format_real(rec.t_end)});
        csv.row(row);
        write_series(dir / ("series_" + rec.key.id + ".csv"), hash, rec.samples);
    }
    CsvWriter summary(dir / "summary.csv", "sphkura.sync_summary", hash,
                      {"n", "eps", "runs", "synchronized", "consistent", "fraction"});
    for (const auto& s : result.summary) {
        summary.row({count(s.n), format_real(s.eps), count(s.runs), count(s.synchronized), count(s.consistent),
                     format_real(s.fraction())});
    }
}

void write_degrees(const fs::path& dir, const ExperimentConfig& cfg, const std::vector<DegreeRecord>& records)
{
    prepare(dir);
    CsvWriter csv(dir / "runs.csv", "sphkura.degrees", cfg.hash(),
                  with_key({"kernel", "expected_degree", "mean_degree", "min_degree", "max_degree", "stddev",
                            "outside_0.25", "bound_0.25", "outside_0.5", "bound_0.5", "connected", "components"}));
    for (const auto& rec : records) {
        auto row = key_fields(rec.key);
        append(row, {cfg.kernel.spec(), format_real(rec.stats.expected), format_real(rec.stats.mean),
                     count(rec.stats.min), count(rec.stats.max), format_real(rec.stats.stddev),
                     format_real(rec.outside_025), format_real(std::min(1.0, rec.bound_025)),
                     format_real(rec.outside_050), format_real(std::min(1.0, rec.bound_050)), flag(rec.connected),
                     count(rec.components)});
        csv.row(row);
    }
}

void write_simulation(const fs::path& dir, const ExperimentConfig& cfg, const SimulationRecord& rec)
{
    prepare(dir);
    const auto hash = cfg.hash();
    const std::string schema = cfg.kind == ExperimentKind::Solar ? "sphkura.solar" : "sphkura.simulate";
    CsvWriter csv(dir / "runs.csv", schema, hash,
                  with_key({"kernel", "ic", "scaling_hypotheses", "mean_degree", "connected", "initial_order",
                            "final_order", "initial_diameter", "t_half_pi", "t_sync", "final_diameter",
                            "synchronized", "snapshots"}));
    auto row = key_fields(rec.key);
    const std::string ic = cfg.kind == ExperimentKind::Solar ? "solar_time" : cfg.ic.spec();
    const bool smooth = cfg.kind != ExperimentKind::Solar && cfg.ic.smooth();
    append(row, {cfg.kernel.spec(), ic, smooth ? "inside" : "outside", format_real(rec.mean_degree),
                 flag(rec.report.connected), format_real(rec.initial_order), format_real(rec.final_order),
                 format_real(rec.initial_diameter), format_optional(rec.report.t_half_pi),
                 format_optional(rec.report.t_sync), format_real(rec.report.final_diameter),
                 flag(rec.report.synchronized), count(rec.snapshots.size())});
    csv.row(row);
    write_series(dir / ("series_" + rec.key.id + ".csv"), hash, rec.samples);
    for (const auto& snap : rec.snapshots) {
        CsvWriter out(dir / ("snapshot_" + rec.key.id + "_" + time_tag(snap.t) + ".csv"), "sphkura.snapshot", hash,
                      {"theta", "phi", "phase"});
        for (std::size_t i = 0; i < snap.phases.size(); ++i) {
            const auto& p = rec.cloud.points[i];
            out.row({format_real(p.theta()), format_real(p.phi()), wrap_phase(snap.phases[i])});
        }
    }
}

void write_heat(const fs::path& dir, const ExperimentConfig& cfg, const HeatResult& result)
{
    prepare(dir);
    const auto hash = cfg.hash();
    CsvWriter csv(dir / "runs.csv", "sphkura.heat", hash,
                  {"eps", "kernel", "ic", "T", "D_effective", "mean", "sup_gap_sine", "sup_gap_identity",
                   "sine_identity_gap"});
    for (const auto& row : result.rows) {
        csv.row({format_real(row.eps), cfg.kernel.spec(), cfg.ic.spec(), format_real(cfg.T),
                 format_real(result.diffusivity), format_real(result.mean), format_real(row.sup_gap_sine),
                 format_real(row.sup_gap_identity), format_real(row.sine_identity_gap)});
    }
    write_field_csv(dir / ("field_heat_" + time_tag(0.0) + ".csv"), result.initial, hash);
    write_field_csv(dir / ("field_heat_" + time_tag(cfg.T) + ".csv"), result.final_heat, hash);
}

void write_operator_test(const fs::path& dir, const ExperimentConfig& cfg, const OperatorConvergenceReport& report)
{
    prepare(dir);
    CsvWriter csv(dir / "runs.csv", "sphkura.operator_test", cfg.hash(),
                  {"eps", "kernel", "ic", "D_effective", "sup_error", "slope", "monotone"});
    for (std::size_t i = 0; i < report.eps.size(); ++i) {
        csv.row({format_real(report.eps[i]), cfg.kernel.spec(), cfg.ic.spec(), format_real(report.d_effective),
                 format_real(report.sup_errors[i]), format_real(report.slope), flag(report.monotone_decreasing)});
    }
}

}  // namespace sphkura
