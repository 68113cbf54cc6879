#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sphkura/continuum.hpp"
#include "sphkura/experiments.hpp"

namespace sphkura {

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

/// Shortest text that reads back to the same double; "nan"/"inf" otherwise.
std::string format_real(double v);
/// Empty field for an absent value.
std::string format_optional(const std::optional<double>& v);

/// CSV file whose first line is "# schema=<name>.v<N> config_hash=<hash>".
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::string_view schema, std::string_view config_hash,
              const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& fields);

private:
    std::ofstream out_;
    std::size_t columns_;
    std::filesystem::path path_;
};

/// (theta, phi, value) for every grid node.
void write_field_csv(const std::filesystem::path& path, const GridField& field, std::string_view config_hash);

/// {"kernel", "c2", "M2", "kappa", "D_effective"}.
std::string constants_json(const ContinuumConstants& c);

/// Config echo, versions, regime diagnostics and per-run wall times.
void write_meta(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                const std::vector<std::pair<std::string, double>>& wall_seconds);

void write_generate(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                    const std::vector<GeneratedGraph>& graphs);
void write_scaling(const std::filesystem::path& dir, const ExperimentConfig& cfg, const ScalingResult& result);
void write_sync(const std::filesystem::path& dir, const ExperimentConfig& cfg, const SyncResult& result);
void write_degrees(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                   const std::vector<DegreeRecord>& records);
void write_simulation(const std::filesystem::path& dir, const ExperimentConfig& cfg, const SimulationRecord& rec);
void write_heat(const std::filesystem::path& dir, const ExperimentConfig& cfg, const HeatResult& result);
void write_operator_test(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                         const OperatorConvergenceReport& report);

}  // namespace sphkura
