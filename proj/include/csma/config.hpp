#pragma once

#include "csma/chain.hpp"
#include "csma/queueing.hpp"
#include "csma/sim.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace csma {

struct SweepSpec {
    std::vector<double> scales{1.0};
    std::vector<std::uint64_t> seeds;
};

/// Everything a batch command needs; parsed and validated up front.
struct ExperimentConfig {
    SimConfig sim;
    SweepSpec sweep;
};

/// Parses the JSON config schema. Relative "graph_file" paths resolve
/// against `base_dir`. Throws invalid_config with a diagnostic.
ExperimentConfig parse_config(const nlohmann::json &j,
                              const std::filesystem::path &base_dir = {});
ExperimentConfig parse_config_text(const std::string &text,
                                   const std::filesystem::path &base_dir = {});
ExperimentConfig load_config(const std::filesystem::path &path);

/// Canonical form (always with inline edges) used for hashing and manifests.
nlohmann::json to_json(const ExperimentConfig &cfg);

/// FNV-1a 64 of the canonical JSON text, as 16 hex digits.
std::string config_hash(const ExperimentConfig &cfg);

/// Weights used by analyze/verify: w_override, else compute_weights(Q = 0).
std::vector<double> analysis_weights(const ExperimentConfig &cfg);

nlohmann::json summary_json(const Trace &trace, const StabilityVerdict *verdict);
void write_trace_csv(std::ostream &out, const Trace &trace);

nlohmann::json capacity_json(const CapacityMargin &m);
nlohmann::json report_json(const LemmaReport &r);

/// Writes P.csv, Q.csv, stationary.csv and analysis.json into `dir`;
/// returns the analysis JSON.
nlohmann::json write_analysis(const ExperimentConfig &cfg,
                              const std::filesystem::path &dir);

nlohmann::json manifest_json(const ExperimentConfig &cfg, const std::string &command);

/// Shortest round-trip decimal for a double, as used in every CSV.
std::string format_double(double v);

} // namespace csma
