#pragma once

// JSON documents for instances, menus, experiment configurations and run
// records, plus the regret CSV.
//
// Instance document (greedy):
//   {"type": "greedy", "name": ..., "v": [...], "mu": [[...], ...],
//    "tie_priority": [[...], ...],          // 1-based ranks, higher wins
//    "mode": "single" | "general",
//    "arrival": {"kind": "iid", "probabilities": [...]}
//             | {"kind": "fixed", "sequence": [...]}        // 0-based agent rows
//             | {"kind": "blocks", "schedule": [[length, agent], ...]}}
// Instance document (smooth):
//   {"type": "smooth", "name": ..., "v": [...], "mode": "single" | "general",
//    "models": [{"kind": "hard", "arm", "interval", "eps", "L", "N"}
//             | {"kind": "gaussian", "mu": [...], "L": ...}
//             | {"kind": "logit", "mu": [...]}, ...],
//    "arrival": {...}}

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pa/core.hpp"
#include "pa/harness.hpp"
#include "pa/instances.hpp"
#include "pa/menu.hpp"
#include "pa/smooth.hpp"

namespace pa {

using Json = nlohmann::json;

Json to_json(const GreedyInstance& instance);
GreedyInstance greedy_instance_from_json(const Json& doc);

/// Oblivious kinds only; adaptive processes have no document form.
Json to_json(const ArrivalProcess& arrivals);
ArrivalProcess arrival_from_json(const Json& doc);

/// [{"support_arm", "value", "provenance"}] for single-arm menus,
/// [{"values", "provenance"}] for general ones. support_arm is 1-based, null for zero.
Json to_json(const Menu& menu);

/// Document for one member of the smooth lower-bound family.
Json smooth_hard_document(const std::string& name, const SmoothHardInstanceParams& params);
SmoothChoiceModel smooth_model_from_json(const Json& doc, std::size_t num_arms,
                                         IncentiveMode mode);

/// A parsed instance document of either type.
struct InstanceDocument {
  std::string name;
  std::string type;  // "greedy" | "smooth"
  std::optional<GreedyInstance> greedy;
  std::shared_ptr<const SmoothEnvironment> smooth;
  IncentiveMode mode = IncentiveMode::SingleArm;
  ArrivalProcess arrivals;
  Json source;  // the document as read
};

InstanceDocument instance_document_from_json(const Json& doc);
Json instance_document(const std::string& name, const GreedyInstance& instance,
                       const ArrivalProcess& arrivals);

/// Experiment configuration:
///   {"instance": path, "policy": {"name", "eta", "gamma", "exploration", "clip", "index"},
///    "T": int, "seeds": int | [ints], "eps": float (smooth grids), "out": dir,
///    "keep_rounds": bool}
struct ExperimentConfig {
  std::string instance_path;
  PolicySpec policy;
  std::size_t horizon = 1000;
  std::vector<std::uint64_t> seeds{0};
  std::optional<double> eps;
  std::string out_dir = "results";
  bool keep_rounds = true;
};

ExperimentConfig experiment_config_from_json(const Json& doc);
Json to_json(const ExperimentConfig& config);
PolicySpec policy_spec_from_json(const Json& doc);
Json to_json(const PolicySpec& spec);

/// FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const Json& config);

Json to_json(const RunRecord& record);
RunRecord run_record_from_json(const Json& doc);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

/// Columns: run_id, t, regret_mean, regret_stderr, policy, instance, seed_count.
struct CsvRow {
  std::string run_id;
  std::size_t t = 0;
  double regret_mean = 0.0;
  double regret_stderr = 0.0;
  std::string policy;
  std::string instance;
  std::size_t seed_count = 0;
};

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
std::vector<CsvRow> read_csv(std::istream& in);

/// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace pa
