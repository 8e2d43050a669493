#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfaudit/classifier.hpp"
#include "cfaudit/counterfactual.hpp"
#include "cfaudit/dataset.hpp"
#include "cfaudit/fairness.hpp"

namespace cfaudit {

enum class DataSource { preset_da, preset_db, csv };

/// Everything one audit run needs. Stage seeds (generation, sampling,
/// training, search) all derive from the single master seed, so one number
/// pins the whole run.
struct ExperimentConfig {
  DataSource source = DataSource::preset_da;
  std::string csv_path;
  std::string schema_path;
  std::string sensitive_column;          // empty: schema's first sensitive column
  std::optional<std::size_t> sample_size;  // capped at the cleaned dataset size
  std::uint64_t seed = 42;
  TrainConfig train;
  GaConfig ga = GaConfig::desk_profile();
  std::string ga_profile = "desk";       // desk | paper, applied to ga
  DisparateImpactRule di_rule = DisparateImpactRule::two_sided;
  std::string output_dir = "cfaudit_run";

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& doc);
};

struct RunArtifacts {
  std::string dataset_csv;
  std::string dataset_schema;
  std::string model_file;
  std::string counterfactual_dump;
  std::string report_file;
  std::string plot_file;   // empty when the data is not 2-D
  std::string meta_file;   // timings and run metadata (non-deterministic)
  std::map<std::string, double> stage_seconds;
  double accuracy = 0.0;
  FairnessReport report;
};

/// Full pipeline: obtain data, clean, optionally sample, train, generate
/// counterfactuals for the predicted-unfavorable class, build the fairness
/// report, and persist every artifact under config.output_dir. On error the
/// partially written artifacts are removed and the failing stage is named.
RunArtifacts run_experiment(const ExperimentConfig& config);

/// Writes a 2-D scatter SVG: points marked by (s, y) group, counterfactuals
/// as crosses with dotted connectors to their origins, and the model's
/// decision boundary. Returns false (and writes nothing) when the dataset
/// does not have exactly two legitimate features.
bool emit_plot(const Dataset& dataset, const LinearModel& model,
               const std::vector<Counterfactual>& counterfactuals, const std::string& path);

/// FNV-1a 64-bit digest, rendered as hex. Used to stamp reports with the
/// configuration they came from.
std::string fnv1a_digest(const std::string& text);

/// Stage-seed derivation used by run_experiment (exposed for tests and for
/// reproducing a run piecewise).
std::uint64_t stage_seed(std::uint64_t master, const std::string& stage);

}  // namespace cfaudit
