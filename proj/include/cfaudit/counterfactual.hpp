#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cfaudit/classifier.hpp"
#include "cfaudit/dataset.hpp"
#include "cfaudit/matrix.hpp"

namespace cfaudit {

enum class DistanceMetric { euclidean, manhattan };

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
};

/// Genetic-search parameters. Two built-in profiles: `paper` is the
/// full-scale search (population 60,000; 10,000 retained after selection;
/// 5,000 carried into the next generation; 10 generations), `desk` scales
/// that down 100x so an audit finishes in seconds.
struct GaConfig {
  std::size_t population_size = 60000;
  std::size_t retained_after_selection = 10000;
  std::size_t retained_for_next_generation = 5000;
  std::size_t generations = 10;
  double mutation_probability = 0.2;
  double crossover_probability = 0.5;
  std::vector<FeatureRange> feature_ranges;  // empty: derive from the data
  DistanceMetric metric = DistanceMetric::euclidean;
  std::uint64_t seed = 0;

  static GaConfig paper_profile();
  static GaConfig desk_profile();  // 600 / 100 / 50 / 10

  void validate(std::size_t feature_count) const;
};

/// Search result for one origin point. When no candidate of the opposite
/// class was ever found, valid is false and distance is NaN; the caller
/// decides policy.
struct Counterfactual {
  std::size_t origin_index = 0;
  Vector c_star;
  double distance = std::numeric_limits<double>::quiet_NaN();
  std::size_t generations_run = 0;
  bool valid = false;
  Vector best_distance_trace;  // best-so-far distance after each generation
};

double distance(const Vector& x, const Vector& c, DistanceMetric metric);

/// 1 / d(x, c). Zero-distance candidates are rejected inside the search
/// rather than scored; calling this on them yields +infinity.
double fitness(const Vector& x, const Vector& c, DistanceMetric metric);

/// Per-feature [min, max] over the rows of a feature matrix.
std::vector<FeatureRange> ranges_from(const Matrix& features);

/// Genetic search for the nearest point classified opposite to x.
///
/// Each generation: seed the population with the elites carried over and
/// fresh uniform draws up to N; keep the candidates classified in the
/// opposite class; mutate each survivor with probability P_m (one uniformly
/// chosen feature is redrawn within its range); pair survivors by adjacent
/// fitness rank and cross each pair with probability P_c (each feature
/// position swaps with probability 1/2); re-filter to the opposite class,
/// rank by fitness, truncate to retained_after_selection, and carry the top
/// retained_for_next_generation into the next generation. The best valid
/// candidate ever seen is tracked across generations and returned.
Counterfactual generate_counterfactual(const LinearModel& model, const Vector& x,
                                       const GaConfig& config,
                                       std::size_t origin_index = 0);

/// Closed-form nearest opposite-class point for a linear model: the
/// Euclidean projection of x onto the boundary, nudged just past it. Serves
/// as the optimality oracle for the genetic search.
Counterfactual oracle_projection(const LinearModel& model, const Vector& x,
                                 std::size_t origin_index = 0);

/// Runs the search for every row whose prediction equals target_class.
/// Each point's seed derives from (config.seed, row index), so results do
/// not depend on evaluation order. Invalid results are kept in the list,
/// flagged.
std::vector<Counterfactual> generate_all(const LinearModel& model, const Matrix& features,
                                         int target_class, const GaConfig& config);
std::vector<Counterfactual> generate_all(const LinearModel& model, const Dataset& dataset,
                                         int target_class, const GaConfig& config);

/// One JSON record per line: origin index, origin features, c_star,
/// distance, generations, validity.
void write_dump(const std::vector<Counterfactual>& counterfactuals,
                const Matrix& origins, const std::string& path);

struct DumpRecord {
  Counterfactual counterfactual;
  Vector origin;
};

std::vector<DumpRecord> read_dump(const std::string& path);

DistanceMetric metric_from_name(const std::string& name);
std::string metric_name(DistanceMetric metric);

}  // namespace cfaudit
