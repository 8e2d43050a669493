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

namespace cfaudit {

/// How the 80% rule reads the parity ratio. two_sided flags disparity in
/// either direction via min(sp, 1/sp) and is invariant under group
/// relabeling; one_sided flags sp <= 0.8 as written, with group 0 in the
/// numerator.
enum class DisparateImpactRule { two_sided, one_sided };

/// Fraction of group-s members predicted favorable. Throws when the group
/// has no members (the rate is undefined).
double acceptance_rate(const std::vector<int>& predictions, const std::vector<int>& groups,
                       int group_value);

/// AR(low) / AR(high) for the two group codes in ascending order. Returns
/// nullopt when the denominator rate is zero; throws unless exactly two
/// distinct groups are present.
std::optional<double> statistical_parity(const std::vector<int>& predictions,
                                         const std::vector<int>& groups);

bool disparate_impact(double sp, DisparateImpactRule rule = DisparateImpactRule::two_sided);

struct BurdenStat {
  std::optional<double> mean;       // undefined when no usable member exists
  std::size_t negatives = 0;        // group members predicted unfavorable
  std::size_t valid_used = 0;       // counterfactuals that entered the mean
  std::size_t invalid = 0;          // counterfactuals excluded as invalid
};

/// Mean counterfactual distance over group-s members predicted unfavorable.
/// Invalid counterfactuals are excluded from the mean and counted.
BurdenStat burden(const std::vector<Counterfactual>& counterfactuals,
                  const std::vector<int>& groups, const std::vector<int>& predictions,
                  int group_value);

/// Burden(low) / Burden(high); nullopt when either is undefined or the
/// denominator is zero.
std::optional<double> burden_ratio(const BurdenStat& low_group, const BurdenStat& high_group);

struct GroupCounts {
  std::size_t total = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t invalid_counterfactuals = 0;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t data_seed = 0;
  std::uint64_t train_seed = 0;
  std::uint64_t ga_seed = 0;
  std::string source;
  std::string ga_profile;
  std::string config_digest;
};

struct FairnessConfig {
  DisparateImpactRule rule = DisparateImpactRule::two_sided;
};

struct FairnessReport {
  std::map<int, double> acceptance_rate_by_group;
  std::optional<double> statistical_parity;   // AR(low) / AR(high)
  std::optional<bool> disparate_impact;       // undefined when SP is
  DisparateImpactRule rule = DisparateImpactRule::two_sided;
  std::map<int, std::optional<double>> burden_by_group;
  std::optional<double> burden_ratio;         // Burden(low) / Burden(high)
  std::map<int, GroupCounts> counts;
  DistanceMetric metric = DistanceMetric::euclidean;
  Provenance provenance;

  nlohmann::json to_json() const;
};

/// Computes every report field from the model's predictions over the
/// dataset and the supplied counterfactuals (generated for the predicted
/// unfavorable class). Non-binary group structure leaves the pairwise
/// metrics undefined rather than failing.
FairnessReport build_report(const LinearModel& model, const Dataset& dataset,
                            const std::vector<Counterfactual>& counterfactuals,
                            const FairnessConfig& config = {});

}  // namespace cfaudit
