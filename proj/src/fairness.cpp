#include "cfaudit/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace cfaudit {

namespace {

void check_aligned(const std::vector<int>& predictions, const std::vector<int>& groups) {
  if (predictions.size() != groups.size())
    throw std::invalid_argument("fairness: predictions and groups differ in length");
}

std::vector<int> distinct_groups(const std::vector<int>& groups) {
  std::set<int> seen(groups.begin(), groups.end());
  return std::vector<int>(seen.begin(), seen.end());
}

}  // namespace

double acceptance_rate(const std::vector<int>& predictions, const std::vector<int>& groups,
                       int group_value) {
  check_aligned(predictions, groups);
  std::size_t members = 0;
  std::size_t favorable = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i] != group_value) continue;
    ++members;
    if (predictions[i] == 1) ++favorable;
  }
  if (members == 0)
    throw std::invalid_argument("acceptance_rate: group " + std::to_string(group_value) +
                                " is empty, rate undefined");
  return static_cast<double>(favorable) / static_cast<double>(members);
}

std::optional<double> statistical_parity(const std::vector<int>& predictions,
                                         const std::vector<int>& groups) {
  check_aligned(predictions, groups);
  const std::vector<int> codes = distinct_groups(groups);
  if (codes.size() != 2)
    throw std::invalid_argument("statistical_parity: expected exactly two groups, found " +
                                std::to_string(codes.size()));
  const double ar_low = acceptance_rate(predictions, groups, codes[0]);
  const double ar_high = acceptance_rate(predictions, groups, codes[1]);
  if (ar_high == 0.0) return std::nullopt;
  return ar_low / ar_high;
}

bool disparate_impact(double sp, DisparateImpactRule rule) {
  if (!(sp >= 0.0)) throw std::invalid_argument("disparate_impact: sp must be non-negative");
  if (rule == DisparateImpactRule::one_sided) return sp <= 0.8;
  const double ratio = sp == 0.0 ? 0.0 : std::min(sp, 1.0 / sp);
  return ratio <= 0.8;
}

BurdenStat burden(const std::vector<Counterfactual>& counterfactuals,
                  const std::vector<int>& groups, const std::vector<int>& predictions,
                  int group_value) {
  check_aligned(predictions, groups);
  BurdenStat stat;
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (groups[i] == group_value && predictions[i] == 0) ++stat.negatives;

  double total = 0.0;
  for (const Counterfactual& cf : counterfactuals) {
    if (cf.origin_index >= groups.size())
      throw std::invalid_argument("burden: counterfactual origin index out of range");
    if (groups[cf.origin_index] != group_value) continue;
    if (predictions[cf.origin_index] != 0) continue;
    if (!cf.valid) {
      ++stat.invalid;
      continue;
    }
    total += cf.distance;
    ++stat.valid_used;
  }
  if (stat.valid_used > 0) stat.mean = total / static_cast<double>(stat.valid_used);
  return stat;
}

std::optional<double> burden_ratio(const BurdenStat& low_group, const BurdenStat& high_group) {
  if (!low_group.mean || !high_group.mean) return std::nullopt;
  if (*high_group.mean == 0.0) return std::nullopt;
  return *low_group.mean / *high_group.mean;
}

FairnessReport build_report(const LinearModel& model, const Dataset& dataset,
                            const std::vector<Counterfactual>& counterfactuals,
                            const FairnessConfig& config) {
  const SplitResult parts = split(dataset);
  const std::vector<int> predictions = predict_all(model, parts.features);

  FairnessReport report;
  report.rule = config.rule;

  const std::vector<int> codes = distinct_groups(parts.sensitive);
  for (int code : codes) {
    report.acceptance_rate_by_group[code] =
        acceptance_rate(predictions, parts.sensitive, code);
    const BurdenStat stat = burden(counterfactuals, parts.sensitive, predictions, code);
    report.burden_by_group[code] = stat.mean;

    GroupCounts counts;
    for (std::size_t i = 0; i < parts.sensitive.size(); ++i) {
      if (parts.sensitive[i] != code) continue;
      ++counts.total;
      if (predictions[i] == 1) ++counts.positives;
      else ++counts.negatives;
    }
    counts.invalid_counterfactuals = stat.invalid;
    report.counts[code] = counts;
  }

  if (codes.size() == 2) {
    const double ar_low = report.acceptance_rate_by_group.at(codes[0]);
    const double ar_high = report.acceptance_rate_by_group.at(codes[1]);
    if (ar_high != 0.0) report.statistical_parity = ar_low / ar_high;
    if (report.statistical_parity)
      report.disparate_impact = disparate_impact(*report.statistical_parity, config.rule);

    const auto& b_low = report.burden_by_group.at(codes[0]);
    const auto& b_high = report.burden_by_group.at(codes[1]);
    if (b_low && b_high && *b_high != 0.0) report.burden_ratio = *b_low / *b_high;
  }
  return report;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json FairnessReport::to_json() const {
  nlohmann::json doc;
  doc["acceptance_rate_by_group"] = nlohmann::json::object();
  doc["burden_by_group"] = nlohmann::json::object();
  doc["counts"] = nlohmann::json::object();
  for (const auto& [code, rate] : acceptance_rate_by_group)
    doc["acceptance_rate_by_group"][std::to_string(code)] = rate;
  doc["statistical_parity"] = optional_json(statistical_parity);
  doc["disparate_impact"] =
      disparate_impact ? nlohmann::json(*disparate_impact) : nlohmann::json(nullptr);
  doc["disparate_impact_rule"] =
      rule == DisparateImpactRule::two_sided ? "two_sided" : "one_sided";
  for (const auto& [code, value] : burden_by_group)
    doc["burden_by_group"][std::to_string(code)] = optional_json(value);
  doc["burden_ratio"] = optional_json(burden_ratio);
  for (const auto& [code, c] : counts) {
    doc["counts"][std::to_string(code)] = {{"total", c.total},
                                           {"positives", c.positives},
                                           {"negatives", c.negatives},
                                           {"invalid_counterfactuals", c.invalid_counterfactuals}};
  }
  doc["distance_metric"] = metric_name(metric);
  doc["provenance"] = {{"seed", provenance.seed},
                       {"data_seed", provenance.data_seed},
                       {"train_seed", provenance.train_seed},
                       {"ga_seed", provenance.ga_seed},
                       {"source", provenance.source},
                       {"ga_profile", provenance.ga_profile},
                       {"config_digest", provenance.config_digest}};
  return doc;
}

}  // namespace cfaudit
