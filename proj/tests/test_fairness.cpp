#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfaudit/fairness.hpp"
#include "cfaudit/harness.hpp"
#include "cfaudit/rng.hpp"
#include "cfaudit/synthgen.hpp"

using namespace cfaudit;

namespace {

constexpr std::uint64_t kRunSeed = 13;

// Predictions for a perfect classifier on the preset tables: prediction
// equals the assigned label.
void preset_vectors(const SyntheticSpec& spec, std::vector<int>& predictions,
                    std::vector<int>& groups) {
  predictions.clear();
  groups.clear();
  for (const SyntheticRow& row : spec.rows)
    for (std::size_t i = 0; i < row.count; ++i) {
      predictions.push_back(row.y);
      groups.push_back(row.s);
    }
}

Counterfactual make_cf(std::size_t origin, double dist, bool valid = true) {
  Counterfactual cf;
  cf.origin_index = origin;
  cf.distance = dist;
  cf.valid = valid;
  cf.c_star = {0.0, 0.0};
  return cf;
}

}  // namespace

TEST_CASE("acceptance rates reproduce the preset tables") {
  std::vector<int> predictions, groups;
  preset_vectors(preset_db(), predictions, groups);
  CHECK(acceptance_rate(predictions, groups, 0) == 20.0 / 35.0);
  CHECK(acceptance_rate(predictions, groups, 1) == 30.0 / 45.0);
  CHECK(acceptance_rate(predictions, groups, 0) == doctest::Approx(0.571).epsilon(1e-3));

  preset_vectors(preset_da(), predictions, groups);
  CHECK(acceptance_rate(predictions, groups, 0) == 0.5);
  CHECK(acceptance_rate(predictions, groups, 1) == 0.5);

  CHECK(acceptance_rate({1, 1, 1}, {0, 0, 0}, 0) == 1.0);
  CHECK_THROWS(acceptance_rate({1, 0}, {0, 0}, 5));  // empty group
}

TEST_CASE("statistical parity reproduces the preset tables") {
  std::vector<int> predictions, groups;
  preset_vectors(preset_da(), predictions, groups);
  CHECK(statistical_parity(predictions, groups) == 1.0);

  preset_vectors(preset_db(), predictions, groups);
  const auto sp = statistical_parity(predictions, groups);
  REQUIRE(sp.has_value());
  CHECK(*sp == (20.0 / 35.0) / (30.0 / 45.0));
  CHECK(*sp == doctest::Approx(6.0 / 7.0).epsilon(1e-12));
  CHECK(*sp == doctest::Approx(0.857).epsilon(1e-3));

  CHECK(statistical_parity({1, 0, 1, 0}, {0, 0, 1, 1}) == 1.0);  // equal rates
  CHECK_FALSE(statistical_parity({1, 0}, {0, 1}).has_value());   // zero denominator
  CHECK_THROWS(statistical_parity({1, 0}, {0, 0}));              // one group only
  CHECK_THROWS(statistical_parity({1, 0, 1}, {0, 1, 2}));        // three groups
}

TEST_CASE("statistical parity obeys reciprocal symmetry under group swap") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> predictions, groups;
    const std::size_t n = 10 + rng.uniform_index(40);
    for (std::size_t i = 0; i < n; ++i) {
      predictions.push_back(static_cast<int>(rng.uniform_index(2)));
      groups.push_back(static_cast<int>(rng.uniform_index(2)));
    }
    // force both groups non-empty with at least one favorable each
    predictions.insert(predictions.end(), {1, 1});
    groups.insert(groups.end(), {0, 1});

    std::vector<int> swapped;
    for (int g : groups) swapped.push_back(1 - g);

    const auto sp = statistical_parity(predictions, groups);
    const auto sp_swapped = statistical_parity(predictions, swapped);
    REQUIRE(sp.has_value());
    REQUIRE(sp_swapped.has_value());
    CHECK(*sp_swapped == doctest::Approx(1.0 / *sp).epsilon(1e-12));
  }
}

TEST_CASE("the 80 percent rule is inclusive and two-sided by default") {
  CHECK(disparate_impact(0.79));
  CHECK(disparate_impact(0.8));        // boundary, inclusive
  CHECK_FALSE(disparate_impact(0.81));
  CHECK_FALSE(disparate_impact(1.0));
  CHECK(disparate_impact(1.25));       // same disparity with groups relabeled
  CHECK_FALSE(disparate_impact(1.2));
  CHECK(disparate_impact(0.0));

  CHECK(disparate_impact(0.8, DisparateImpactRule::one_sided));
  CHECK_FALSE(disparate_impact(1.25, DisparateImpactRule::one_sided));
  CHECK_THROWS(disparate_impact(-0.1));
}

TEST_CASE("two-sided disparate impact is symmetric under group swap") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const double sp = rng.uniform(0.05, 3.0);
    CHECK(disparate_impact(sp) == disparate_impact(1.0 / sp));
  }
}

TEST_CASE("burden averages counterfactual distances over predicted negatives") {
  const std::vector<int> groups = {0, 0, 1, 1};
  const std::vector<int> predictions = {0, 0, 0, 1};
  const std::vector<Counterfactual> cfs = {make_cf(0, 2.0), make_cf(1, 4.0), make_cf(2, 5.0)};

  const BurdenStat g0 = burden(cfs, groups, predictions, 0);
  REQUIRE(g0.mean.has_value());
  CHECK(*g0.mean == 3.0);
  CHECK(g0.negatives == 2);
  CHECK(g0.valid_used == 2);
  CHECK(g0.invalid == 0);

  const BurdenStat g1 = burden(cfs, groups, predictions, 1);
  CHECK(*g1.mean == 5.0);
}

TEST_CASE("burden of boundary-sitting points is zero") {
  const std::vector<Counterfactual> cfs = {make_cf(0, 0.0), make_cf(1, 0.0)};
  const BurdenStat stat = burden(cfs, {0, 0}, {0, 0}, 0);
  REQUIRE(stat.mean.has_value());
  CHECK(*stat.mean == 0.0);
}

TEST_CASE("burden is undefined without negatively predicted members") {
  const BurdenStat stat = burden({}, {0, 0, 1}, {1, 1, 0}, 0);
  CHECK_FALSE(stat.mean.has_value());
  CHECK(stat.negatives == 0);
}

TEST_CASE("invalid counterfactuals are excluded and counted") {
  const std::vector<Counterfactual> cfs = {make_cf(0, 2.0), make_cf(1, 99.0, false),
                                           make_cf(2, 4.0)};
  const BurdenStat stat = burden(cfs, {0, 0, 0}, {0, 0, 0}, 0);
  REQUIRE(stat.mean.has_value());
  CHECK(*stat.mean == 3.0);
  CHECK(stat.invalid == 1);
  CHECK(stat.valid_used == 2);
  CHECK(stat.negatives == 3);
}

TEST_CASE("burden ratio") {
  BurdenStat low, high;
  low.mean = 3.31;
  high.mean = 11.0;
  CHECK(*burden_ratio(low, high) == doctest::Approx(0.301).epsilon(1e-2));
  high.mean = 3.31;
  CHECK(*burden_ratio(low, high) == 1.0);
  high.mean.reset();
  CHECK_FALSE(burden_ratio(low, high).has_value());
  high.mean = 0.0;
  CHECK_FALSE(burden_ratio(low, high).has_value());
}

TEST_CASE("burden is invariant under row permutation") {
  Rng rng(88);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 8 + rng.uniform_index(20);
    std::vector<int> groups, predictions;
    std::vector<Counterfactual> cfs;
    for (std::size_t i = 0; i < n; ++i) {
      groups.push_back(static_cast<int>(rng.uniform_index(2)));
      predictions.push_back(static_cast<int>(rng.uniform_index(2)));
      if (predictions.back() == 0) cfs.push_back(make_cf(i, rng.uniform(0.1, 9.0)));
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) std::swap(perm[i], perm[i + rng.uniform_index(n - i)]);

    std::vector<int> groups_p(n), predictions_p(n);
    for (std::size_t i = 0; i < n; ++i) {
      groups_p[perm[i]] = groups[i];
      predictions_p[perm[i]] = predictions[i];
    }
    std::vector<Counterfactual> cfs_p;
    for (const Counterfactual& cf : cfs) cfs_p.push_back(make_cf(perm[cf.origin_index], cf.distance));

    for (int g : {0, 1}) {
      const BurdenStat a = burden(cfs, groups, predictions, g);
      const BurdenStat b = burden(cfs_p, groups_p, predictions_p, g);
      CHECK(a.mean.has_value() == b.mean.has_value());
      if (a.mean) CHECK(*a.mean == doctest::Approx(*b.mean).epsilon(1e-12));
      CHECK(a.negatives == b.negatives);
    }
  }
}

TEST_CASE("scaling every distance scales burdens and fixes the ratio") {
  Rng rng(66);
  std::vector<int> groups, predictions;
  std::vector<Counterfactual> cfs;
  for (std::size_t i = 0; i < 40; ++i) {
    groups.push_back(static_cast<int>(rng.uniform_index(2)));
    predictions.push_back(0);
    cfs.push_back(make_cf(i, rng.uniform(0.5, 10.0)));
  }
  for (double lambda : {0.25, 2.0, 13.5}) {
    std::vector<Counterfactual> scaled;
    for (const Counterfactual& cf : cfs) scaled.push_back(make_cf(cf.origin_index, lambda * cf.distance));
    for (int g : {0, 1}) {
      const BurdenStat base = burden(cfs, groups, predictions, g);
      const BurdenStat after = burden(scaled, groups, predictions, g);
      CHECK(*after.mean == doctest::Approx(lambda * *base.mean).epsilon(1e-12));
    }
    const auto r0 = burden_ratio(burden(cfs, groups, predictions, 0),
                                 burden(cfs, groups, predictions, 1));
    const auto r1 = burden_ratio(burden(scaled, groups, predictions, 0),
                                 burden(scaled, groups, predictions, 1));
    CHECK(*r1 == doctest::Approx(*r0).epsilon(1e-12));
  }
}

TEST_CASE("build_report is internally consistent on a desk-scale preset run") {
  const Dataset ds = generate(preset_da(), stage_seed(kRunSeed, "data"));
  const SplitResult parts = split(ds);
  const LinearModel model = train(parts.features, parts.labels, TrainConfig{});
  GaConfig ga = GaConfig::desk_profile();
  ga.seed = stage_seed(kRunSeed, "ga");
  const auto cfs = generate_all(model, parts.features, 0, ga);

  const FairnessReport report = build_report(model, ds, cfs);
  REQUIRE(report.statistical_parity.has_value());
  CHECK(*report.statistical_parity ==
        report.acceptance_rate_by_group.at(0) / report.acceptance_rate_by_group.at(1));
  REQUIRE(report.burden_ratio.has_value());
  CHECK(*report.burden_ratio ==
        *report.burden_by_group.at(0) / *report.burden_by_group.at(1));
  CHECK(report.counts.at(0).total == 40);
  CHECK(report.counts.at(1).total == 40);
  CHECK(report.counts.at(0).positives + report.counts.at(0).negatives == 40);
  REQUIRE(report.disparate_impact.has_value());
  CHECK_FALSE(*report.disparate_impact);

  const nlohmann::json doc = report.to_json();
  CHECK(doc.contains("acceptance_rate_by_group"));
  CHECK(doc.contains("burden_ratio"));
  CHECK(doc.contains("provenance"));
}

TEST_CASE("build_report marks metrics undefined for a single-group dataset") {
  FeatureSchema schema({
      {"x1", ColumnKind::continuous, ColumnRole::legitimate, {}},
      {"x2", ColumnKind::continuous, ColumnRole::legitimate, {}},
      {"s", ColumnKind::categorical, ColumnRole::sensitive, {0.0, 1.0}},
      {"y", ColumnKind::categorical, ColumnRole::label, {0.0, 1.0}},
  });
  std::vector<Vector> rows = {{0.0, 1.0, 0.0, 0.0}, {5.0, 5.0, 0.0, 1.0}};
  const Dataset ds(schema, rows, 1.0);
  LinearModel model;
  model.weights = {1.0, 0.0};
  model.bias = -2.0;
  const FairnessReport report = build_report(model, ds, {});
  CHECK_FALSE(report.statistical_parity.has_value());
  CHECK_FALSE(report.disparate_impact.has_value());
  CHECK_FALSE(report.burden_ratio.has_value());
  CHECK(report.acceptance_rate_by_group.size() == 1);
  CHECK(report.to_json().at("statistical_parity").is_null());
}
