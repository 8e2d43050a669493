#include "cfaudit/synthgen.hpp"

#include <stdexcept>

#include "cfaudit/rng.hpp"

namespace cfaudit {

std::size_t SyntheticSpec::total_count() const {
  std::size_t total = 0;
  for (const SyntheticRow& row : rows) total += row.count;
  return total;
}

void SyntheticSpec::validate() const {
  if (rows.empty()) throw std::invalid_argument("synthetic spec: no rows");
  if (!(sigma >= 0.0)) throw std::invalid_argument("synthetic spec: sigma must be non-negative");
  for (const SyntheticRow& row : rows) {
    if (row.count == 0) throw std::invalid_argument("synthetic spec: row count must be positive");
    if (row.s != 0 && row.s != 1) throw std::invalid_argument("synthetic spec: s must be 0 or 1");
    if (row.y != 0 && row.y != 1) throw std::invalid_argument("synthetic spec: y must be 0 or 1");
  }
}

FeatureSchema synthetic_schema() {
  return FeatureSchema({
      {"x1", ColumnKind::continuous, ColumnRole::legitimate, {}},
      {"x2", ColumnKind::continuous, ColumnRole::legitimate, {}},
      {"s", ColumnKind::categorical, ColumnRole::sensitive, {0.0, 1.0}},
      {"y", ColumnKind::categorical, ColumnRole::label, {0.0, 1.0}},
  });
}

Dataset generate(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  std::vector<Vector> rows;
  rows.reserve(spec.total_count());
  for (const SyntheticRow& row : spec.rows) {
    for (std::size_t i = 0; i < row.count; ++i) {
      const double x1 = rng.normal(row.mu_x1, spec.sigma);
      const double x2 = rng.normal(row.mu_x2, spec.sigma);
      rows.push_back({x1, x2, static_cast<double>(row.s), static_cast<double>(row.y)});
    }
  }
  return Dataset(synthetic_schema(), std::move(rows), /*favorable_label_raw=*/1.0);
}

SyntheticSpec preset_da() {
  return SyntheticSpec{{
                           {1.0, 9.0, 0, 0, 20},
                           {3.5, 5.0, 1, 0, 20},
                           {9.0, 1.0, 0, 1, 20},
                           {9.0, 1.0, 1, 1, 20},
                       },
                       1.0};
}

SyntheticSpec preset_db() {
  return SyntheticSpec{{
                           {1.0, 9.0, 1, 0, 15},
                           {3.5, 5.0, 0, 0, 15},
                           {9.0, 1.0, 1, 1, 30},
                           {9.0, 1.0, 0, 1, 20},
                       },
                       1.0};
}

}  // namespace cfaudit
