#pragma once

#include <cstdint>
#include <vector>

#include "cfaudit/dataset.hpp"

namespace cfaudit {

/// One Gaussian mixture component: both legitimate features are sampled
/// around (mu_x1, mu_x2) with the shared sigma; s and y are assigned, not
/// sampled.
struct SyntheticRow {
  double mu_x1 = 0.0;
  double mu_x2 = 0.0;
  int s = 0;
  int y = 0;
  std::size_t count = 0;
};

struct SyntheticSpec {
  std::vector<SyntheticRow> rows;
  double sigma = 1.0;

  std::size_t total_count() const;
  void validate() const;
};

/// Two-feature schema used by all synthetic datasets: x1, x2 legitimate
/// continuous, s sensitive in {0, 1}, y label in {0, 1} with favorable 1.
FeatureSchema synthetic_schema();

/// Draws `count` points per spec row, grouped in row order. x1 and x2 are
/// sampled independently via the inverse-CDF normal sampler, so a given
/// seed reproduces the dataset exactly.
Dataset generate(const SyntheticSpec& spec, std::uint64_t seed);

/// The preset that keeps acceptance rates equal between groups while the
/// groups sit at different distances from the class boundary.
SyntheticSpec preset_da();

/// The preset whose group with the lower acceptance rate is the one closer
/// to the class boundary.
SyntheticSpec preset_db();

}  // namespace cfaudit
