#include "doctest.h"

#include <cmath>
#include <map>

#include "cfaudit/synthgen.hpp"

using namespace cfaudit;

namespace {

std::map<std::pair<int, int>, std::size_t> group_counts(const Dataset& ds) {
  std::map<std::pair<int, int>, std::size_t> counts;
  for (const DataPoint& p : ds.points()) ++counts[{p.s, p.y}];
  return counts;
}

}  // namespace

TEST_CASE("preset da matches its mixture table") {
  const SyntheticSpec spec = preset_da();
  CHECK(spec.sigma == 1.0);
  CHECK(spec.total_count() == 80);
  REQUIRE(spec.rows.size() == 4);
  CHECK(spec.rows[0].mu_x1 == 1.0);
  CHECK(spec.rows[0].mu_x2 == 9.0);
  CHECK(spec.rows[1].mu_x1 == 3.5);
  CHECK(spec.rows[1].mu_x2 == 5.0);
  for (const SyntheticRow& row : spec.rows) CHECK(row.count == 20);

  const auto counts = group_counts(generate(spec, 7));
  CHECK(counts.at({0, 0}) == 20);
  CHECK(counts.at({1, 0}) == 20);
  CHECK(counts.at({0, 1}) == 20);
  CHECK(counts.at({1, 1}) == 20);
}

TEST_CASE("preset db matches its mixture table") {
  const SyntheticSpec spec = preset_db();
  CHECK(spec.sigma == 1.0);
  CHECK(spec.total_count() == 80);

  std::size_t s0 = 0, s1 = 0;
  for (const SyntheticRow& row : spec.rows) (row.s == 0 ? s0 : s1) += row.count;
  CHECK(s0 == 35);
  CHECK(s1 == 45);

  const auto counts = group_counts(generate(spec, 7));
  CHECK(counts.at({1, 0}) == 15);
  CHECK(counts.at({0, 0}) == 15);
  CHECK(counts.at({1, 1}) == 30);
  CHECK(counts.at({0, 1}) == 20);
}

TEST_CASE("zero sigma collapses every draw onto the means") {
  SyntheticSpec spec{{{2.5, -1.75, 1, 0, 3}}, 0.0};
  const Dataset ds = generate(spec, 99);
  REQUIRE(ds.size() == 3);
  for (const DataPoint& p : ds.points()) {
    CHECK(p.x == Vector{2.5, -1.75});
    CHECK(p.s == 1);
    CHECK(p.y == 0);
  }
}

TEST_CASE("generation is seed-deterministic") {
  const Dataset a = generate(preset_da(), 31);
  const Dataset b = generate(preset_da(), 31);
  CHECK(a.rows() == b.rows());

  const Dataset c = generate(preset_da(), 32);
  CHECK(a.rows() != c.rows());
}

TEST_CASE("s and y are assigned, never sampled") {
  const SyntheticSpec spec = preset_db();
  const Dataset ds = generate(spec, 11);
  std::size_t offset = 0;
  for (const SyntheticRow& row : spec.rows) {
    for (std::size_t i = 0; i < row.count; ++i) {
      const DataPoint p = ds.point(offset + i);
      CHECK(p.s == row.s);
      CHECK(p.y == row.y);
    }
    offset += row.count;
  }
}

TEST_CASE("sample means converge to the spec means") {
  SyntheticSpec spec{{{2.5, 7.25, 0, 1, 10000}}, 1.0};
  const Dataset ds = generate(spec, 4242);
  double sum1 = 0.0, sum2 = 0.0;
  for (const DataPoint& p : ds.points()) {
    sum1 += p.x[0];
    sum2 += p.x[1];
  }
  const double n = static_cast<double>(ds.size());
  CHECK(std::abs(sum1 / n - 2.5) < 0.05);
  CHECK(std::abs(sum2 / n - 7.25) < 0.05);
}

TEST_CASE("spec validation rejects malformed rows") {
  CHECK_THROWS(generate(SyntheticSpec{{}, 1.0}, 1));
  CHECK_THROWS(generate(SyntheticSpec{{{0, 0, 0, 0, 0}}, 1.0}, 1));   // zero count
  CHECK_THROWS(generate(SyntheticSpec{{{0, 0, 2, 0, 5}}, 1.0}, 1));   // s out of range
  CHECK_THROWS(generate(SyntheticSpec{{{0, 0, 0, 0, 5}}, -1.0}, 1));  // negative sigma
}
