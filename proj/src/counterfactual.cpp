#include "cfaudit/counterfactual.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "cfaudit/rng.hpp"

namespace cfaudit {

GaConfig GaConfig::paper_profile() { return GaConfig{}; }

GaConfig GaConfig::desk_profile() {
  GaConfig cfg;
  cfg.population_size = 600;
  cfg.retained_after_selection = 100;
  cfg.retained_for_next_generation = 50;
  cfg.generations = 10;
  return cfg;
}

void GaConfig::validate(std::size_t feature_count) const {
  if (population_size == 0) throw std::invalid_argument("ga: population_size must be positive");
  if (retained_after_selection == 0 || retained_for_next_generation == 0)
    throw std::invalid_argument("ga: retention sizes must be positive");
  if (retained_for_next_generation > retained_after_selection ||
      retained_after_selection > population_size)
    throw std::invalid_argument(
        "ga: need retained_for_next_generation <= retained_after_selection <= population_size");
  if (generations == 0) throw std::invalid_argument("ga: generations must be positive");
  if (!(mutation_probability >= 0.0 && mutation_probability <= 1.0))
    throw std::invalid_argument("ga: mutation_probability must be in [0, 1]");
  if (!(crossover_probability >= 0.0 && crossover_probability <= 1.0))
    throw std::invalid_argument("ga: crossover_probability must be in [0, 1]");
  if (feature_ranges.size() != feature_count)
    throw std::invalid_argument("ga: " + std::to_string(feature_ranges.size()) +
                                " feature ranges for " + std::to_string(feature_count) +
                                " features");
  for (const FeatureRange& r : feature_ranges)
    if (!(r.min <= r.max)) throw std::invalid_argument("ga: feature range with min > max");
}

double distance(const Vector& x, const Vector& c, DistanceMetric metric) {
  if (x.size() != c.size())
    throw std::invalid_argument("distance: vectors of length " + std::to_string(x.size()) +
                                " and " + std::to_string(c.size()));
  double acc = 0.0;
  if (metric == DistanceMetric::euclidean) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - c[j];
      acc += d * d;
    }
    return std::sqrt(acc);
  }
  for (std::size_t j = 0; j < x.size(); ++j) acc += std::abs(x[j] - c[j]);
  return acc;
}

double fitness(const Vector& x, const Vector& c, DistanceMetric metric) {
  return 1.0 / distance(x, c, metric);
}

std::vector<FeatureRange> ranges_from(const Matrix& features) {
  if (features.empty()) throw std::invalid_argument("ranges_from: empty feature matrix");
  std::vector<FeatureRange> ranges(features.front().size());
  for (std::size_t j = 0; j < ranges.size(); ++j)
    ranges[j] = {features[0][j], features[0][j]};
  for (const Vector& row : features) {
    for (std::size_t j = 0; j < ranges.size(); ++j) {
      ranges[j].min = std::min(ranges[j].min, row[j]);
      ranges[j].max = std::max(ranges[j].max, row[j]);
    }
  }
  return ranges;
}

namespace {

struct Candidate {
  Vector v;
  double dist = 0.0;
};

void rank_by_distance(std::vector<Candidate>& pool) {
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
}

}  // namespace

Counterfactual generate_counterfactual(const LinearModel& model, const Vector& x,
                                       const GaConfig& config, std::size_t origin_index) {
  config.validate(x.size());
  if (x.size() != model.feature_count())
    throw std::invalid_argument("generate_counterfactual: point/model dimension mismatch");

  const int target = 1 - predict(model, x);
  const std::size_t dims = x.size();
  Rng rng(config.seed);

  auto fresh = [&]() {
    Vector v(dims);
    for (std::size_t j = 0; j < dims; ++j)
      v[j] = rng.uniform(config.feature_ranges[j].min, config.feature_ranges[j].max);
    return v;
  };

  Counterfactual best;
  best.origin_index = origin_index;
  auto record = [&](const Candidate& c) {
    if (!best.valid || c.dist < best.distance) {
      best.valid = true;
      best.distance = c.dist;
      best.c_star = c.v;
    }
  };
  auto keep_valid = [&](std::vector<Vector>&& pool) {
    std::vector<Candidate> valid;
    valid.reserve(pool.size());
    for (Vector& v : pool) {
      if (predict(model, v) != target) continue;
      const double d = distance(x, v, config.metric);
      if (d <= 0.0) continue;  // coincides with x, reject
      valid.push_back({std::move(v), d});
    }
    return valid;
  };

  std::vector<Vector> elites;
  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    std::vector<Vector> pool = std::move(elites);
    elites.clear();
    pool.reserve(config.population_size);
    while (pool.size() < config.population_size) pool.push_back(fresh());

    std::vector<Candidate> survivors = keep_valid(std::move(pool));
    for (const Candidate& c : survivors) record(c);

    // Mutation: one uniformly chosen feature is redrawn within its range.
    for (Candidate& c : survivors) {
      if (rng.uniform01() < config.mutation_probability) {
        const std::size_t j = rng.uniform_index(dims);
        c.v[j] = rng.uniform(config.feature_ranges[j].min, config.feature_ranges[j].max);
        c.dist = distance(x, c.v, config.metric);
      }
    }

    // Crossover between adjacent fitness ranks.
    rank_by_distance(survivors);
    for (std::size_t i = 0; i + 1 < survivors.size(); i += 2) {
      if (rng.uniform01() < config.crossover_probability) {
        for (std::size_t j = 0; j < dims; ++j)
          if (rng.uniform01() < 0.5) std::swap(survivors[i].v[j], survivors[i + 1].v[j]);
      }
    }

    std::vector<Vector> varied;
    varied.reserve(survivors.size());
    for (Candidate& c : survivors) varied.push_back(std::move(c.v));
    std::vector<Candidate> retained = keep_valid(std::move(varied));
    rank_by_distance(retained);
    if (retained.size() > config.retained_after_selection)
      retained.resize(config.retained_after_selection);
    for (const Candidate& c : retained) record(c);

    best.best_distance_trace.push_back(best.valid
                                           ? best.distance
                                           : std::numeric_limits<double>::quiet_NaN());

    const std::size_t carry = std::min(config.retained_for_next_generation, retained.size());
    elites.reserve(carry);
    for (std::size_t i = 0; i < carry; ++i) elites.push_back(std::move(retained[i].v));
  }

  best.generations_run = config.generations;
  return best;
}

Counterfactual oracle_projection(const LinearModel& model, const Vector& x,
                                 std::size_t origin_index) {
  const double signed_dist = signed_boundary_distance(model, x);
  double norm = 0.0;
  for (double w : model.weights) norm += w * w;
  norm = std::sqrt(norm);

  const int origin_class = predict(model, x);
  const double direction = signed_dist >= 0.0 ? 1.0 : -1.0;

  Counterfactual result;
  result.origin_index = origin_index;
  result.generations_run = 0;

  double eps = std::max(1e-6 * std::abs(signed_dist), 1e-9);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Vector c(x.size());
    const double step = signed_dist + direction * eps;
    for (std::size_t j = 0; j < x.size(); ++j)
      c[j] = x[j] - step * model.weights[j] / norm;
    if (predict(model, c) != origin_class) {
      result.c_star = std::move(c);
      result.distance = std::abs(signed_dist) + eps;
      result.valid = true;
      return result;
    }
    eps *= 10.0;  // rounding ate the nudge; push harder
  }
  return result;
}

std::vector<Counterfactual> generate_all(const LinearModel& model, const Matrix& features,
                                         int target_class, const GaConfig& config) {
  GaConfig point_config = config;
  if (point_config.feature_ranges.empty() && !features.empty())
    point_config.feature_ranges = ranges_from(features);

  std::vector<Counterfactual> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (predict(model, features[i]) != target_class) continue;
    point_config.seed = derive_seed(config.seed, i);
    out.push_back(generate_counterfactual(model, features[i], point_config, i));
  }
  return out;
}

std::vector<Counterfactual> generate_all(const LinearModel& model, const Dataset& dataset,
                                         int target_class, const GaConfig& config) {
  return generate_all(model, split(dataset).features, target_class, config);
}

void write_dump(const std::vector<Counterfactual>& counterfactuals,
                const Matrix& origins, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_dump: cannot open '" + path + "' for writing");
  for (const Counterfactual& cf : counterfactuals) {
    nlohmann::json record;
    record["origin_index"] = cf.origin_index;
    record["origin"] = origins.at(cf.origin_index);
    record["c_star"] = cf.c_star;
    record["distance"] = cf.valid ? nlohmann::json(cf.distance) : nlohmann::json(nullptr);
    record["generations_run"] = cf.generations_run;
    record["valid"] = cf.valid;
    out << record.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write_dump: write to '" + path + "' failed");
}

std::vector<DumpRecord> read_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_dump: cannot open '" + path + "'");
  std::vector<DumpRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("read_dump: " + path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
    DumpRecord rec;
    rec.counterfactual.origin_index = doc.at("origin_index").get<std::size_t>();
    rec.counterfactual.c_star = doc.at("c_star").get<Vector>();
    rec.counterfactual.valid = doc.at("valid").get<bool>();
    rec.counterfactual.generations_run = doc.at("generations_run").get<std::size_t>();
    rec.counterfactual.distance = doc.at("distance").is_null()
                                      ? std::numeric_limits<double>::quiet_NaN()
                                      : doc.at("distance").get<double>();
    rec.origin = doc.at("origin").get<Vector>();
    records.push_back(std::move(rec));
  }
  return records;
}

DistanceMetric metric_from_name(const std::string& name) {
  if (name == "euclidean") return DistanceMetric::euclidean;
  if (name == "manhattan") return DistanceMetric::manhattan;
  throw std::invalid_argument("unknown distance metric '" + name + "'");
}

std::string metric_name(DistanceMetric metric) {
  return metric == DistanceMetric::euclidean ? "euclidean" : "manhattan";
}

}  // namespace cfaudit
