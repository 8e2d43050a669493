#include "cfaudit/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "cfaudit/rng.hpp"

namespace cfaudit {

namespace {

double dot_score(const LinearModel& model, const Vector& x) {
  if (x.size() != model.feature_count())
    throw std::invalid_argument("classifier: point has " + std::to_string(x.size()) +
                                " features, model expects " +
                                std::to_string(model.feature_count()));
  double z = model.bias;
  for (std::size_t j = 0; j < x.size(); ++j) z += model.weights[j] * x[j];
  return z;
}

void check_training_inputs(const Matrix& features, const std::vector<int>& labels) {
  if (features.empty()) throw std::invalid_argument("train: empty dataset");
  if (features.size() != labels.size())
    throw std::invalid_argument("train: " + std::to_string(features.size()) + " rows but " +
                                std::to_string(labels.size()) + " labels");
  const std::size_t width = features.front().size();
  if (width == 0) throw std::invalid_argument("train: rows have no features");
  for (const Vector& row : features)
    if (row.size() != width) throw std::invalid_argument("train: ragged feature matrix");
  bool saw[2] = {false, false};
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("train: labels must be 0 or 1");
    saw[y] = true;
  }
  if (!saw[0] || !saw[1])
    throw std::invalid_argument("train: both classes must be present in the labels");
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_loss(const LinearModel& model, const Matrix& features,
                const std::vector<int>& labels) {
  // loss_i = max(z, 0) - z*y + log(1 + exp(-|z|))
  double total = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double z = dot_score(model, features[i]);
    total += std::max(z, 0.0) - z * labels[i] + std::log1p(std::exp(-std::abs(z)));
  }
  return total / static_cast<double>(features.size());
}

BceGradient bce_gradient(const LinearModel& model, const Matrix& features,
                         const std::vector<int>& labels) {
  BceGradient grad;
  grad.weights.assign(model.feature_count(), 0.0);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double err = sigmoid(dot_score(model, features[i])) - labels[i];
    for (std::size_t j = 0; j < features[i].size(); ++j) grad.weights[j] += err * features[i][j];
    grad.bias += err;
  }
  const double n = static_cast<double>(features.size());
  for (double& g : grad.weights) g /= n;
  grad.bias /= n;
  return grad;
}

LinearModel train(const Matrix& features, const std::vector<int>& labels,
                  const TrainConfig& config, TrainTrace* trace) {
  check_training_inputs(features, labels);
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be positive");
  if (config.iterations <= 0) throw std::invalid_argument("train: iterations must be positive");

  LinearModel model;
  model.weights.assign(features.front().size(), 0.0);
  if (config.random_init) {
    Rng rng(config.seed);
    for (double& w : model.weights) w = rng.uniform(-config.init_scale, config.init_scale);
    model.bias = rng.uniform(-config.init_scale, config.init_scale);
  }

  const std::size_t n = features.size();
  const std::size_t batch = config.batch_size > 0
                                ? std::min<std::size_t>(config.batch_size, n)
                                : n;
  const std::size_t num_batches = (n + batch - 1) / batch;

  Matrix slice;
  std::vector<int> slice_labels;
  if (trace) trace->loss.clear();

  for (int iter = 0; iter < config.iterations; ++iter) {
    const Matrix* step_x = &features;
    const std::vector<int>* step_y = &labels;
    if (batch < n) {
      const std::size_t begin = (static_cast<std::size_t>(iter) % num_batches) * batch;
      const std::size_t end = std::min(begin + batch, n);
      slice.assign(features.begin() + begin, features.begin() + end);
      slice_labels.assign(labels.begin() + begin, labels.begin() + end);
      step_x = &slice;
      step_y = &slice_labels;
    }
    const BceGradient grad = bce_gradient(model, *step_x, *step_y);
    for (std::size_t j = 0; j < model.weights.size(); ++j)
      model.weights[j] -= config.learning_rate * grad.weights[j];
    model.bias -= config.learning_rate * grad.bias;

    const double loss = bce_loss(model, features, labels);
    if (!std::isfinite(loss))
      throw std::runtime_error("train: loss became non-finite at iteration " +
                               std::to_string(iter + 1) +
                               " (learning rate " + std::to_string(config.learning_rate) + ")");
    if (trace) trace->loss.push_back(loss);
  }
  return model;
}

double predict_proba(const LinearModel& model, const Vector& x) {
  return sigmoid(dot_score(model, x));
}

int predict(const LinearModel& model, const Vector& x) {
  return dot_score(model, x) >= 0.0 ? 1 : 0;
}

std::vector<int> predict_all(const LinearModel& model, const Matrix& features) {
  std::vector<int> out;
  out.reserve(features.size());
  for (const Vector& row : features) out.push_back(predict(model, row));
  return out;
}

double accuracy(const LinearModel& model, const Matrix& features,
                const std::vector<int>& labels) {
  if (features.empty()) throw std::invalid_argument("accuracy: empty input");
  if (features.size() != labels.size())
    throw std::invalid_argument("accuracy: rows and labels differ in length");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i)
    if (predict(model, features[i]) == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(features.size());
}

double signed_boundary_distance(const LinearModel& model, const Vector& x) {
  double norm_sq = 0.0;
  for (double w : model.weights) norm_sq += w * w;
  if (norm_sq == 0.0)
    throw std::invalid_argument("signed_boundary_distance: zero weight vector");
  return dot_score(model, x) / std::sqrt(norm_sq);
}

void save_model(const LinearModel& model, const TrainConfig& config,
                const std::string& path) {
  nlohmann::json doc;
  doc["weights"] = model.weights;
  doc["bias"] = model.bias;
  doc["feature_names"] = model.feature_names;
  doc["train_config"] = {{"learning_rate", config.learning_rate},
                         {"iterations", config.iterations},
                         {"seed", config.seed},
                         {"random_init", config.random_init},
                         {"init_scale", config.init_scale},
                         {"batch_size", config.batch_size}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("save_model: write to '" + path + "' failed");
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_model: '" + path + "' is not valid JSON: " + e.what());
  }
  ModelFile mf;
  mf.model.weights = doc.at("weights").get<Vector>();
  mf.model.bias = doc.at("bias").get<double>();
  mf.model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  const auto& tc = doc.at("train_config");
  mf.config.learning_rate = tc.at("learning_rate").get<double>();
  mf.config.iterations = tc.at("iterations").get<int>();
  mf.config.seed = tc.at("seed").get<std::uint64_t>();
  mf.config.random_init = tc.at("random_init").get<bool>();
  mf.config.init_scale = tc.at("init_scale").get<double>();
  mf.config.batch_size = tc.at("batch_size").get<int>();
  for (double w : mf.model.weights)
    if (!std::isfinite(w)) throw std::runtime_error("load_model: non-finite weight in '" + path + "'");
  if (!std::isfinite(mf.model.bias))
    throw std::runtime_error("load_model: non-finite bias in '" + path + "'");
  return mf;
}

}  // namespace cfaudit
