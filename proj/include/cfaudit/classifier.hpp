#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfaudit/matrix.hpp"

namespace cfaudit {

struct TrainConfig {
  double learning_rate = 0.001;
  int iterations = 2000;
  std::uint64_t seed = 0;       // used only when random_init is set
  bool random_init = false;     // default: all-zero initialization
  double init_scale = 0.01;     // uniform(-scale, scale) when random_init
  int batch_size = 0;           // 0 = full batch; otherwise consecutive slices
};

/// Logistic-regression parameters; the decision boundary is w.x + b = 0.
struct LinearModel {
  Vector weights;
  double bias = 0.0;
  std::vector<std::string> feature_names;  // optional, set by callers

  std::size_t feature_count() const { return weights.size(); }
};

struct TrainTrace {
  Vector loss;  // BCE after each gradient step
};

/// Numerically stable logistic function; branches on the sign of z so large
/// scores cannot overflow.
double sigmoid(double z);

/// Gradient-descent fit of the binary cross-entropy loss, exactly
/// config.iterations steps. Labels must contain both classes. Throws if the
/// loss ever turns non-finite. Deterministic for identical inputs.
LinearModel train(const Matrix& features, const std::vector<int>& labels,
                  const TrainConfig& config, TrainTrace* trace = nullptr);

double predict_proba(const LinearModel& model, const Vector& x);

/// 1 iff w.x + b >= 0 (probability ties at 0.5 classify as 1).
int predict(const LinearModel& model, const Vector& x);

std::vector<int> predict_all(const LinearModel& model, const Matrix& features);

double accuracy(const LinearModel& model, const Matrix& features,
                const std::vector<int>& labels);

/// (w.x + b) / |w|; the magnitude is the Euclidean distance from x to the
/// decision boundary and the sign matches the predicted class.
double signed_boundary_distance(const LinearModel& model, const Vector& x);

/// Mean binary cross-entropy, computed in log1p form so saturated scores
/// stay finite. Public so tests can difference it against the gradient.
double bce_loss(const LinearModel& model, const Matrix& features,
                const std::vector<int>& labels);

struct BceGradient {
  Vector weights;
  double bias = 0.0;
};

BceGradient bce_gradient(const LinearModel& model, const Matrix& features,
                         const std::vector<int>& labels);

struct ModelFile {
  LinearModel model;
  TrainConfig config;
};

/// JSON persistence; finite parameter values round-trip bit-exactly.
void save_model(const LinearModel& model, const TrainConfig& config,
                const std::string& path);
ModelFile load_model(const std::string& path);

}  // namespace cfaudit
