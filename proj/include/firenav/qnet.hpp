#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>

#include <Eigen/Dense>

#include "firenav/env.hpp"

namespace firenav {

struct QNetShape {
  int window = 9;          // k: frames are k x k
  int feature_width = 64;  // d_f: per-frame projected features
  int hidden = 512;
  int actions = kNumActions;

  int frame_pixels() const { return window * window; }
  int input_width() const { return kFrameStack * feature_width; }
  friend bool operator==(const QNetShape&, const QNetShape&) = default;
};

// Frozen random linear map from a k*k frame to d_f features. Regenerated
// bit-identically from (window, feature_width, seed).
class FeatureProjector {
 public:
  FeatureProjector(int window, int feature_width, std::uint64_t seed);

  int window() const { return window_; }
  int feature_width() const { return feature_width_; }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  int window_;
  int feature_width_;
  std::uint64_t seed_;
  Eigen::MatrixXd matrix_;  // feature_width x window^2
};

// The trainable part: relu(W1 x + b1) -> W2 h + b2.
struct Parameters {
  Eigen::MatrixXd w1;  // hidden x input_width
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // actions x hidden
  Eigen::VectorXd b2;

  static Parameters zeros(const QNetShape& shape);
  std::size_t count() const { return std::size_t(w1.size() + b1.size() + w2.size() + b2.size()); }
  friend bool operator==(const Parameters& a, const Parameters& b);
};
using Gradients = Parameters;
using ParameterSnapshot = Parameters;

using QValues = std::array<double, kNumActions>;

// One regression example for the head: only the q-value of `action` is fit.
struct TrainingExample {
  const Observation* observation = nullptr;
  Action action = Action::Forward;
  double target = 0.0;
};

struct BackwardResult {
  Gradients gradients;
  double loss = 0.0;  // mean squared error over the batch
};

inline double squared_error(double q_pred, double target) {
  const double d = target - q_pred;
  return d * d;
}

class QNetwork {
 public:
  // Projector from derive_seed(seed, 1); Glorot-uniform weights from
  // derive_seed(seed, 2); zero biases.
  QNetwork(QNetShape shape, std::uint64_t seed);
  QNetwork(std::shared_ptr<const FeatureProjector> projector, Parameters params);

  const QNetShape& shape() const { return shape_; }
  const FeatureProjector& projector() const { return *projector_; }
  std::shared_ptr<const FeatureProjector> shared_projector() const { return projector_; }

  QValues forward(const Observation& obs) const;
  // actions x batch
  Eigen::MatrixXd forward_batch(std::span<const Observation* const> batch) const;
  // input_width x batch; frame i of a stack fills rows [i*d_f, (i+1)*d_f).
  // Per-frame projections are memoized on the frames.
  Eigen::MatrixXd features(std::span<const Observation* const> batch) const;

  // Gradient of the mean squared error w.r.t. W1, b1, W2, b2. The projector
  // receives no gradient. `batch` must not be empty.
  BackwardResult backward(std::span<const TrainingExample> batch) const;

  const Parameters& parameters() const { return params_; }
  Parameters& mutable_parameters() { return params_; }
  ParameterSnapshot snapshot() const { return params_; }
  void load(const ParameterSnapshot& snapshot);

 private:
  const std::vector<double>& frame_features(const Frame& frame) const;

  QNetShape shape_;
  std::shared_ptr<const FeatureProjector> projector_;
  Parameters params_;
};

struct RmsPropConfig {
  double learning_rate = 1e-4;
  double decay = 0.99;
  double epsilon = 1e-8;
};

// ms <- decay*ms + (1-decay)*g^2;  p <- p - lr * g / (sqrt(ms) + eps)
class RmsProp {
 public:
  RmsProp(const QNetShape& shape, RmsPropConfig config = {});

  void apply(Parameters& params, const Gradients& grads);

  const RmsPropConfig& config() const { return config_; }
  const Parameters& mean_square() const { return mean_square_; }
  Parameters& mutable_mean_square() { return mean_square_; }

 private:
  RmsPropConfig config_;
  Parameters mean_square_;
};

// Binary checkpoint, little-endian:
//   "QNET" | u32 version | u32 window, feature_width, hidden, actions |
//   u64 projector seed | f64 W1, b1, W2, b2 (row-major) |
//   f64 RMSProp accumulators for W1, b1, W2, b2
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointHeader {
  std::uint32_t version = 0;
  QNetShape shape;
  std::uint64_t projector_seed = 0;
};

void save_checkpoint(const std::filesystem::path& path, const QNetwork& net, const RmsProp& opt);
std::string encode_checkpoint(const QNetwork& net, const RmsProp& opt);

struct Checkpoint {
  QNetwork net;
  RmsProp optimizer;
};
// Throws CheckpointError on a bad magic, version, size or truncation.
Checkpoint load_checkpoint(const std::filesystem::path& path, RmsPropConfig config = {});
Checkpoint decode_checkpoint(std::string_view bytes, RmsPropConfig config = {});
CheckpointHeader read_checkpoint_header(std::string_view bytes);

std::size_t argmax_lowest(const QValues& q);

}  // namespace firenav
