#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <unistd.h>

#include "firenav/qnet.hpp"
#include "firenav/rng.hpp"

namespace firenav::testing {

inline std::shared_ptr<const Frame> random_frame(int window, Rng& rng) {
  static constexpr double kLevels[] = {kFreeIntensity, kGoalIntensity, kObstacleIntensity,
                                       kFireIntensity};
  auto f = std::make_shared<Frame>();
  f->size = window;
  f->pixels.resize(std::size_t(window) * window);
  for (double& p : f->pixels) p = kLevels[rng.below(4)];
  return f;
}

inline Observation random_observation(int window, Rng& rng) {
  Observation o;
  for (auto& f : o.frames) f = random_frame(window, rng);
  return o;
}

inline Observation constant_observation(int window, double value) {
  auto f = std::make_shared<Frame>();
  f->size = window;
  f->pixels.assign(std::size_t(window) * window, value);
  return Observation::padded(f);
}

// Mean squared error of the taken actions, computed from forward passes only.
inline double batch_loss(const QNetwork& net, const std::vector<TrainingExample>& batch) {
  double sum = 0.0;
  for (const TrainingExample& ex : batch) {
    const QValues q = net.forward(*ex.observation);
    sum += squared_error(q[index_of(ex.action)], ex.target);
  }
  return sum / double(batch.size());
}

// |a - n| / max(|a|, |n|, floor)
inline double relative_error(double analytic, double numeric, double floor = 1e-8) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;  // entries whose perturbation flipped a rectifier
};

// Central differences on the entries `pick` selects from each parameter block.
// An entry is skipped when the +-step changes which hidden units are active
// for some example, since the loss is not differentiable across that kink.
template <class Pick>
GradientCheck finite_difference_check(QNetwork& net, const std::vector<TrainingExample>& batch,
                                      double step, Pick pick) {
  GradientCheck out;
  const Gradients g = net.backward(batch).gradients;

  std::vector<const Observation*> obs;
  for (const TrainingExample& ex : batch) obs.push_back(ex.observation);
  const Eigen::MatrixXd x = net.features(obs);
  auto active = [&] {
    const Parameters& p = net.parameters();
    return Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>(
        ((p.w1 * x).colwise() + p.b1).array() > 0.0);
  };

  auto probe = [&](double& slot, double analytic) {
    const double saved = slot;
    slot = saved + step;
    const auto mask_plus = active();
    const double plus = batch_loss(net, batch);
    slot = saved - step;
    const auto mask_minus = active();
    const double minus = batch_loss(net, batch);
    slot = saved;
    if ((mask_plus != mask_minus).any()) {
      ++out.skipped_kinks;
      return;
    }
    const double numeric = (plus - minus) / (2.0 * step);
    out.max_relative_error = std::max(out.max_relative_error, relative_error(analytic, numeric));
    ++out.checked;
  };

  Parameters& p = net.mutable_parameters();
  for (Eigen::Index i = 0; i < p.w1.size(); ++i)
    if (pick(0, i)) probe(p.w1.data()[i], g.w1.data()[i]);
  for (Eigen::Index i = 0; i < p.b1.size(); ++i)
    if (pick(1, i)) probe(p.b1.data()[i], g.b1.data()[i]);
  for (Eigen::Index i = 0; i < p.w2.size(); ++i)
    if (pick(2, i)) probe(p.w2.data()[i], g.w2.data()[i]);
  for (Eigen::Index i = 0; i < p.b2.size(); ++i)
    if (pick(3, i)) probe(p.b2.data()[i], g.b2.data()[i]);
  return out;
}

inline std::vector<TrainingExample> random_batch(const std::vector<Observation>& obs, Rng& rng,
                                                 double target_scale = 10.0) {
  std::vector<TrainingExample> batch;
  for (const Observation& o : obs)
    batch.push_back({&o, kActions[rng.below(kNumActions)],
                     target_scale * (2.0 * rng.uniform() - 1.0)});
  return batch;
}

inline std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("firenav_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace firenav::testing
