#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "firenav/episode_log.hpp"
#include "firenav/qnet.hpp"
#include "firenav/replay.hpp"

namespace firenav {

struct TrainConfig {
  int episodes = 1000000;           // M; the frame budget usually ends training first
  int max_steps = 0;                // T per episode; 0 defers to the environment
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.1;
  long epsilon_decay_frames = 5000;
  int batch = 32;
  double learning_rate = 1e-4;
  std::size_t replay_capacity = kDefaultReplayCapacity;
  long total_frame_budget = 100000;
  int target_sync_period = 500;     // gradient updates between target refreshes
  std::size_t min_replay_before_learning = 500;
  int eval_every = 0;               // episodes between greedy evaluations; 0 = never
  // Finish with the parameters that scored the highest greedy evaluation return.
  bool keep_best = false;
  std::uint64_t seed = 0;

  // Throws ValidationError when an invariant is violated.
  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Linear from epsilon_start at frame 0 to epsilon_end at epsilon_decay_frames,
// constant afterwards.
double epsilon_at(long frame, const TrainConfig& cfg);

// With probability epsilon a uniformly random action, otherwise the argmax of
// the network (lowest index wins ties).
Action select_action(const QNetwork& net, const Observation& obs, double epsilon, Rng& rng);
Action greedy_action(const QValues& q);

// r for terminal transitions, r + gamma * max_a' Q_target(s', a') otherwise.
double compute_target(const Experience& e, const QNetwork& target_net, double gamma);

struct EpisodeStats {
  int episode = 0;
  long frames = 0;         // global frame counter when the episode ended
  double total_reward = 0.0;
  int length = 0;
  Outcome outcome = Outcome::Ongoing;  // Ongoing when cut short by T or the budget
  double epsilon = 0.0;    // at the last step
  double mean_loss = 0.0;  // over the updates made during the episode; 0 if none
};

struct EvaluationRecord {
  int episode = 0;
  long frames = 0;
  Outcome outcome = Outcome::Ongoing;
  int length = 0;
  double total_reward = 0.0;
};

struct TrainStats {
  std::vector<EpisodeStats> episodes;
  std::vector<EvaluationRecord> evaluations;
  long frames = 0;
  long updates = 0;
  // Frames seen before a greedy evaluation first reached the goal.
  std::optional<long> frames_to_first_greedy_success;
  // Index into `evaluations` of the parameters kept by keep_best.
  std::optional<std::size_t> best_evaluation;
};

std::string format_stats_csv(const TrainStats& stats);
void write_stats_csv(const std::filesystem::path& path, const TrainStats& stats);

// Builds the environment for an episode; `seed` is derived from the training
// seed and the episode index.
using EnvironmentFactory = std::function<std::unique_ptr<Environment>(std::uint64_t seed, int episode)>;

struct TrainHooks {
  // Environment for greedy evaluations; defaults to the training factory with a fixed seed.
  EnvironmentFactory eval_factory;
  // Called after every episode; returning true stops training.
  std::function<bool(const TrainStats&)> stop;
};

struct RolloutResult {
  Outcome outcome = Outcome::Ongoing;
  std::vector<StepRecord> steps;
  double total_reward = 0.0;

  int length() const { return int(steps.size()); }
  EpisodeRecord as_episode(std::uint64_t scenario_hash, std::uint64_t seed, double coverage) const;
};

// Greedy policy until the episode ends or `max_steps` steps were taken.
RolloutResult greedy_rollout(const QNetwork& net, Environment& env, int max_steps);

class Trainer {
 public:
  Trainer(TrainConfig cfg, QNetShape shape);

  // Self-play until the episode or frame budget is exhausted.
  TrainStats run(const EnvironmentFactory& factory, const TrainHooks& hooks = {});

  ReplayMemory& replay() { return replay_; }
  const QNetwork& net() const { return net_; }
  QNetwork& mutable_net() { return net_; }
  const QNetwork& target_net() const { return target_; }
  const RmsProp& optimizer() const { return optimizer_; }
  const TrainConfig& config() const { return cfg_; }
  const TrainStats& stats() const { return stats_; }

  // One batched update from replay; returns the batch loss.
  double learn();

 private:
  EpisodeStats run_episode(Environment& env, int episode);

  TrainConfig cfg_;
  QNetwork net_;
  QNetwork target_;
  RmsProp optimizer_;
  ReplayMemory replay_;
  Rng rng_;
  TrainStats stats_;
  std::optional<ParameterSnapshot> best_;
};

struct TrainResult {
  QNetwork net;
  RmsProp optimizer;
  TrainStats stats;
};

TrainResult train(const EnvironmentFactory& factory, const TrainConfig& cfg,
                  const QNetShape& shape = {}, const TrainHooks& hooks = {});

}  // namespace firenav
