#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "firenav/baselines.hpp"
#include "firenav/qnet.hpp"

namespace firenav {

enum class TrialOutcome { ReachedGoal, Burned, TimedOut, NoPath };
std::string_view trial_outcome_name(TrialOutcome o);
TrialOutcome to_trial_outcome(Outcome o);

struct EpisodeResult {
  TrialOutcome outcome = TrialOutcome::TimedOut;
  int steps = 0;
  double total_return = 0.0;
};

// A policy that can be run on an environment from its current state until the
// episode ends.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string id() const = 0;
  // `rng` is private to the trial.
  virtual EpisodeResult run(FireEnv& env, Rng& rng) const = 0;
};

// Greedy policy of a trained network. The network is shared read-only.
class DqnAgent final : public Agent {
 public:
  explicit DqnAgent(std::shared_ptr<const QNetwork> net, std::string id = "dqn");
  std::string id() const override { return id_; }
  EpisodeResult run(FireEnv& env, Rng& rng) const override;

 private:
  std::shared_ptr<const QNetwork> net_;
  std::string id_;
};

// Plan once on the t=0 snapshot and execute open-loop.
class StaticPlanAgent final : public Agent {
 public:
  explicit StaticPlanAgent(Planner planner);
  std::string id() const override;
  EpisodeResult run(FireEnv& env, Rng& rng) const override;

 private:
  Planner planner_;
};

// Plan again before every step.
class ReplanningAgent final : public Agent {
 public:
  explicit ReplanningAgent(Planner planner);
  std::string id() const override;
  EpisodeResult run(FireEnv& env, Rng& rng) const override;

 private:
  Planner planner_;
};

class RandomWalkAgent final : public Agent {
 public:
  std::string id() const override { return "random"; }
  EpisodeResult run(FireEnv& env, Rng& rng) const override;
};

// Fully informed closed-loop controller: before every step it takes the first
// action of the shortest fire-free action sequence on the current grid. Used
// as the scripted demonstrator and as a reference in sweeps.
class OracleAgent final : public Agent {
 public:
  std::string id() const override { return "oracle"; }
  EpisodeResult run(FireEnv& env, Rng& rng) const override;
  // The action the oracle takes in `env`; Left when no fire-free path exists.
  static Action choose(const FireEnv& env);
};

struct TrialReport {
  std::string agent;
  std::string scenario;  // scenario hash in base 10
  double coverage = 0.0;
  std::uint64_t seed = 0;
  TrialOutcome outcome = TrialOutcome::TimedOut;
  int steps = 0;
  double total_return = 0.0;
};

// Seeds fires to `coverage` with the trial seed, then runs the agent.
TrialReport run_trial(const Agent& agent, const Scenario& scenario, double coverage,
                      std::uint64_t seed, const EnvOptions& options = {});

// One trial per goal; goals are distinct open cells reachable from the start,
// sampled per seed. Throws ValidationError when there are too few.
std::vector<TrialReport> target_battery(const Agent& agent, const Scenario& base, int n_targets,
                                        std::uint64_t seed, double coverage = 0.0,
                                        const EnvOptions& options = {});

// Builds the scenario for one trial from its seed.
using ScenarioSampler = std::function<Scenario(std::uint64_t seed)>;

struct SweepRow {
  double coverage = 0.0;
  std::string agent;
  int trials = 0;
  int successes = 0;
  double success_rate() const { return trials ? double(successes) / trials : 0.0; }
};

struct SweepResult {
  std::vector<SweepRow> rows;       // level-major, agents in the given order
  std::vector<TrialReport> trials;  // level, then trial, then agent
  const SweepRow* row(double coverage, const std::string& agent) const;
};

struct SweepOptions {
  std::vector<double> levels;
  int trials = 200;
  std::uint64_t seed = 0;
  EnvOptions env;
  int workers = 1;  // parallel and serial runs give identical results
};

// Every agent sees the same scenario and fire seed in trial i of a level.
SweepResult coverage_sweep(std::span<const Agent* const> agents, const ScenarioSampler& sampler,
                           const SweepOptions& options);

// Seed of trial `trial` at level `level`.
std::uint64_t trial_seed(std::uint64_t master, std::size_t level, std::size_t trial);

// "lo:hi:step", inclusive of hi; every level must lie in [0, 0.9].
std::vector<double> parse_levels(std::string_view range);

std::string format_sweep_csv(const SweepResult& s);
std::string format_trials_csv(const SweepResult& s);
std::string format_trials_csv(std::span<const TrialReport> trials);

// Benchmark families.
// 8x8, static, about 15% walls, start and goal drawn per seed.
Scenario static_benchmark(std::uint64_t seed);
// Open 16x16 with spread 0.05 and ignition 0.002. The start is uniform; the
// goal is uniform over cells at Chebyshev distance <= 4 (inside the default
// 9x9 view) and Manhattan distance >= 2.
inline constexpr int kDynamicGoalRadius = 4;
Scenario dynamic_benchmark(std::uint64_t seed);

}  // namespace firenav
