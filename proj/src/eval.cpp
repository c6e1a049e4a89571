#include "firenav/eval.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "firenav/episode_log.hpp"
#include "firenav/errors.hpp"
#include "firenav/text.hpp"

namespace firenav {

std::string_view trial_outcome_name(TrialOutcome o) {
  switch (o) {
    case TrialOutcome::ReachedGoal: return "ReachedGoal";
    case TrialOutcome::Burned: return "Burned";
    case TrialOutcome::TimedOut: return "TimedOut";
    case TrialOutcome::NoPath: return "NoPath";
  }
  return "?";
}

TrialOutcome to_trial_outcome(Outcome o) {
  switch (o) {
    case Outcome::ReachedGoal: return TrialOutcome::ReachedGoal;
    case Outcome::Burned: return TrialOutcome::Burned;
    default: return TrialOutcome::TimedOut;
  }
}

namespace {

EpisodeResult from_execution(const ExecutionResult& r) {
  if (r.no_path) return {TrialOutcome::NoPath, 0, 0.0};
  return {to_trial_outcome(r.outcome), r.steps, r.total_reward};
}

template <class Choose>
EpisodeResult drive(FireEnv& env, Choose choose) {
  EpisodeResult out;
  while (!env.terminal()) {
    const StepResult r = env.step(choose());
    ++out.steps;
    out.total_return += r.reward;
  }
  out.outcome = to_trial_outcome(env.outcome());
  return out;
}

}  // namespace

DqnAgent::DqnAgent(std::shared_ptr<const QNetwork> net, std::string id)
    : net_(std::move(net)), id_(std::move(id)) {}

EpisodeResult DqnAgent::run(FireEnv& env, Rng&) const {
  return drive(env, [&] { return kActions[argmax_lowest(net_->forward(env.observation()))]; });
}

StaticPlanAgent::StaticPlanAgent(Planner planner) : planner_(planner) {}
std::string StaticPlanAgent::id() const { return std::string(planner_name(planner_)); }
EpisodeResult StaticPlanAgent::run(FireEnv& env, Rng&) const {
  return from_execution(execute_static_plan(env, planner_));
}

ReplanningAgent::ReplanningAgent(Planner planner) : planner_(planner) {}
std::string ReplanningAgent::id() const { return "replan-" + std::string(planner_name(planner_)); }
EpisodeResult ReplanningAgent::run(FireEnv& env, Rng&) const {
  return from_execution(execute_replanning(env, planner_));
}

EpisodeResult RandomWalkAgent::run(FireEnv& env, Rng& rng) const {
  return drive(env, [&] { return kActions[rng.below(kNumActions)]; });
}

Action OracleAgent::choose(const FireEnv& env) {
  const auto seq = shortest_action_sequence(env.grid(), env.pose(), env.scenario().goal);
  return seq && !seq->empty() ? seq->front() : Action::Left;
}

EpisodeResult OracleAgent::run(FireEnv& env, Rng&) const {
  return drive(env, [&] { return choose(env); });
}

TrialReport run_trial(const Agent& agent, const Scenario& scenario, double coverage,
                      std::uint64_t seed, const EnvOptions& options) {
  FireEnv env = episode_start(scenario, options, seed, coverage);
  Rng rng(derive_seed(seed, 0xa9e7));
  const EpisodeResult r = agent.run(env, rng);
  return {agent.id(), std::to_string(scenario_hash(scenario)), coverage, seed, r.outcome, r.steps,
          r.total_return};
}

std::vector<TrialReport> target_battery(const Agent& agent, const Scenario& base, int n_targets,
                                        std::uint64_t seed, double coverage,
                                        const EnvOptions& options) {
  if (n_targets < 0) throw ValidationError("n_targets must be >= 0");
  Grid open = base.grid;
  open.at(base.goal).kind = CellKind::Free;
  std::vector<Coord> candidates;
  for (Coord c : reachable_cells(open, base.start, /*fire_blocks=*/false))
    if (c != base.start && open.at(c).kind == CellKind::Free) candidates.push_back(c);
  if (int(candidates.size()) < n_targets)
    throw ValidationError("only " + std::to_string(candidates.size()) + " candidate targets for " +
                          std::to_string(n_targets));
  Rng rng(seed);
  for (std::size_t i = 0; i < std::size_t(n_targets); ++i)
    std::swap(candidates[i], candidates[i + rng.below(candidates.size() - i)]);

  std::vector<TrialReport> out;
  for (int i = 0; i < n_targets; ++i) {
    Scenario s = base;
    s.grid = open;
    s.goal = candidates[std::size_t(i)];
    s.grid.at(s.goal).kind = CellKind::Goal;
    out.push_back(run_trial(agent, s, coverage, derive_seed(seed, std::uint64_t(i) + 1), options));
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t level, std::size_t trial) {
  return derive_seed(derive_seed(master, level), trial);
}

const SweepRow* SweepResult::row(double coverage, const std::string& agent) const {
  for (const SweepRow& r : rows)
    if (std::abs(r.coverage - coverage) < 1e-9 && r.agent == agent) return &r;
  return nullptr;
}

SweepResult coverage_sweep(std::span<const Agent* const> agents, const ScenarioSampler& sampler,
                           const SweepOptions& options) {
  for (double level : options.levels)
    if (!(level >= 0.0 && level <= 0.9)) throw ValidationError("coverage levels must lie in [0, 0.9]");
  if (options.trials < 0) throw ValidationError("trials must be >= 0");

  const std::size_t n_agents = agents.size();
  const std::size_t per_level = std::size_t(options.trials) * n_agents;
  const std::size_t total = options.levels.size() * per_level;
  std::vector<TrialReport> reports(total);

  auto run_one = [&](std::size_t index) {
    const std::size_t level = index / per_level;
    const std::size_t trial = (index % per_level) / n_agents;
    const std::size_t agent = index % n_agents;
    const std::uint64_t seed = trial_seed(options.seed, level, trial);
    const Scenario scenario = sampler(seed);
    reports[index] = run_trial(*agents[agent], scenario, options.levels[level], seed, options.env);
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < total; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) run_one(i);
      });
    for (std::thread& t : pool) t.join();
  }

  SweepResult out;
  out.trials = std::move(reports);
  for (std::size_t level = 0; level < options.levels.size(); ++level)
    for (std::size_t a = 0; a < n_agents; ++a) {
      SweepRow row{options.levels[level], agents[a]->id(), options.trials, 0};
      for (int t = 0; t < options.trials; ++t)
        if (out.trials[level * per_level + std::size_t(t) * n_agents + a].outcome ==
            TrialOutcome::ReachedGoal)
          ++row.successes;
      out.rows.push_back(row);
    }
  return out;
}

std::vector<double> parse_levels(std::string_view range) {
  const std::string text(range);
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i)
    if (i == text.size() || text[i] == ':') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  auto num = [](const std::string& s) { return parse_number<double>(s, 0, "coverage level"); };
  std::vector<double> levels;
  if (parts.size() == 1) {
    levels.push_back(num(parts[0]));
  } else if (parts.size() == 3) {
    const double lo = num(parts[0]), hi = num(parts[1]), step = num(parts[2]);
    if (!(step > 0.0) || hi < lo) throw ValidationError("levels must be lo:hi:step with step > 0 and hi >= lo");
    const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) levels.push_back(std::round((lo + double(i) * step) * 1e9) / 1e9);
  } else {
    throw ValidationError("levels must be lo:hi:step or a single value");
  }
  for (double l : levels)
    if (!(l >= 0.0 && l <= 0.9)) throw ValidationError("coverage levels must lie in [0, 0.9]");
  return levels;
}

std::string format_sweep_csv(const SweepResult& s) {
  std::string out = "coverage,agent,trials,successes,success_rate\n";
  for (const SweepRow& r : s.rows)
    out += format_double(r.coverage) + ',' + r.agent + ',' + std::to_string(r.trials) + ',' +
           std::to_string(r.successes) + ',' + format_double(r.success_rate()) + '\n';
  return out;
}

std::string format_trials_csv(std::span<const TrialReport> trials) {
  std::string out = "agent,scenario,coverage,seed,outcome,steps,return\n";
  for (const TrialReport& t : trials)
    out += t.agent + ',' + t.scenario + ',' + format_double(t.coverage) + ',' +
           std::to_string(t.seed) + ',' + std::string(trial_outcome_name(t.outcome)) + ',' +
           std::to_string(t.steps) + ',' + format_double(t.total_return) + '\n';
  return out;
}

std::string format_trials_csv(const SweepResult& s) { return format_trials_csv(std::span(s.trials)); }

namespace {

Coord random_cell(const Grid& g, Rng& rng) {
  return {int(rng.below(std::uint64_t(g.width()))), int(rng.below(std::uint64_t(g.height())))};
}

}  // namespace

Scenario static_benchmark(std::uint64_t seed) {
  Rng rng(seed);
  for (;;) {
    Scenario s = open_scenario(8, 8, seed);
    s.spread_prob = 0.0;
    s.ignition_prob = 0.0;
    s.grid = Grid(8, 8);
    for (std::size_t i = 0; i < s.grid.size(); ++i)
      if (rng.uniform() < 0.15) s.grid.at(s.grid.coord(i)).kind = CellKind::Obstacle;
    s.start = random_cell(s.grid, rng);
    s.goal = random_cell(s.grid, rng);
    if (s.start == s.goal || s.grid.at(s.start).kind != CellKind::Free ||
        s.grid.at(s.goal).kind != CellKind::Free)
      continue;
    s.grid.at(s.goal).kind = CellKind::Goal;
    if (!reachable(s.grid, s.start, s.goal, /*fire_blocks=*/false)) continue;
    return s;
  }
}

Scenario dynamic_benchmark(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xd1a));
  Scenario s = open_scenario(16, 16, seed);
  s.spread_prob = 0.05;
  s.ignition_prob = 0.002;
  s.grid.at(s.goal).kind = CellKind::Free;
  s.start = random_cell(s.grid, rng);
  std::vector<Coord> goals;
  for (int dy = -kDynamicGoalRadius; dy <= kDynamicGoalRadius; ++dy)
    for (int dx = -kDynamicGoalRadius; dx <= kDynamicGoalRadius; ++dx) {
      const Coord g{s.start.x + dx, s.start.y + dy};
      if (s.grid.in_bounds(g) && std::abs(dx) + std::abs(dy) >= 2) goals.push_back(g);
    }
  s.goal = goals[rng.below(goals.size())];
  s.grid.at(s.goal).kind = CellKind::Goal;
  return s;
}

}  // namespace firenav
