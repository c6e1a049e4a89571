// Command-line front end: train, eval, demo-serve, inspect.
//
// Exit codes: 0 ok, 1 other failure, 2 bad config or missing scenario,
// 3 unreadable checkpoint, 4 port unavailable.

#include <cerrno>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "firenav/baselines.hpp"
#include "firenav/config.hpp"
#include "firenav/demo_server.hpp"
#include "firenav/episode_log.hpp"
#include "firenav/errors.hpp"
#include "firenav/eval.hpp"
#include "firenav/qnet.hpp"
#include "firenav/replay.hpp"
#include "firenav/rng.hpp"
#include "firenav/scenario.hpp"
#include "firenav/text.hpp"
#include "firenav/trainer.hpp"

namespace fs = std::filesystem;
using namespace firenav;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kCheckpoint = 3, kPort = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::vector<std::string> scenarios;
  std::string out;
  std::string family;
  std::optional<std::uint64_t> seed;
  std::optional<long> frames;
  std::string levels;
  std::optional<int> trials;
  std::optional<int> port;
  std::vector<std::string> demo_logs;
  std::string checkpoint;
  std::vector<std::string> sets;  // raw key=value overrides
};

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) {
    if (!fs::exists(f.config)) throw ConfigError("config file not found: " + f.config);
    cfg = load_config(f.config);
  }
  for (const std::string& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("--set expects key=value, got '" + kv + "'", 0);
    apply_setting(cfg, trim(std::string_view(kv).substr(0, eq)), std::string_view(kv).substr(eq + 1));
  }
  if (!f.scenarios.empty()) cfg.scenarios.assign(f.scenarios.begin(), f.scenarios.end());
  if (!f.family.empty()) apply_setting(cfg, "family", f.family);
  if (!f.out.empty()) cfg.out = f.out;
  if (f.seed) cfg.train.seed = *f.seed;
  if (f.frames) cfg.train.total_frame_budget = *f.frames;
  if (!f.levels.empty()) apply_setting(cfg, "levels", f.levels);
  if (f.trials) cfg.trials = *f.trials;
  if (f.port) cfg.port = *f.port;
  if (!f.demo_logs.empty()) cfg.demo_logs.assign(f.demo_logs.begin(), f.demo_logs.end());
  validate(cfg);
  return cfg;
}

std::vector<Scenario> load_scenarios(const RunConfig& cfg) {
  std::vector<Scenario> out;
  for (const fs::path& p : cfg.scenarios) {
    if (!fs::exists(p)) throw ConfigError("scenario file not found: " + p.string());
    out.push_back(load_scenario(p));
  }
  return out;
}

ScenarioSampler family_sampler(const std::string& family) {
  if (family == "static8") return static_benchmark;
  if (family == "dynamic16") return dynamic_benchmark;
  throw ConfigError("unknown scenario family '" + family + "'");
}

// Scenario for a seed: a built-in family, else one of the loaded files.
ScenarioSampler make_sampler(const RunConfig& cfg, std::vector<Scenario> scenarios) {
  if (!cfg.family.empty()) return family_sampler(cfg.family);
  if (scenarios.empty()) throw ConfigError("no scenario given (use --scenario or family = ...)");
  return [scenarios = std::move(scenarios)](std::uint64_t seed) {
    Rng rng(seed);
    Scenario s = scenarios[rng.below(scenarios.size())];
    s.seed = seed;
    return s;
  };
}

// Episode environments for training. Evaluation (episode -1) uses the first
// coverage level; training episodes pick one uniformly.
struct TrainingWorld {
  ScenarioSampler sampler;
  std::vector<double> coverage;
  EnvOptions options;

  struct Start {
    Scenario scenario;
    std::uint64_t seed;
    double coverage;
  };

  Start start(std::uint64_t seed, int episode) const {
    Rng rng(derive_seed(seed, 0x7c0));
    Scenario s = sampler(seed);
    double c = 0.0;
    if (!coverage.empty()) c = episode < 0 ? coverage.front() : coverage[rng.below(coverage.size())];
    return {std::move(s), seed, c};
  }

  EnvironmentFactory factory() const {
    return [this](std::uint64_t seed, int episode) -> std::unique_ptr<Environment> {
      Start st = start(seed, episode);
      return std::make_unique<FireEnv>(episode_start(st.scenario, options, st.seed, st.coverage));
    };
  }
};

int cmd_train(const Flags& flags) {
  RunConfig cfg = resolve(flags);
  std::vector<Scenario> scenarios = load_scenarios(cfg);
  if (cfg.shape.window != cfg.env.window) throw ConfigError("network and observation windows differ");
  const TrainingWorld world{make_sampler(cfg, scenarios), cfg.train_coverage, cfg.env};

  fs::create_directories(cfg.out);
  write_file(cfg.out / "config.txt", format_config(cfg));

  Trainer trainer(cfg.train, cfg.shape);
  std::size_t demos = 0;
  for (const fs::path& log : cfg.demo_logs) {
    if (!fs::exists(log)) throw ConfigError("demo log not found: " + log.string());
    demos += load_demonstrations(trainer.replay(), log, scenarios, cfg.env);
  }
  if (!cfg.demo_logs.empty()) std::cerr << "loaded " << demos << " demonstration transitions\n";

  TrainHooks hooks;
  hooks.stop = [&](const TrainStats& st) {
    if (cfg.checkpoint_every > 0 && st.episodes.size() % std::size_t(cfg.checkpoint_every) == 0)
      save_checkpoint(cfg.out / "checkpoint.qnet", trainer.net(), trainer.optimizer());
    return false;
  };
  const TrainStats stats = trainer.run(world.factory(), hooks);

  save_checkpoint(cfg.out / "checkpoint.qnet", trainer.net(), trainer.optimizer());
  write_stats_csv(cfg.out / "stats.csv", stats);

  // Greedy episode of the final network on the evaluation start.
  const std::uint64_t eval_seed = derive_seed(cfg.train.seed, std::numeric_limits<std::uint32_t>::max());
  const TrainingWorld::Start st = world.start(eval_seed, -1);
  FireEnv env = episode_start(st.scenario, cfg.env, st.seed, st.coverage);
  const RolloutResult r = greedy_rollout(trainer.net(), env, std::numeric_limits<int>::max());
  const fs::path best = cfg.out / "best_episode.log";
  fs::remove(best);
  append_episode(best, r.as_episode(scenario_hash(st.scenario), st.seed, st.coverage));

  std::printf("episodes %zu frames %ld updates %ld greedy %s in %d steps\n", stats.episodes.size(),
              stats.frames, long(stats.updates), std::string(outcome_name(r.outcome)).c_str(), r.length());
  return kOk;
}

std::unique_ptr<Agent> make_agent(const std::string& name, const std::shared_ptr<const QNetwork>& net) {
  if (name == "dqn") {
    if (!net) throw ConfigError("agent 'dqn' needs --checkpoint");
    return std::make_unique<DqnAgent>(net);
  }
  if (name == "random") return std::make_unique<RandomWalkAgent>();
  if (name == "oracle") return std::make_unique<OracleAgent>();
  for (Planner p : {Planner::AStar, Planner::Bfs, Planner::Dfs}) {
    if (name == planner_name(p)) return std::make_unique<StaticPlanAgent>(p);
    if (name == "replan-" + std::string(planner_name(p))) return std::make_unique<ReplanningAgent>(p);
  }
  throw ConfigError("unknown agent '" + name + "'");
}

int cmd_eval(const Flags& flags) {
  RunConfig cfg = resolve(flags);
  std::shared_ptr<const QNetwork> net;
  if (!flags.checkpoint.empty()) {
    net = std::make_shared<QNetwork>(load_checkpoint(flags.checkpoint).net);
    cfg.shape = net->shape();
    cfg.env.window = cfg.shape.window;
  }
  std::vector<std::unique_ptr<Agent>> agents;
  std::vector<const Agent*> ptrs;
  for (const std::string& name : cfg.agents) {
    if (name == "dqn" && !net && flags.checkpoint.empty()) {
      std::cerr << "skipping agent dqn (no --checkpoint)\n";
      continue;
    }
    agents.push_back(make_agent(name, net));
    ptrs.push_back(agents.back().get());
  }
  if (ptrs.empty()) throw ConfigError("no agents to evaluate");

  std::vector<Scenario> scenarios = load_scenarios(cfg);
  fs::create_directories(cfg.out);
  write_file(cfg.out / "config.txt", format_config(cfg));

  if (cfg.targets > 0) {
    if (scenarios.empty()) throw ConfigError("a target battery needs --scenario");
    const double cov = cfg.levels.empty() ? 0.0 : cfg.levels.front();
    std::vector<TrialReport> all;
    std::printf("%-14s %s\n", "agent", "reached");
    for (const Agent* a : ptrs) {
      const std::vector<TrialReport> rows =
          target_battery(*a, scenarios.front(), cfg.targets, cfg.train.seed, cov, cfg.env);
      int ok = 0;
      for (const TrialReport& t : rows) ok += t.outcome == TrialOutcome::ReachedGoal;
      std::printf("%-14s %d/%zu\n", a->id().c_str(), ok, rows.size());
      all.insert(all.end(), rows.begin(), rows.end());
    }
    write_file(cfg.out / "trials.csv", format_trials_csv(all));
    return kOk;
  }

  SweepOptions opt;
  opt.levels = cfg.levels;
  opt.trials = cfg.trials;
  opt.seed = cfg.train.seed;
  opt.env = cfg.env;
  opt.workers = cfg.workers;
  const SweepResult result = coverage_sweep(ptrs, make_sampler(cfg, std::move(scenarios)), opt);
  write_file(cfg.out / "sweep.csv", format_sweep_csv(result));
  write_file(cfg.out / "trials.csv", format_trials_csv(result.trials));

  std::printf("%-9s", "coverage");
  for (const Agent* a : ptrs) std::printf(" %12s", a->id().c_str());
  std::printf("\n");
  for (double c : cfg.levels) {
    std::printf("%-9s", format_double(c).c_str());
    for (const Agent* a : ptrs) std::printf(" %12.3f", result.row(c, a->id())->success_rate());
    std::printf("\n");
  }
  return kOk;
}

int cmd_demo_serve(const Flags& flags) {
  RunConfig cfg = resolve(flags);
  std::vector<Scenario> scenarios = load_scenarios(cfg);
  DemoServerOptions opt;
  if (!scenarios.empty()) {
    opt.scenario = scenarios.front();
  } else if (!cfg.family.empty()) {
    opt.scenario = family_sampler(cfg.family)(cfg.train.seed);
  } else {
    throw ConfigError("no scenario given (use --scenario or family = ...)");
  }
  opt.env = cfg.env;
  opt.seed = cfg.train.seed;
  opt.coverage = cfg.demo_coverage;
  opt.demo_log = cfg.demo_logs.empty() ? cfg.out / "demos.log" : cfg.demo_logs.front();
  if (!cfg.static_dir.empty()) opt.static_dir = cfg.static_dir;
  if (opt.demo_log.has_parent_path()) fs::create_directories(opt.demo_log.parent_path());

  DemoServer server(std::move(opt));
  server.start(std::uint16_t(cfg.port));
  std::printf("listening on ws://127.0.0.1:%u, recording to %s\n", unsigned(server.port()),
              (cfg.demo_logs.empty() ? cfg.out / "demos.log" : cfg.demo_logs.front()).string().c_str());
  std::fflush(stdout);
  server.wait();
  std::printf("recorded %zu episodes\n", server.episodes_recorded());
  return kOk;
}

int cmd_inspect(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("file not found: " + path);
  const std::string bytes = read_file(path);
  try {
    const CheckpointHeader h = read_checkpoint_header(bytes);
    decode_checkpoint(bytes);
    std::printf("checkpoint v%u window %d feature_width %d hidden %d projector_seed %llu\n", h.version,
                h.shape.window, h.shape.feature_width, h.shape.hidden,
                static_cast<unsigned long long>(h.projector_seed));
    return kOk;
  } catch (const CheckpointError& e) {
    if (bytes.rfind("QNET", 0) == 0) throw;  // a checkpoint, but damaged
  }
  try {
    (void)parse_scenario(bytes);
    std::cerr << path << " is a scenario file, not a checkpoint or episode log\n";
    return kConfig;
  } catch (const ParseError&) {
  } catch (const ValidationError&) {
  }
  std::vector<EpisodeRecord> episodes;
  try {
    episodes = parse_episode_log(bytes);
  } catch (const ParseError& e) {
    throw ConfigError(path + " is not a checkpoint, episode log or scenario (" + e.what() + ")");
  }
  std::size_t steps = 0;
  std::size_t reached = 0;
  for (const EpisodeRecord& e : episodes) {
    steps += e.steps.size();
    reached += e.outcome == Outcome::ReachedGoal;
  }
  std::printf("episode log: %zu episodes, %zu steps, %zu reached the goal\n", episodes.size(), steps, reached);
  return kOk;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "key = value config file");
  cmd->add_option("--scenario", f.scenarios, "scenario file (repeatable)");
  cmd->add_option("--family", f.family, "built-in scenario family: static8, dynamic16");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--set", f.sets, "override a config key, key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Navigation in dynamic fire environments: DQN training, baselines and evaluation"};
  app.require_subcommand(1);
  Flags flags;
  std::string inspect_path;

  CLI::App* train = app.add_subcommand("train", "train a Q-network");
  add_common(train, flags);
  train->add_option("--frames", flags.frames, "frame budget");
  train->add_option("--demo-log", flags.demo_logs, "demonstration log to preload (repeatable)");

  CLI::App* eval = app.add_subcommand("eval", "coverage sweep or target battery");
  add_common(eval, flags);
  eval->add_option("--checkpoint", flags.checkpoint, "trained network for agent dqn");
  eval->add_option("--levels", flags.levels, "coverage levels, lo:hi:step or a list");
  eval->add_option("--trials", flags.trials, "trials per level and agent");

  CLI::App* serve = app.add_subcommand("demo-serve", "record demonstrations over WebSocket");
  add_common(serve, flags);
  serve->add_option("--port", flags.port, "TCP port (0 picks a free one)");
  serve->add_option("--demo-log", flags.demo_logs, "log to append episodes to");

  CLI::App* inspect = app.add_subcommand("inspect", "describe a checkpoint or episode log");
  inspect->add_option("path", inspect_path, "file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*train) return cmd_train(flags);
    if (*eval) return cmd_eval(flags);
    if (*serve) return cmd_demo_serve(flags);
    if (*inspect) return cmd_inspect(inspect_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckpoint;
  } catch (const std::system_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == std::errc::address_in_use || e.code().value() == EADDRINUSE ? kPort : kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
