#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "firenav/env.hpp"
#include "firenav/qnet.hpp"
#include "firenav/trainer.hpp"

namespace firenav {

// Everything a command needs, read from `key = value` lines and flags.
struct RunConfig {
  TrainConfig train;
  QNetShape shape;
  EnvOptions env;

  std::vector<std::filesystem::path> scenarios;
  std::string family;  // "" or a built-in scenario family: static8, dynamic16
  std::filesystem::path out = "out";
  std::vector<std::filesystem::path> demo_logs;
  // Fire coverage seeded at the start of training episodes, picked per episode.
  std::vector<double> train_coverage;
  int checkpoint_every = 0;  // episodes; 0 writes the checkpoint only at the end

  // Evaluation.
  std::vector<double> levels = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  int trials = 200;
  int targets = 0;  // > 0 runs a target battery on the first scenario instead of a sweep
  int workers = 1;
  std::vector<std::string> agents = {"dqn", "astar", "bfs", "dfs", "random"};

  // Demonstration server.
  int port = 8765;
  double demo_coverage = 0.0;
  std::filesystem::path static_dir;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline constexpr std::string_view kFamilies[] = {"static8", "dynamic16"};

// Throws ParseError (with the line) for unknown keys, malformed lines and bad
// values, and ValidationError when the result violates an invariant.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

// Sets one key; `line` is only used in error messages (0 for flags).
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, std::size_t line = 0);

// Every key with its effective value; parse_config reads it back unchanged.
std::string format_config(const RunConfig& cfg);

void validate(const RunConfig& cfg);

}  // namespace firenav
