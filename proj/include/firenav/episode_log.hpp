#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "firenav/env.hpp"

namespace firenav {

// Line-delimited episode log:
//   EPISODE <scenario-hash> <seed> <coverage>
//   <t> <action-index> <reward> <terminal 0|1>     (one line per step, t from 1)
//   END <outcome>
// Episodes are stored as (scenario, seed, actions); observations are
// regenerated by re-simulation.

struct StepRecord {
  int t = 0;
  Action action = Action::Forward;
  double reward = 0.0;
  bool terminal = false;
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct EpisodeRecord {
  std::uint64_t scenario_hash = 0;
  std::uint64_t seed = 0;       // replaces the scenario's own seed
  double coverage = 0.0;        // seed_fires target applied at t=0
  std::vector<StepRecord> steps;
  Outcome outcome = Outcome::Ongoing;
  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

std::string format_episode(const EpisodeRecord& episode);
// Throws ParseError with the offending line number.
std::vector<EpisodeRecord> parse_episode_log(std::string_view text);
std::vector<EpisodeRecord> read_episode_log(const std::filesystem::path& path);
// Appends one complete EPISODE block with a single write.
void append_episode(const std::filesystem::path& path, const EpisodeRecord& episode);

// Environment an episode record starts from: the scenario reseeded, fires seeded.
FireEnv episode_start(const Scenario& scenario, const EnvOptions& options, std::uint64_t seed,
                      double coverage);

// Incrementally builds a record alongside a live environment.
class EpisodeRecorder {
 public:
  EpisodeRecorder(const Scenario& scenario, std::uint64_t seed, double coverage);
  void record(Action action, const StepResult& result);
  const EpisodeRecord& record() const { return episode_; }
  EpisodeRecord finish(Outcome outcome);

 private:
  EpisodeRecord episode_;
};

}  // namespace firenav
