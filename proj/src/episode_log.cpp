#include "firenav/episode_log.hpp"

#include <fstream>

#include "firenav/errors.hpp"
#include "firenav/text.hpp"

namespace firenav {

std::string format_episode(const EpisodeRecord& e) {
  std::string out = "EPISODE " + std::to_string(e.scenario_hash) + ' ' + std::to_string(e.seed) +
                    ' ' + format_double(e.coverage) + '\n';
  for (const StepRecord& s : e.steps) {
    out += std::to_string(s.t) + ' ' + std::to_string(index_of(s.action)) + ' ' +
           format_double(s.reward) + ' ' + (s.terminal ? '1' : '0') + '\n';
  }
  out += "END ";
  out += outcome_name(e.outcome);
  out += '\n';
  return out;
}

std::vector<EpisodeRecord> parse_episode_log(std::string_view text) {
  std::vector<EpisodeRecord> episodes;
  std::optional<EpisodeRecord> open;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto tokens = split_ws(lines[i]);
    if (tokens.empty()) continue;
    if (tokens[0] == "EPISODE") {
      if (open) throw ParseError("EPISODE before END of previous episode", line_no);
      if (tokens.size() != 4) throw ParseError("EPISODE needs <hash> <seed> <coverage>", line_no);
      EpisodeRecord e;
      e.scenario_hash = parse_number<std::uint64_t>(tokens[1], line_no, "scenario hash");
      e.seed = parse_number<std::uint64_t>(tokens[2], line_no, "seed");
      e.coverage = parse_number<double>(tokens[3], line_no, "coverage");
      open = std::move(e);
    } else if (tokens[0] == "END") {
      if (!open) throw ParseError("END without EPISODE", line_no);
      if (tokens.size() != 2) throw ParseError("END needs an outcome", line_no);
      const auto outcome = outcome_from_name(tokens[1]);
      if (!outcome) throw ParseError("unknown outcome '" + std::string(tokens[1]) + "'", line_no);
      open->outcome = *outcome;
      episodes.push_back(std::move(*open));
      open.reset();
    } else {
      if (!open) throw ParseError("step line outside an episode", line_no);
      if (tokens.size() != 4) throw ParseError("step needs <t> <action> <reward> <terminal>", line_no);
      StepRecord s;
      s.t = parse_number<int>(tokens[0], line_no, "t");
      const auto action = action_from_index(parse_number<long long>(tokens[1], line_no, "action"));
      if (!action) throw ParseError("action index outside 0..4", line_no);
      s.action = *action;
      s.reward = parse_number<double>(tokens[2], line_no, "reward");
      if (tokens[3] != "0" && tokens[3] != "1") throw ParseError("terminal flag must be 0 or 1", line_no);
      s.terminal = tokens[3] == "1";
      const int expected_t = int(open->steps.size()) + 1;
      if (s.t != expected_t)
        throw ParseError("expected t=" + std::to_string(expected_t), line_no);
      open->steps.push_back(s);
    }
  }
  if (open) throw ParseError("log ends inside an episode", lines.size());
  return episodes;
}

std::vector<EpisodeRecord> read_episode_log(const std::filesystem::path& path) {
  return parse_episode_log(read_file(path));
}

void append_episode(const std::filesystem::path& path, const EpisodeRecord& episode) {
  const std::string block = format_episode(episode);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(block.data(), std::streamsize(block.size()));
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

FireEnv episode_start(const Scenario& scenario, const EnvOptions& options, std::uint64_t seed,
                      double coverage) {
  Scenario s = scenario;
  s.seed = seed;
  FireEnv env(std::move(s), options);
  env.seed_fires(coverage);
  return env;
}

EpisodeRecorder::EpisodeRecorder(const Scenario& scenario, std::uint64_t seed, double coverage) {
  episode_.scenario_hash = scenario_hash(scenario);
  episode_.seed = seed;
  episode_.coverage = coverage;
}

void EpisodeRecorder::record(Action action, const StepResult& result) {
  episode_.steps.push_back(
      {int(episode_.steps.size()) + 1, action, result.reward, result.terminal});
}

EpisodeRecord EpisodeRecorder::finish(Outcome outcome) {
  episode_.outcome = outcome;
  return std::move(episode_);
}

}  // namespace firenav
