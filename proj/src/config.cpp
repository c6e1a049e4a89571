#include "firenav/config.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "firenav/errors.hpp"
#include "firenav/eval.hpp"
#include "firenav/text.hpp"

namespace firenav {

namespace {

struct Field {
  std::function<void(RunConfig&, std::string_view, std::size_t)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
T number(std::string_view v, std::size_t line, std::string_view key) {
  return parse_number<T>(v, line, key);
}

bool boolean(std::string_view v, std::size_t line, std::string_view key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'", line);
}

std::vector<std::string> list(std::string_view v) {
  std::vector<std::string> out;
  std::string item;
  for (char c : v) {
    if (c == ',') {
      if (auto t = trim(item); !t.empty()) out.emplace_back(t);
      item.clear();
    } else {
      item += c;
    }
  }
  if (auto t = trim(item); !t.empty()) out.emplace_back(t);
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string join_paths(const std::vector<std::filesystem::path>& items) {
  std::vector<std::string> s;
  for (const auto& p : items) s.push_back(p.string());
  return join(s);
}

std::string join_numbers(const std::vector<double>& items) {
  std::vector<std::string> s;
  for (double d : items) s.push_back(format_double(d));
  return join(s);
}

std::vector<double> levels_value(std::string_view v, std::size_t line, std::string_view key) {
  if (trim(v).empty()) return {};
  try {
    if (v.find(':') != std::string_view::npos) return parse_levels(trim(v));
    std::vector<double> out;
    for (const std::string& item : list(v)) out.push_back(number<double>(item, line, key));
    return out;
  } catch (const ValidationError& e) {
    throw ParseError(std::string(key) + ": " + e.what(), line);
  }
}

#define FIRENAV_NUMBER(name, member, type)                                                    \
  {name,                                                                                      \
   {[](RunConfig& c, std::string_view v, std::size_t l) { c.member = number<type>(v, l, name); }, \
    [](const RunConfig& c) { return format_number(c.member); }}}

std::string format_number(double d) { return format_double(d); }
template <class T>
std::string format_number(T v) {
  return std::to_string(v);
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = {
      FIRENAV_NUMBER("episodes", train.episodes, int),
      FIRENAV_NUMBER("max_steps", train.max_steps, int),
      FIRENAV_NUMBER("gamma", train.gamma, double),
      FIRENAV_NUMBER("epsilon_start", train.epsilon_start, double),
      FIRENAV_NUMBER("epsilon_end", train.epsilon_end, double),
      FIRENAV_NUMBER("epsilon_decay_frames", train.epsilon_decay_frames, long),
      FIRENAV_NUMBER("batch", train.batch, int),
      FIRENAV_NUMBER("learning_rate", train.learning_rate, double),
      FIRENAV_NUMBER("replay_capacity", train.replay_capacity, std::size_t),
      FIRENAV_NUMBER("total_frame_budget", train.total_frame_budget, long),
      FIRENAV_NUMBER("target_sync_period", train.target_sync_period, int),
      FIRENAV_NUMBER("min_replay_before_learning", train.min_replay_before_learning, std::size_t),
      FIRENAV_NUMBER("eval_every", train.eval_every, int),
      FIRENAV_NUMBER("seed", train.seed, std::uint64_t),
      {"keep_best",
       {[](RunConfig& c, std::string_view v, std::size_t l) { c.train.keep_best = boolean(v, l, "keep_best"); },
        [](const RunConfig& c) { return std::string(c.train.keep_best ? "true" : "false"); }}},
      {"window",
       {[](RunConfig& c, std::string_view v, std::size_t l) {
          c.env.window = c.shape.window = number<int>(v, l, "window");
        },
        [](const RunConfig& c) { return std::to_string(c.env.window); }}},
      FIRENAV_NUMBER("feature_width", shape.feature_width, int),
      FIRENAV_NUMBER("hidden", shape.hidden, int),
      FIRENAV_NUMBER("step_penalty", env.step_penalty, double),
      FIRENAV_NUMBER("fire_proximity_penalty", env.fire_proximity_penalty, double),
      {"goal_beacon",
       {[](RunConfig& c, std::string_view v, std::size_t l) { c.env.goal_beacon = boolean(v, l, "goal_beacon"); },
        [](const RunConfig& c) { return std::string(c.env.goal_beacon ? "true" : "false"); }}},
      {"scenario",
       {[](RunConfig& c, std::string_view v, std::size_t) {
          c.scenarios.clear();
          for (const std::string& p : list(v)) c.scenarios.emplace_back(p);
        },
        [](const RunConfig& c) { return join_paths(c.scenarios); }}},
      {"family",
       {[](RunConfig& c, std::string_view v, std::size_t l) {
          const std::string f(trim(v));
          if (!f.empty() && std::find(std::begin(kFamilies), std::end(kFamilies), f) == std::end(kFamilies))
            throw ParseError("family: unknown scenario family '" + f + "'", l);
          c.family = f;
        },
        [](const RunConfig& c) { return c.family; }}},
      {"out",
       {[](RunConfig& c, std::string_view v, std::size_t) { c.out = std::string(trim(v)); },
        [](const RunConfig& c) { return c.out.string(); }}},
      {"demo_log",
       {[](RunConfig& c, std::string_view v, std::size_t) {
          c.demo_logs.clear();
          for (const std::string& p : list(v)) c.demo_logs.emplace_back(p);
        },
        [](const RunConfig& c) { return join_paths(c.demo_logs); }}},
      {"train_coverage",
       {[](RunConfig& c, std::string_view v, std::size_t l) { c.train_coverage = levels_value(v, l, "train_coverage"); },
        [](const RunConfig& c) { return join_numbers(c.train_coverage); }}},
      FIRENAV_NUMBER("checkpoint_every", checkpoint_every, int),
      {"levels",
       {[](RunConfig& c, std::string_view v, std::size_t l) { c.levels = levels_value(v, l, "levels"); },
        [](const RunConfig& c) { return join_numbers(c.levels); }}},
      FIRENAV_NUMBER("trials", trials, int),
      FIRENAV_NUMBER("targets", targets, int),
      FIRENAV_NUMBER("workers", workers, int),
      {"agents",
       {[](RunConfig& c, std::string_view v, std::size_t) { c.agents = list(v); },
        [](const RunConfig& c) { return join(c.agents); }}},
      FIRENAV_NUMBER("port", port, int),
      FIRENAV_NUMBER("demo_coverage", demo_coverage, double),
      {"static_dir",
       {[](RunConfig& c, std::string_view v, std::size_t) { c.static_dir = std::string(trim(v)); },
        [](const RunConfig& c) { return c.static_dir.string(); }}},
  };
  return table;
}

#undef FIRENAV_NUMBER

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, std::size_t line) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ParseError("unknown key '" + std::string(key) + "'", line);
  it->second.set(cfg, trim(value), line);
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("missing key before '='", line_no);
    apply_setting(base, key, line.substr(eq + 1), line_no);
  }
  validate(base);
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  return parse_config(read_file(path), std::move(base));
}

std::string format_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(cfg) + "\n";
  return out;
}

void validate(const RunConfig& cfg) {
  cfg.train.validate();
  if (cfg.env.window < 1 || cfg.env.window % 2 == 0) throw ValidationError("window must be odd and positive");
  if (cfg.shape.feature_width < 1 || cfg.shape.hidden < 1)
    throw ValidationError("feature_width and hidden must be positive");
  for (double c : cfg.train_coverage)
    if (!(c >= 0.0 && c <= 0.9)) throw ValidationError("train_coverage values must lie in [0, 0.9]");
  for (double c : cfg.levels)
    if (!(c >= 0.0 && c <= 0.9)) throw ValidationError("levels must lie in [0, 0.9]");
  if (cfg.trials < 0 || cfg.targets < 0) throw ValidationError("trials and targets must be >= 0");
  if (cfg.workers < 1) throw ValidationError("workers must be >= 1");
  if (cfg.checkpoint_every < 0) throw ValidationError("checkpoint_every must be >= 0");
  if (cfg.port < 0 || cfg.port > 65535) throw ValidationError("port must lie in [0, 65535]");
  if (!(cfg.demo_coverage >= 0.0 && cfg.demo_coverage <= 0.9))
    throw ValidationError("demo_coverage must lie in [0, 0.9]");
}

}  // namespace firenav
