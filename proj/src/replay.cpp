#include "firenav/replay.hpp"

#include "firenav/errors.hpp"

namespace firenav {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  slots_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayMemory::push(Experience e) {
  if (slots_.size() < capacity_) {
    slots_.push_back(std::move(e));
  } else {
    slots_[next_] = std::move(e);
  }
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

const Experience& ReplayMemory::operator[](std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index");
  const std::size_t oldest = size_ < capacity_ ? 0 : next_;
  return slots_[(oldest + i) % capacity_];
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t batch, Rng& rng) const {
  if (empty()) throw UsageError("cannot sample from an empty replay memory");
  std::vector<std::size_t> out(batch);
  for (auto& i : out) i = std::size_t(rng.below(size_));
  return out;
}

std::vector<Experience> ReplayMemory::sample(std::size_t batch, Rng& rng) const {
  std::vector<Experience> out;
  out.reserve(batch);
  for (std::size_t i : sample_indices(batch, rng)) out.push_back((*this)[i]);
  return out;
}

std::vector<Experience> replay_episode(const EpisodeRecord& episode, const Scenario& scenario,
                                       const EnvOptions& options) {
  if (scenario_hash(scenario) != episode.scenario_hash)
    throw IntegrityError("episode was recorded on a different scenario");
  FireEnv env = episode_start(scenario, options, episode.seed, episode.coverage);
  std::vector<Experience> out;
  out.reserve(episode.steps.size());
  for (const StepRecord& s : episode.steps) {
    if (env.terminal())
      throw IntegrityError("action at t=" + std::to_string(s.t) + " after the episode ended");
    Observation before = env.observation();
    const StepResult r = env.step(s.action);
    if (r.reward != s.reward)
      throw IntegrityError("reward mismatch at t=" + std::to_string(s.t));
    if (r.terminal != s.terminal)
      throw IntegrityError("terminal flag mismatch at t=" + std::to_string(s.t));
    out.push_back({std::move(before), s.action, r.reward, r.observation, r.terminal});
  }
  if (env.outcome() != episode.outcome) throw IntegrityError("recorded outcome disagrees");
  return out;
}

std::size_t load_demonstrations(ReplayMemory& memory, const std::filesystem::path& log,
                                std::span<const Scenario> scenarios, const EnvOptions& options) {
  const std::vector<EpisodeRecord> episodes = read_episode_log(log);
  std::vector<Experience> loaded;
  for (const EpisodeRecord& e : episodes) {
    const Scenario* match = nullptr;
    for (const Scenario& s : scenarios)
      if (scenario_hash(s) == e.scenario_hash) match = &s;
    if (!match)
      throw IntegrityError("no scenario with hash " + std::to_string(e.scenario_hash));
    std::vector<Experience> part = replay_episode(e, *match, options);
    loaded.insert(loaded.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  for (Experience& x : loaded) memory.push(std::move(x));
  return loaded.size();
}

}  // namespace firenav
