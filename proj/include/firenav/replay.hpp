#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "firenav/env.hpp"
#include "firenav/episode_log.hpp"
#include "firenav/rng.hpp"

namespace firenav {

struct Experience {
  Observation state;
  Action action = Action::Forward;
  double reward = 0.0;
  Observation next_state;
  bool terminal = false;

  friend bool operator==(const Experience&, const Experience&) = default;
};

inline constexpr std::size_t kDefaultReplayCapacity = 20000;

// Fixed-capacity FIFO of transitions. Self-play and demonstrations share it.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = kDefaultReplayCapacity);

  void push(Experience e);  // evicts the oldest entry when full
  // `batch` entries drawn uniformly with replacement. Throws UsageError when empty.
  std::vector<Experience> sample(std::size_t batch, Rng& rng) const;
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }
  // 0 is the oldest entry.
  const Experience& operator[](std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;  // slot the next push writes
  std::size_t size_ = 0;
  std::vector<Experience> slots_;
};

// Re-simulates a logged episode and returns its transitions. Throws
// IntegrityError when the scenario hash, rewards, terminal flags or outcome
// disagree with the simulation, or an action follows the end of the episode.
std::vector<Experience> replay_episode(const EpisodeRecord& episode, const Scenario& scenario,
                                       const EnvOptions& options);

// Loads every episode of a log; scenarios are matched by hash. All-or-nothing:
// on error nothing is pushed. Returns the number of experiences added.
std::size_t load_demonstrations(ReplayMemory& memory, const std::filesystem::path& log,
                                std::span<const Scenario> scenarios, const EnvOptions& options);

}  // namespace firenav
