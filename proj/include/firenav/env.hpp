#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "firenav/grid.hpp"
#include "firenav/rng.hpp"
#include "firenav/scenario.hpp"

namespace firenav {

inline constexpr int kFrameStack = 4;

inline constexpr double kGoalReward = 10.0;
inline constexpr double kFirePenalty = -10.0;
inline constexpr double kDefaultStepPenalty = -0.01;

// Pixel intensities of the symbolic frame.
inline constexpr double kFreeIntensity = 0.0;
inline constexpr double kGoalIntensity = 0.25;
inline constexpr double kObstacleIntensity = 0.5;
inline constexpr double kFireIntensity = 1.0;

double intensity(const Cell& cell);

// Burning cells / non-obstacle cells; 0 for a grid without open cells.
double coverage(const Grid& grid);

// Egocentric k x k window, heading up: row 0 is farthest ahead, the agent
// sits at (k/2, k/2), column k-1 is to its right.
struct Frame {
  int size = 0;
  std::vector<double> pixels;  // row-major, size*size values in [0,1]

  // Projected features memoized by a QNetwork. Frames are immutable, so the
  // cache never goes stale; it is not safe to fill from two threads at once.
  struct Features {
    std::uint64_t projector_seed = 0;
    int width = 0;
    std::vector<double> values;
  };
  mutable std::shared_ptr<const Features> features;

  double at(int row, int col) const { return pixels[std::size_t(row) * size + col]; }
  friend bool operator==(const Frame& a, const Frame& b) {
    return a.size == b.size && a.pixels == b.pixels;
  }
};

// The last kFrameStack frames, oldest first. Frames are immutable and shared
// between consecutive observations.
struct Observation {
  std::array<std::shared_ptr<const Frame>, kFrameStack> frames;

  const Frame& frame(int i) const { return *frames[std::size_t(i)]; }
  const Frame& newest() const { return *frames.back(); }
  int window() const { return frames[0] ? frames[0]->size : 0; }

  // Stack made of `frame` repeated, as at the start of an episode.
  static Observation padded(std::shared_ptr<const Frame> frame);
  // This stack with the oldest frame dropped and `frame` appended.
  Observation shifted(std::shared_ptr<const Frame> frame) const;

  friend bool operator==(const Observation& a, const Observation& b);
};

enum class Outcome { Ongoing, ReachedGoal, Burned, TimedOut };
std::string_view outcome_name(Outcome o);
std::optional<Outcome> outcome_from_name(std::string_view name);

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool terminal = false;
  Outcome outcome = Outcome::Ongoing;
};

struct AgentPose {
  Coord position;
  Heading heading = Heading::N;
  friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

struct EnvOptions {
  int window = 9;  // odd
  double step_penalty = kDefaultStepPenalty;
  // lambda of the optional -lambda/d shaping, d = Chebyshev distance to the
  // nearest fire. 0 disables it.
  double fire_proximity_penalty = 0.0;
  // When the goal is outside the window, mark the border pixel on the ray
  // towards it with goal intensity.
  bool goal_beacon = false;

  friend bool operator==(const EnvOptions&, const EnvOptions&) = default;
};

// Pose after `action` under the movement rules alone (no fire dynamics).
// Forward/Back move one cell along/against the heading, Left/Right rotate in
// place, Jump crosses one jumpable obstacle onto a non-obstacle cell and
// otherwise behaves like Forward. Blocked moves leave the pose unchanged.
AgentPose next_pose(const Grid& grid, AgentPose pose, Action action);

// Episodic discrete-action environment as seen by the trainer.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual const Observation& observation() const = 0;
  virtual StepResult step(Action action) = 0;
  virtual bool terminal() const = 0;
};

// The fire grid world. Single-threaded; instances are independent.
class FireEnv final : public Environment {
 public:
  // Throws ValidationError if the scenario is invalid or the window is not odd.
  explicit FireEnv(Scenario scenario, EnvOptions options = {});

  const Observation& observation() const override { return observation_; }
  // Move or rotate, spread fire once, then score. Moves into obstacles or off
  // the grid leave the pose unchanged but still use up the step. Throws
  // UsageError once the episode is over.
  StepResult step(Action action) override;
  bool terminal() const override { return outcome_ != Outcome::Ongoing; }

  // One round of fire dynamics; returns the number of newly ignited cells.
  int spread_fire();
  // Burning cells / non-obstacle cells.
  double coverage() const;
  // Ignite random cells (never the agent's cell or the goal) until coverage
  // reaches `target`. Only valid at t=0; target must lie in [0, 0.9].
  void seed_fires(double target);
  // Ignites one cell directly (used to script fire events).
  void ignite(Coord c);

  Frame render_frame() const;

  const Scenario& scenario() const { return scenario_; }
  const EnvOptions& options() const { return options_; }
  const Grid& grid() const { return grid_; }
  const AgentPose& pose() const { return pose_; }
  int t() const { return t_; }
  int max_steps() const { return scenario_.max_steps; }
  Outcome outcome() const { return outcome_; }
  std::size_t burning_count() const { return burning_; }

 private:
  double fire_proximity_cost() const;

  Scenario scenario_;
  EnvOptions options_;
  Grid grid_;
  AgentPose pose_;
  Rng rng_;
  int t_ = 0;
  Outcome outcome_ = Outcome::Ongoing;
  std::size_t burning_ = 0;
  std::size_t open_cells_ = 0;
  Observation observation_;
};

}  // namespace firenav
