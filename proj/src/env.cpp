#include "firenav/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "firenav/errors.hpp"

namespace firenav {

double intensity(const Cell& cell) {
  switch (cell.kind) {
    case CellKind::Free: return kFreeIntensity;
    case CellKind::Goal: return kGoalIntensity;
    case CellKind::Obstacle: return kObstacleIntensity;
    case CellKind::Fire: return kFireIntensity;
  }
  return kObstacleIntensity;
}

double coverage(const Grid& grid) {
  std::size_t open = 0, burning = 0;
  for (const Cell& c : grid.cells()) {
    open += c.passable();
    burning += c.burning();
  }
  return open ? double(burning) / double(open) : 0.0;
}

Observation Observation::padded(std::shared_ptr<const Frame> frame) {
  Observation obs;
  obs.frames.fill(std::move(frame));
  return obs;
}

Observation Observation::shifted(std::shared_ptr<const Frame> frame) const {
  Observation obs;
  for (int i = 0; i + 1 < kFrameStack; ++i) obs.frames[std::size_t(i)] = frames[std::size_t(i) + 1];
  obs.frames.back() = std::move(frame);
  return obs;
}

bool operator==(const Observation& a, const Observation& b) {
  for (int i = 0; i < kFrameStack; ++i) {
    const auto& fa = a.frames[std::size_t(i)];
    const auto& fb = b.frames[std::size_t(i)];
    if (fa == fb) continue;
    if (!fa || !fb || !(*fa == *fb)) return false;
  }
  return true;
}

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Ongoing: return "Ongoing";
    case Outcome::ReachedGoal: return "ReachedGoal";
    case Outcome::Burned: return "Burned";
    case Outcome::TimedOut: return "TimedOut";
  }
  return "?";
}

std::optional<Outcome> outcome_from_name(std::string_view name) {
  for (Outcome o : {Outcome::Ongoing, Outcome::ReachedGoal, Outcome::Burned, Outcome::TimedOut})
    if (outcome_name(o) == name) return o;
  return std::nullopt;
}

AgentPose next_pose(const Grid& grid, AgentPose pose, Action action) {
  auto try_move = [&](Coord target) {
    if (grid.in_bounds(target) && grid.at(target).passable()) pose.position = target;
  };
  const Coord ahead = offset(pose.heading);
  switch (action) {
    case Action::Forward: try_move(pose.position + ahead); break;
    case Action::Back: try_move(pose.position - ahead); break;
    case Action::Left: pose.heading = turn_left(pose.heading); break;
    case Action::Right: pose.heading = turn_right(pose.heading); break;
    case Action::Jump: {
      const Coord over = pose.position + ahead;
      const Coord landing = pose.position + 2 * ahead;
      if (grid.in_bounds(over) && grid.at(over).kind == CellKind::Obstacle &&
          grid.at(over).jumpable && grid.in_bounds(landing) && grid.at(landing).passable()) {
        pose.position = landing;
      } else {
        try_move(over);
      }
      break;
    }
  }
  return pose;
}

FireEnv::FireEnv(Scenario scenario, EnvOptions options)
    : scenario_(std::move(scenario)),
      options_(options),
      grid_(scenario_.grid),
      pose_{scenario_.start, scenario_.start_heading},
      rng_(scenario_.seed) {
  validate(scenario_);
  if (options_.window < 1 || options_.window % 2 == 0)
    throw ValidationError("observation window must be a positive odd number");
  for (const Cell& c : grid_.cells()) {
    if (c.passable()) ++open_cells_;
    if (c.burning()) ++burning_;
  }
  observation_ = Observation::padded(std::make_shared<const Frame>(render_frame()));
}

StepResult FireEnv::step(Action action) {
  if (terminal()) throw UsageError("step() called on a finished episode");
  ++t_;
  pose_ = next_pose(grid_, pose_, action);
  spread_fire();

  double reward;
  const Cell& here = grid_.at(pose_.position);
  if (here.kind == CellKind::Goal) {
    outcome_ = Outcome::ReachedGoal;
    reward = kGoalReward;
  } else if (here.burning()) {
    outcome_ = Outcome::Burned;
    reward = kFirePenalty;
  } else {
    reward = options_.step_penalty - fire_proximity_cost();
    outcome_ = t_ >= scenario_.max_steps ? Outcome::TimedOut : Outcome::Ongoing;
  }

  observation_ = observation_.shifted(std::make_shared<const Frame>(render_frame()));
  return {observation_, reward, terminal(), outcome_};
}

int FireEnv::spread_fire() {
  const double spread = scenario_.spread_prob;
  const double spontaneous = scenario_.ignition_prob;
  if (spread <= 0.0 && spontaneous <= 0.0) return 0;

  // Synchronous update: neighbor counts use the fire set from before this round.
  std::vector<std::size_t> ignite;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (grid_.cells()[i].kind != CellKind::Free) continue;
    const Coord c = grid_.coord(i);
    int burning_neighbors = 0;
    for (Heading h : kHeadings) {
      const Coord n = c + offset(h);
      if (grid_.in_bounds(n) && grid_.at(n).burning()) ++burning_neighbors;
    }
    const double survive = std::pow(1.0 - spread, burning_neighbors) * (1.0 - spontaneous);
    if (rng_.uniform() < 1.0 - survive) ignite.push_back(i);
  }
  for (std::size_t i : ignite) grid_.at(grid_.coord(i)).kind = CellKind::Fire;
  burning_ += ignite.size();
  return int(ignite.size());
}

double FireEnv::coverage() const {
  return open_cells_ ? double(burning_) / double(open_cells_) : 0.0;
}

void FireEnv::seed_fires(double target) {
  if (!(target >= 0.0 && target <= 0.9))
    throw std::invalid_argument("target coverage must lie in [0, 0.9]");
  if (t_ != 0) throw UsageError("seed_fires() is only valid at t=0");
  const auto needed_total = std::size_t(std::ceil(target * double(open_cells_) - 1e-9));
  if (needed_total <= burning_) return;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const Coord c = grid_.coord(i);
    if (grid_.cells()[i].kind == CellKind::Free && c != pose_.position && c != scenario_.start)
      candidates.push_back(i);
  }
  const std::size_t needed = needed_total - burning_;
  if (needed > candidates.size())
    throw std::invalid_argument("not enough free cells to reach the target coverage");
  // Partial Fisher-Yates: the first `needed` entries become a uniform sample.
  for (std::size_t k = 0; k < needed; ++k) {
    const std::size_t j = k + std::size_t(rng_.below(candidates.size() - k));
    std::swap(candidates[k], candidates[j]);
    grid_.at(grid_.coord(candidates[k])).kind = CellKind::Fire;
  }
  burning_ += needed;
  observation_ = Observation::padded(std::make_shared<const Frame>(render_frame()));
}

void FireEnv::ignite(Coord c) {
  Cell& cell = grid_.at(c);
  if (cell.kind != CellKind::Free) return;
  cell.kind = CellKind::Fire;
  ++burning_;
  if (t_ == 0) observation_ = Observation::padded(std::make_shared<const Frame>(render_frame()));
}

double FireEnv::fire_proximity_cost() const {
  if (options_.fire_proximity_penalty == 0.0 || burning_ == 0) return 0.0;
  int nearest = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!grid_.cells()[i].burning()) continue;
    const Coord d = grid_.coord(i) - pose_.position;
    nearest = std::min(nearest, std::max(std::abs(d.x), std::abs(d.y)));
  }
  return options_.fire_proximity_penalty / double(std::max(nearest, 1));
}

Frame FireEnv::render_frame() const {
  const int k = options_.window;
  const int half = k / 2;
  const Coord ahead = offset(pose_.heading);
  const Coord right = offset(turn_right(pose_.heading));
  Frame frame{k, std::vector<double>(std::size_t(k) * k, kObstacleIntensity)};
  for (int row = 0; row < k; ++row) {
    for (int col = 0; col < k; ++col) {
      const Coord world = pose_.position + (half - row) * ahead + (col - half) * right;
      if (grid_.in_bounds(world))
        frame.pixels[std::size_t(row) * k + col] = intensity(grid_.at(world));
    }
  }
  if (options_.goal_beacon) {
    const Coord d = scenario_.goal - pose_.position;
    const int fwd = d.x * ahead.x + d.y * ahead.y;
    const int side = d.x * right.x + d.y * right.y;
    const int reach = std::max(std::abs(fwd), std::abs(side));
    if (reach > half) {
      const auto f = int(std::lround(double(fwd) * half / reach));
      const auto s = int(std::lround(double(side) * half / reach));
      frame.pixels[std::size_t(half - f) * k + (half + s)] = kGoalIntensity;
    }
  }
  return frame;
}

}  // namespace firenav
