#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "firenav/env.hpp"

namespace firenav {

// Classical planners. All of them treat fire in the snapshot as an obstacle
// and use the jump-expanded 4-neighborhood of Grid::move_target.

struct Plan {
  std::vector<Coord> path;      // path.front() is the start, path.back() the goal
  std::vector<Action> actions;  // the path compiled for the starting heading

  std::size_t moves() const { return path.empty() ? 0 : path.size() - 1; }
};

enum class Planner { Bfs, Dfs, AStar };
std::string_view planner_name(Planner p);

// Fewest moves.
std::optional<Plan> bfs_plan(const Grid& snapshot, AgentPose start, Coord goal);
// First path in depth-first order, neighbors tried N, E, S, W.
std::optional<Plan> dfs_plan(const Grid& snapshot, AgentPose start, Coord goal);
// Fewest moves; Manhattan heuristic (halved when the grid has jumpable
// obstacles, since a jump covers two cells in one move). Ties go to the
// smaller heuristic, then the lexicographically smaller (x, y).
std::optional<Plan> astar_plan(const Grid& snapshot, AgentPose start, Coord goal);
std::optional<Plan> make_plan(Planner planner, const Grid& snapshot, AgentPose start, Coord goal);

// Turns a cell path into actions with the fewest rotations per segment:
// Back for a single step against the heading, a rotation then Forward for a
// sideways step, and rotations then Jump for two-cell hops.
std::vector<Action> compile_path(const std::vector<Coord>& path, Heading heading);

// Shortest action sequence (rotations count) from `start` to `goal` on a
// static snapshot, by breadth-first search over (cell, heading) states.
std::optional<std::vector<Action>> shortest_action_sequence(const Grid& snapshot, AgentPose start,
                                                            Coord goal, bool fire_blocks = true);

// Uniformly random actions until the episode ends or `max_steps` steps were taken.
Outcome random_walk(Environment& env, Rng& rng, int max_steps);

struct ExecutionResult {
  Outcome outcome = Outcome::Ongoing;
  bool no_path = false;         // planner found nothing at t=0
  int steps = 0;
  double total_reward = 0.0;
  std::vector<Action> actions;  // as executed
};

// One-shot plan on the t=0 snapshot executed open-loop while fire spreads.
// After the plan runs out the agent stalls (rotates in place) until the
// episode ends.
// Called after every executed step, e.g. to inject fire.
using StepHook = std::function<void(FireEnv&)>;

ExecutionResult execute_static_plan(FireEnv& env, Planner planner, const StepHook& after_step = {});

// Closed-loop variant: replans on the current snapshot before every step and
// stalls while no path exists.
ExecutionResult execute_replanning(FireEnv& env, Planner planner, const StepHook& after_step = {});

}  // namespace firenav
