#include "firenav/baselines.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>
#include <tuple>

namespace firenav {
namespace {

constexpr int kUnvisited = -1;

Plan finish(const Grid& g, const std::vector<int>& parent, Coord start, Coord goal,
            Heading heading) {
  Plan plan;
  for (Coord c = goal; c != start; c = g.coord(std::size_t(parent[g.index(c)])))
    plan.path.push_back(c);
  plan.path.push_back(start);
  std::reverse(plan.path.begin(), plan.path.end());
  plan.actions = compile_path(plan.path, heading);
  return plan;
}

bool valid_endpoints(const Grid& g, Coord start, Coord goal) {
  return g.in_bounds(start) && g.in_bounds(goal) && g.at(goal).passable() &&
         !g.at(goal).burning();
}

bool has_jumpables(const Grid& g) {
  return std::any_of(g.cells().begin(), g.cells().end(),
                     [](const Cell& c) { return c.kind == CellKind::Obstacle && c.jumpable; });
}

Heading direction_of(Coord delta) {
  if (delta.x > 0) return Heading::E;
  if (delta.x < 0) return Heading::W;
  if (delta.y > 0) return Heading::S;
  return Heading::N;
}

void rotate_towards(Heading& heading, Heading want, std::vector<Action>& out) {
  if (heading == want) return;
  if (turn_right(heading) == want) {
    out.push_back(Action::Right);
  } else if (turn_left(heading) == want) {
    out.push_back(Action::Left);
  } else {
    out.push_back(Action::Right);
    out.push_back(Action::Right);
  }
  heading = want;
}

}  // namespace

std::string_view planner_name(Planner p) {
  switch (p) {
    case Planner::Bfs: return "bfs";
    case Planner::Dfs: return "dfs";
    case Planner::AStar: return "astar";
  }
  return "?";
}

std::vector<Action> compile_path(const std::vector<Coord>& path, Heading heading) {
  std::vector<Action> out;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Coord delta = path[i] - path[i - 1];
    const Heading dir = direction_of(delta);
    const int distance = std::abs(delta.x) + std::abs(delta.y);
    if (distance == 2) {
      rotate_towards(heading, dir, out);
      out.push_back(Action::Jump);
    } else if (heading == opposite(dir)) {
      out.push_back(Action::Back);
    } else {
      rotate_towards(heading, dir, out);
      out.push_back(Action::Forward);
    }
  }
  return out;
}

std::optional<Plan> bfs_plan(const Grid& g, AgentPose start, Coord goal) {
  if (!valid_endpoints(g, start.position, goal)) return std::nullopt;
  std::vector<int> parent(g.size(), kUnvisited);
  std::queue<Coord> frontier;
  frontier.push(start.position);
  parent[g.index(start.position)] = int(g.index(start.position));
  while (!frontier.empty()) {
    const Coord c = frontier.front();
    frontier.pop();
    if (c == goal) return finish(g, parent, start.position, goal, start.heading);
    for (Heading h : kHeadings) {
      const auto next = g.move_target(c, h, /*fire_blocks=*/true);
      if (next && parent[g.index(*next)] == kUnvisited) {
        parent[g.index(*next)] = int(g.index(c));
        frontier.push(*next);
      }
    }
  }
  return std::nullopt;
}

std::optional<Plan> dfs_plan(const Grid& g, AgentPose start, Coord goal) {
  if (!valid_endpoints(g, start.position, goal)) return std::nullopt;
  std::vector<int> parent(g.size(), kUnvisited);
  // Explicit stack of (cell, next direction to try) mirrors the recursive search.
  std::vector<std::pair<Coord, int>> stack{{start.position, 0}};
  parent[g.index(start.position)] = int(g.index(start.position));
  while (!stack.empty()) {
    auto& [cell, dir] = stack.back();
    if (cell == goal) return finish(g, parent, start.position, goal, start.heading);
    if (dir == 4) {
      stack.pop_back();
      continue;
    }
    const Heading h = kHeadings[std::size_t(dir++)];
    const auto next = g.move_target(cell, h, /*fire_blocks=*/true);
    if (next && parent[g.index(*next)] == kUnvisited) {
      parent[g.index(*next)] = int(g.index(cell));
      stack.emplace_back(*next, 0);
    }
  }
  return std::nullopt;
}

std::optional<Plan> astar_plan(const Grid& g, AgentPose start, Coord goal) {
  if (!valid_endpoints(g, start.position, goal)) return std::nullopt;
  const bool halve = has_jumpables(g);
  auto heuristic = [&](Coord c) {
    const int m = std::abs(c.x - goal.x) + std::abs(c.y - goal.y);
    return halve ? (m + 1) / 2 : m;
  };
  using Entry = std::tuple<int, int, int, int>;  // f, h, x, y
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::vector<int> cost(g.size(), -1);
  std::vector<int> parent(g.size(), kUnvisited);
  std::vector<char> closed(g.size(), 0);
  cost[g.index(start.position)] = 0;
  parent[g.index(start.position)] = int(g.index(start.position));
  open.emplace(heuristic(start.position), heuristic(start.position), start.position.x,
               start.position.y);
  while (!open.empty()) {
    const auto [f, h, x, y] = open.top();
    open.pop();
    const Coord c{x, y};
    if (closed[g.index(c)]) continue;
    closed[g.index(c)] = 1;
    if (c == goal) return finish(g, parent, start.position, goal, start.heading);
    for (Heading dir : kHeadings) {
      const auto next = g.move_target(c, dir, /*fire_blocks=*/true);
      if (!next || closed[g.index(*next)]) continue;
      const int tentative = cost[g.index(c)] + 1;
      int& known = cost[g.index(*next)];
      if (known < 0 || tentative < known) {
        known = tentative;
        parent[g.index(*next)] = int(g.index(c));
        const int hn = heuristic(*next);
        open.emplace(tentative + hn, hn, next->x, next->y);
      }
    }
  }
  return std::nullopt;
}

std::optional<Plan> make_plan(Planner planner, const Grid& g, AgentPose start, Coord goal) {
  switch (planner) {
    case Planner::Bfs: return bfs_plan(g, start, goal);
    case Planner::Dfs: return dfs_plan(g, start, goal);
    case Planner::AStar: return astar_plan(g, start, goal);
  }
  return std::nullopt;
}

std::optional<std::vector<Action>> shortest_action_sequence(const Grid& g, AgentPose start,
                                                            Coord goal, bool fire_blocks) {
  if (!g.in_bounds(start.position) || !g.in_bounds(goal)) return std::nullopt;
  auto state = [&](AgentPose p) { return g.index(p.position) * 4 + std::size_t(p.heading); };
  Grid blocked = g;
  if (fire_blocks) {
    for (std::size_t i = 0; i < blocked.size(); ++i) {
      Cell& c = blocked.at(blocked.coord(i));
      if (c.burning()) c = Cell{CellKind::Obstacle, false};
    }
  }
  std::vector<std::pair<int, Action>> parent(g.size() * 4, {kUnvisited, Action::Forward});
  std::queue<AgentPose> frontier;
  frontier.push(start);
  parent[state(start)] = {int(state(start)), Action::Forward};
  while (!frontier.empty()) {
    const AgentPose p = frontier.front();
    frontier.pop();
    if (p.position == goal) {
      std::vector<Action> actions;
      for (std::size_t s = state(p); s != state(start); s = std::size_t(parent[s].first))
        actions.push_back(parent[s].second);
      std::reverse(actions.begin(), actions.end());
      return actions;
    }
    for (Action a : kActions) {
      const AgentPose n = next_pose(blocked, p, a);
      if (parent[state(n)].first == kUnvisited) {
        parent[state(n)] = {int(state(p)), a};
        frontier.push(n);
      }
    }
  }
  return std::nullopt;
}

Outcome random_walk(Environment& env, Rng& rng, int max_steps) {
  for (int step = 0; step < max_steps && !env.terminal(); ++step) {
    const StepResult r = env.step(kActions[rng.below(kNumActions)]);
    if (r.terminal) return r.outcome;
  }
  return Outcome::TimedOut;
}

ExecutionResult execute_static_plan(FireEnv& env, Planner planner, const StepHook& after_step) {
  ExecutionResult result;
  const auto plan = make_plan(planner, env.grid(), env.pose(), env.scenario().goal);
  if (!plan) {
    result.no_path = true;
    return result;
  }
  std::size_t next = 0;
  while (!env.terminal()) {
    const Action a = next < plan->actions.size() ? plan->actions[next++] : Action::Left;
    const StepResult r = env.step(a);
    result.actions.push_back(a);
    result.total_reward += r.reward;
    ++result.steps;
    result.outcome = r.outcome;
    if (after_step && !env.terminal()) after_step(env);
  }
  return result;
}

ExecutionResult execute_replanning(FireEnv& env, Planner planner, const StepHook& after_step) {
  ExecutionResult result;
  while (!env.terminal()) {
    const auto plan = make_plan(planner, env.grid(), env.pose(), env.scenario().goal);
    const Action a = plan && !plan->actions.empty() ? plan->actions.front() : Action::Left;
    const StepResult r = env.step(a);
    result.actions.push_back(a);
    result.total_reward += r.reward;
    ++result.steps;
    result.outcome = r.outcome;
    if (after_step && !env.terminal()) after_step(env);
  }
  return result;
}

}  // namespace firenav
