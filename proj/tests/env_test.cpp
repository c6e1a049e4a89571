#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "firenav/env.hpp"
#include "firenav/errors.hpp"

namespace firenav {
namespace {

Scenario from_rows(const std::string& header, const std::string& rows) {
  return parse_scenario(header + "\n" + rows);
}

std::set<std::size_t> fire_set(const Grid& g) {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.cells()[i].burning()) out.insert(i);
  return out;
}

TEST(Scenario, ParsesAllCellKinds) {
  const Scenario s = from_rows("5 4 20 0.25 0.001 42",
                               "S.#..\n"
                               ".o.F.\n"
                               ".....\n"
                               "....G\n");
  EXPECT_EQ(s.width(), 5);
  EXPECT_EQ(s.height(), 4);
  EXPECT_EQ(s.max_steps, 20);
  EXPECT_DOUBLE_EQ(s.spread_prob, 0.25);
  EXPECT_DOUBLE_EQ(s.ignition_prob, 0.001);
  EXPECT_EQ(s.seed, 42u);
  EXPECT_EQ(s.start, (Coord{0, 0}));
  EXPECT_EQ(s.goal, (Coord{4, 3}));
  EXPECT_EQ(s.grid.at({2, 0}).kind, CellKind::Obstacle);
  EXPECT_FALSE(s.grid.at({2, 0}).jumpable);
  EXPECT_TRUE(s.grid.at({1, 1}).jumpable);
  EXPECT_EQ(s.grid.at({3, 1}).kind, CellKind::Fire);
  EXPECT_EQ(s.grid.at({4, 3}).kind, CellKind::Goal);
  EXPECT_NO_THROW(validate(s));
}

TEST(Scenario, SerializeRoundTrips) {
  const Scenario s = from_rows("6 4 30 0.05 0.002 7",
                               "S..#..\n"
                               ".oF...\n"
                               "......\n"
                               ".....G\n");
  const Scenario back = parse_scenario(serialize(s));
  EXPECT_EQ(back, s);
  EXPECT_EQ(scenario_hash(back), scenario_hash(s));
}

TEST(Scenario, RejectsDuplicateStartAndGoal) {
  try {
    from_rows("4 4 10 0 0 1", "S..S\n....\n....\n...G\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(from_rows("4 4 10 0 0 1", "S..G\n....\n....\n...G\n"), ParseError);
}

TEST(Scenario, ReportsLineOfBadRow) {
  try {
    from_rows("4 4 10 0 0 1", "S...\n...\n....\n...G\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(from_rows("4 4 10 0 0", "S...\n....\n....\n...G\n"), ParseError);
  EXPECT_THROW(from_rows("4 4 10 0 0 1", "S...\n..x.\n....\n...G\n"), ParseError);
}

TEST(EnvCreate, EmptyGridHasZeroCoverage) {
  FireEnv env(open_scenario(8, 8));
  EXPECT_EQ(env.pose().position, (Coord{0, 0}));
  EXPECT_EQ(env.t(), 0);
  EXPECT_DOUBLE_EQ(env.coverage(), 0.0);
  EXPECT_FALSE(env.terminal());
}

TEST(EnvCreate, RejectsStartEqualGoal) {
  Scenario s = open_scenario(8, 8);
  s.grid.at(s.goal).kind = CellKind::Free;
  s.goal = s.start;
  s.grid.at(s.goal).kind = CellKind::Goal;
  EXPECT_THROW(FireEnv{s}, ValidationError);
}

TEST(EnvCreate, RejectsWalledOffGoal) {
  const Scenario s = from_rows("6 6 40 0 0 1",
                               "S.....\n"
                               "......\n"
                               "......\n"
                               "....##\n"
                               "....#.\n"
                               "....#G\n");
  EXPECT_THROW(FireEnv{s}, ValidationError);
  // A jumpable obstacle in the wall makes the goal reachable again.
  Scenario open = s;
  open.grid.at({4, 5}).jumpable = true;
  EXPECT_NO_THROW(FireEnv{open});
  // Fire does not count as a wall for reachability.
  Scenario fiery = s;
  fiery.grid.at({4, 5}).kind = CellKind::Fire;
  EXPECT_NO_THROW(FireEnv{fiery});
}

TEST(EnvCreate, RejectsSmallGridAndBadWindow) {
  EXPECT_THROW(FireEnv{open_scenario(3, 8)}, ValidationError);
  EXPECT_THROW(FireEnv(open_scenario(8, 8), EnvOptions{.window = 4}), ValidationError);
}

TEST(EnvStep, ForwardOntoGoalRewardsTen) {
  Scenario s = open_scenario(5, 5);
  s.start = {4, 3};
  s.start_heading = Heading::S;
  FireEnv env(s);
  const StepResult r = env.step(Action::Forward);
  EXPECT_DOUBLE_EQ(r.reward, 10.0);
  EXPECT_TRUE(r.terminal);
  EXPECT_EQ(r.outcome, Outcome::ReachedGoal);
  EXPECT_THROW(env.step(Action::Forward), UsageError);
}

TEST(EnvStep, SteppingIntoFireBurns) {
  Scenario s = open_scenario(5, 5);
  s.start_heading = Heading::E;
  s.grid.at({1, 0}).kind = CellKind::Fire;
  FireEnv env(s);
  const StepResult r = env.step(Action::Forward);
  EXPECT_DOUBLE_EQ(r.reward, -10.0);
  EXPECT_EQ(r.outcome, Outcome::Burned);
  EXPECT_TRUE(r.terminal);
}

TEST(EnvStep, EngulfedBySpreadingFireBurns) {
  Scenario s = open_scenario(5, 5);
  s.spread_prob = 1.0;
  s.grid.at({1, 0}).kind = CellKind::Fire;
  FireEnv env(s);
  // Rotating in place next to a certain-spread fire.
  const StepResult r = env.step(Action::Left);
  EXPECT_EQ(r.outcome, Outcome::Burned);
  EXPECT_DOUBLE_EQ(r.reward, -10.0);
}

TEST(EnvStep, RotationCostsStepPenalty) {
  FireEnv env(open_scenario(8, 8));
  const StepResult r = env.step(Action::Left);
  EXPECT_DOUBLE_EQ(r.reward, -0.01);
  EXPECT_EQ(r.outcome, Outcome::Ongoing);
  EXPECT_FALSE(r.terminal);
  EXPECT_EQ(env.pose().heading, Heading::W);
  EXPECT_EQ(env.pose().position, (Coord{0, 0}));
  env.step(Action::Right);
  env.step(Action::Right);
  EXPECT_EQ(env.pose().heading, Heading::E);
}

TEST(EnvStep, TimesOutAtMaxSteps) {
  Scenario s = open_scenario(6, 6);
  s.max_steps = 3;
  FireEnv env(s);
  EXPECT_EQ(env.step(Action::Left).outcome, Outcome::Ongoing);
  EXPECT_EQ(env.step(Action::Left).outcome, Outcome::Ongoing);
  const StepResult last = env.step(Action::Left);
  EXPECT_EQ(last.outcome, Outcome::TimedOut);
  EXPECT_TRUE(last.terminal);
  EXPECT_DOUBLE_EQ(last.reward, -0.01);
}

TEST(EnvStep, BlockedMovesAreNoOps) {
  Scenario s = open_scenario(5, 5);
  s.grid.at({0, 1}).kind = CellKind::Obstacle;
  s.start_heading = Heading::S;
  FireEnv env(s);
  env.step(Action::Forward);  // wall ahead
  EXPECT_EQ(env.pose().position, (Coord{0, 0}));
  env.step(Action::Back);  // off the grid
  EXPECT_EQ(env.pose().position, (Coord{0, 0}));
  EXPECT_EQ(env.t(), 2);
}

TEST(EnvStep, BackMovesAgainstHeading) {
  Scenario s = open_scenario(5, 5);
  s.start = {2, 2};
  s.start_heading = Heading::N;
  FireEnv env(s);
  env.step(Action::Back);
  EXPECT_EQ(env.pose().position, (Coord{2, 3}));
  EXPECT_EQ(env.pose().heading, Heading::N);
}

TEST(EnvStep, JumpClearsJumpableObstacleOnly) {
  const Scenario s = from_rows("6 4 30 0 0 1",
                               "So.#..\n"
                               "......\n"
                               "......\n"
                               ".....G\n");
  Scenario east = s;
  east.start_heading = Heading::E;
  FireEnv env(east);
  env.step(Action::Jump);
  EXPECT_EQ(env.pose().position, (Coord{2, 0}));
  // Wall ahead: Jump degrades to Forward, which is blocked.
  env.step(Action::Jump);
  EXPECT_EQ(env.pose().position, (Coord{2, 0}));
  // Free cell ahead: Jump is a single Forward step.
  env.step(Action::Right);
  env.step(Action::Jump);
  EXPECT_EQ(env.pose().position, (Coord{2, 1}));
}

TEST(EnvStep, JumpDoesNotLandOnObstacle) {
  const Scenario s = from_rows("6 4 30 0 0 1",
                               "So#...\n"
                               "......\n"
                               "......\n"
                               ".....G\n");
  Scenario east = s;
  east.start_heading = Heading::E;
  FireEnv env(east);
  env.step(Action::Jump);
  EXPECT_EQ(env.pose().position, (Coord{0, 0}));
}

TEST(SpreadFire, ZeroProbabilityLeavesFireUnchanged) {
  Scenario s = open_scenario(8, 8);
  s.grid.at({3, 3}).kind = CellKind::Fire;
  s.grid.at({5, 1}).kind = CellKind::Fire;
  FireEnv env(s);
  const auto before = fire_set(env.grid());
  for (int i = 0; i < 20; ++i) EXPECT_EQ(env.spread_fire(), 0);
  EXPECT_EQ(fire_set(env.grid()), before);
}

TEST(SpreadFire, CertainSpreadIgnitesAllFourNeighbors) {
  Scenario s = open_scenario(5, 5);
  s.spread_prob = 1.0;
  s.grid.at({2, 2}).kind = CellKind::Fire;
  FireEnv env(s);
  EXPECT_EQ(env.spread_fire(), 4);
  const std::set<std::size_t> expected = {
      env.grid().index({2, 2}), env.grid().index({2, 1}), env.grid().index({1, 2}),
      env.grid().index({3, 2}), env.grid().index({2, 3})};
  EXPECT_EQ(fire_set(env.grid()), expected);
}

TEST(SpreadFire, GoalNeverIgnites) {
  Scenario s = open_scenario(5, 5);
  s.spread_prob = 1.0;
  s.ignition_prob = 1.0;
  FireEnv env(s);
  env.spread_fire();
  EXPECT_EQ(env.grid().at(s.goal).kind, CellKind::Goal);
}

TEST(SpreadFire, SingleNeighborIgnitionRateMatchesProbability) {
  Scenario s = open_scenario(5, 5);
  s.spread_prob = 0.3;
  s.grid.at({2, 2}).kind = CellKind::Fire;
  const Coord probe{2, 1};
  int ignited = 0;
  constexpr int kTrials = 10000;
  for (int trial = 0; trial < kTrials; ++trial) {
    s.seed = std::uint64_t(trial) + 1;
    FireEnv env(s);
    env.spread_fire();
    if (env.grid().at(probe).burning()) ++ignited;
  }
  EXPECT_NEAR(double(ignited) / kTrials, 0.3, 0.02);
}

TEST(SpreadFire, SpontaneousIgnitionRate) {
  Scenario s = open_scenario(10, 10);
  s.ignition_prob = 0.1;
  int ignited = 0;
  for (int trial = 0; trial < 200; ++trial) {
    s.seed = std::uint64_t(trial) + 11;
    FireEnv env(s);
    ignited += env.spread_fire();
  }
  // 99 free cells per trial.
  EXPECT_NEAR(double(ignited) / (200.0 * 99.0), 0.1, 0.01);
}

TEST(Coverage, CountsBurningOverOpenCells) {
  Scenario s = open_scenario(8, 8);
  FireEnv empty(s);
  EXPECT_DOUBLE_EQ(empty.coverage(), 0.0);
  for (int x = 0; x < 8; ++x) s.grid.at({x, 4}).kind = CellKind::Fire;
  FireEnv eight(s);
  EXPECT_DOUBLE_EQ(eight.coverage(), 0.125);
}

TEST(Coverage, AllOpenCellsBurningIsOne) {
  Grid g(4, 4);
  for (std::size_t i = 0; i < g.size(); ++i) g.at(g.coord(i)).kind = CellKind::Fire;
  g.at({1, 1}).kind = CellKind::Obstacle;
  EXPECT_DOUBLE_EQ(coverage(g), 1.0);
  g.at({2, 2}).kind = CellKind::Free;
  EXPECT_DOUBLE_EQ(coverage(g), 14.0 / 15.0);
}

TEST(SeedFires, ZeroTargetLeavesGridUnchanged) {
  FireEnv env(open_scenario(10, 10, 3));
  env.seed_fires(0.0);
  EXPECT_EQ(env.burning_count(), 0u);
}

TEST(SeedFires, ThirtyPercentOfTenByTen) {
  FireEnv env(open_scenario(10, 10, 3));
  env.seed_fires(0.3);
  EXPECT_EQ(env.burning_count(), 30u);
  EXPECT_DOUBLE_EQ(env.coverage(), 0.3);
  EXPECT_FALSE(env.grid().at(env.scenario().start).burning());
  EXPECT_EQ(env.grid().at(env.scenario().goal).kind, CellKind::Goal);
}

TEST(SeedFires, DeterministicPerSeed) {
  FireEnv a(open_scenario(10, 10, 99));
  FireEnv b(open_scenario(10, 10, 99));
  FireEnv c(open_scenario(10, 10, 100));
  a.seed_fires(0.4);
  b.seed_fires(0.4);
  c.seed_fires(0.4);
  EXPECT_EQ(fire_set(a.grid()), fire_set(b.grid()));
  EXPECT_NE(fire_set(a.grid()), fire_set(c.grid()));
}

TEST(SeedFires, RejectsOutOfRangeTargets) {
  FireEnv env(open_scenario(4, 4, 1));
  EXPECT_THROW(env.seed_fires(0.95), std::invalid_argument);
  EXPECT_THROW(env.seed_fires(-0.1), std::invalid_argument);
  // 16 open cells, start and goal excluded: 14 available, 0.9 needs 15.
  EXPECT_THROW(env.seed_fires(0.9), std::invalid_argument);
}

// Independent oracle for the egocentric window: for each heading, the world
// offset of the cell shown at (row, col) written out by hand for k = 3.
Coord window3_offset(Heading h, int row, int col) {
  const int f = 1 - row;   // cells ahead
  const int r = col - 1;   // cells to the right
  switch (h) {
    case Heading::N: return {r, -f};
    case Heading::E: return {f, r};
    case Heading::S: return {-r, f};
    case Heading::W: return {-f, -r};
  }
  return {};
}

TEST(RenderObservation, InitialStackIsFourIdenticalFrames) {
  FireEnv env(open_scenario(8, 8));
  const Observation& obs = env.observation();
  for (int i = 0; i < kFrameStack; ++i) EXPECT_EQ(obs.frame(i), obs.frame(0));
}

TEST(RenderObservation, AllFreeWindowIsZero) {
  Scenario s = open_scenario(12, 12);
  s.start = {4, 4};
  FireEnv env(s, EnvOptions{.window = 5});
  for (double p : env.observation().newest().pixels) EXPECT_DOUBLE_EQ(p, 0.0);
}

TEST(RenderObservation, FireAheadLightsPixelAboveCenter) {
  for (Heading h : kHeadings) {
    Scenario s = open_scenario(7, 7);
    s.start = {3, 3};
    s.start_heading = h;
    s.grid.at(s.start + offset(h)).kind = CellKind::Fire;
    FireEnv env(s, EnvOptions{.window = 3});
    const Frame& f = env.observation().newest();
    EXPECT_DOUBLE_EQ(f.at(0, 1), 1.0) << heading_char(h);
    EXPECT_DOUBLE_EQ(f.at(1, 1), 0.0);
    EXPECT_DOUBLE_EQ(f.at(2, 1), 0.0);
  }
}

TEST(RenderObservation, MatchesHandWrittenWindowOracle) {
  const Scenario base = from_rows("6 6 40 0 0 1",
                                  "S.#...\n"
                                  ".oF...\n"
                                  "..#...\n"
                                  "......\n"
                                  "...F..\n"
                                  ".....G\n");
  for (Heading h : kHeadings) {
    for (Coord pos : {Coord{1, 2}, Coord{0, 0}, Coord{4, 4}}) {
      Scenario s = base;
      s.start = pos;
      s.start_heading = h;
      if (s.grid.at(pos).kind != CellKind::Free) continue;
      FireEnv env(s, EnvOptions{.window = 3});
      const Frame& f = env.observation().newest();
      for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) {
          const Coord w = pos + window3_offset(h, row, col);
          const double expected = s.grid.in_bounds(w) ? intensity(s.grid.at(w)) : 0.5;
          EXPECT_DOUBLE_EQ(f.at(row, col), expected);
        }
      }
    }
  }
}

TEST(RenderObservation, HistoryShiftsOldestFirst) {
  Scenario s = open_scenario(8, 8);
  s.start = {3, 3};
  FireEnv env(s, EnvOptions{.window = 3});
  const Frame f0 = env.observation().newest();
  env.step(Action::Right);
  const Frame f1 = env.observation().newest();
  env.step(Action::Forward);
  const Observation& obs = env.observation();
  EXPECT_EQ(obs.frame(0), f0);
  EXPECT_EQ(obs.frame(1), f0);
  EXPECT_EQ(obs.frame(2), f1);
}

TEST(RenderObservation, GoalBeaconMarksBorderTowardsGoal) {
  Scenario s = open_scenario(16, 16);
  s.start = {0, 15};
  s.start_heading = Heading::N;
  s.grid.at(s.goal).kind = CellKind::Free;
  s.goal = {0, 0};
  s.grid.at(s.goal).kind = CellKind::Goal;
  FireEnv plain(s, EnvOptions{.window = 5});
  FireEnv beacon(s, EnvOptions{.window = 5, .goal_beacon = true});
  EXPECT_DOUBLE_EQ(plain.observation().newest().at(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(beacon.observation().newest().at(0, 2), kGoalIntensity);
}

// Hand-rolled property test over random scenarios and random action sequences.
TEST(EnvProperties, RandomRollouts) {
  Rng gen(2024);
  for (int round = 0; round < 60; ++round) {
    Scenario s = open_scenario(4 + int(gen.below(8)), 4 + int(gen.below(8)), gen.next());
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      const Coord c = s.grid.coord(i);
      if (c == s.start || c == s.goal) continue;
      const double u = gen.uniform();
      if (u < 0.1) s.grid.at(c).kind = CellKind::Obstacle;
      else if (u < 0.15) { s.grid.at(c).kind = CellKind::Obstacle; s.grid.at(c).jumpable = true; }
      else if (u < 0.2) s.grid.at(c).kind = CellKind::Fire;
    }
    if (!reachable(s.grid, s.start, s.goal, false)) continue;
    s.spread_prob = gen.uniform() * 0.3;
    s.ignition_prob = gen.uniform() * 0.01;
    s.max_steps = 1 + int(gen.below(60));
    const EnvOptions opts{.window = 5};

    std::vector<Action> actions;
    for (int i = 0; i < 80; ++i) actions.push_back(kActions[gen.below(5)]);

    auto run = [&](std::vector<StepResult>* out) {
      FireEnv env(s, opts);
      auto fires = fire_set(env.grid());
      double cov = env.coverage();
      for (Action a : actions) {
        if (env.terminal()) break;
        StepResult r = env.step(a);
        const auto now = fire_set(env.grid());
        EXPECT_TRUE(std::includes(now.begin(), now.end(), fires.begin(), fires.end()));
        EXPECT_GE(env.coverage(), cov);
        fires = now;
        cov = env.coverage();
        EXPECT_TRUE(env.grid().in_bounds(env.pose().position));
        EXPECT_NE(env.grid().at(env.pose().position).kind, CellKind::Obstacle);
        EXPECT_EQ(r.terminal, r.outcome != Outcome::Ongoing);
        if (r.reward == 10.0 || r.reward == -10.0) EXPECT_TRUE(r.terminal);
        else EXPECT_DOUBLE_EQ(r.reward, -0.01);
        for (int i = 0; i < kFrameStack; ++i) {
          const Frame& f = r.observation.frame(i);
          ASSERT_EQ(f.size, 5);
          ASSERT_EQ(f.pixels.size(), 25u);
          for (double p : f.pixels) EXPECT_TRUE(p >= 0.0 && p <= 1.0);
        }
        out->push_back(std::move(r));
      }
    };
    std::vector<StepResult> first, second;
    run(&first);
    run(&second);
    ASSERT_EQ(first.size(), second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
      EXPECT_EQ(first[i].reward, second[i].reward);
      EXPECT_EQ(first[i].outcome, second[i].outcome);
      EXPECT_EQ(first[i].observation, second[i].observation);
    }
  }
}

TEST(EnvShaping, FireProximityPenalty) {
  Scenario s = open_scenario(8, 8);
  s.start = {1, 1};
  s.grid.at({4, 1}).kind = CellKind::Fire;
  FireEnv env(s, EnvOptions{.fire_proximity_penalty = 0.1});
  const StepResult r = env.step(Action::Left);
  EXPECT_DOUBLE_EQ(r.reward, -0.01 - 0.1 / 3.0);
}

}  // namespace
}  // namespace firenav
