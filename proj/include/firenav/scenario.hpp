#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "firenav/grid.hpp"

namespace firenav {

// A world at t=0 plus the parameters of its fire dynamics.
struct Scenario {
  Grid grid;
  Coord start;
  Heading start_heading = Heading::N;  // not stored in scenario files
  Coord goal;
  double spread_prob = 0.0;    // per burning 4-neighbor per step
  double ignition_prob = 0.0;  // spontaneous, per free cell per step
  int max_steps = 1;
  std::uint64_t seed = 0;

  int width() const { return grid.width(); }
  int height() const { return grid.height(); }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Throws ValidationError unless: size >= 4x4, start != goal, start Free,
// exactly one Goal cell located at `goal`, probabilities in [0,1],
// max_steps >= 1 and the goal reachable from start when fire is ignored.
void validate(const Scenario& scenario);

// Text format:
//   width height max_steps spread_prob ignition_prob seed
//   <height lines of width characters from . # o F S G>
// Throws ParseError (with line number) on malformed input.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// FNV-1a 64 over the canonical serialization; identifies a scenario in episode logs.
std::uint64_t scenario_hash(const Scenario& scenario);

// Cells reachable from `from` via single moves (jump-expanded adjacency).
std::vector<Coord> reachable_cells(const Grid& grid, Coord from, bool fire_blocks);
bool reachable(const Grid& grid, Coord from, Coord to, bool fire_blocks);

// Empty width x height grid, start top-left, goal bottom-right, max_steps 4*(w+h).
Scenario open_scenario(int width, int height, std::uint64_t seed = 0);

}  // namespace firenav
