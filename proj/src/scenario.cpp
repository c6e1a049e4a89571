#include "firenav/scenario.hpp"

#include <charconv>
#include <fstream>
#include <queue>
#include <sstream>

#include "firenav/errors.hpp"
#include "firenav/text.hpp"

namespace firenav {

void validate(const Scenario& s) {
  if (s.width() < 4 || s.height() < 4) throw ValidationError("scenario must be at least 4x4");
  if (!s.grid.in_bounds(s.start)) throw ValidationError("start out of bounds");
  if (!s.grid.in_bounds(s.goal)) throw ValidationError("goal out of bounds");
  if (s.start == s.goal) throw ValidationError("start and goal coincide");
  if (s.grid.at(s.start).kind != CellKind::Free) throw ValidationError("start cell is not free");
  if (s.grid.at(s.goal).kind != CellKind::Goal) throw ValidationError("goal cell is not marked Goal");
  if (s.grid.count(CellKind::Goal) != 1) throw ValidationError("scenario needs exactly one goal");
  if (!(s.spread_prob >= 0.0 && s.spread_prob <= 1.0))
    throw ValidationError("spread_prob outside [0,1]");
  if (!(s.ignition_prob >= 0.0 && s.ignition_prob <= 1.0))
    throw ValidationError("ignition_prob outside [0,1]");
  if (s.max_steps < 1) throw ValidationError("max_steps must be >= 1");
  if (!reachable(s.grid, s.start, s.goal, /*fire_blocks=*/false))
    throw ValidationError("goal unreachable from start");
}

Scenario parse_scenario(std::string_view text) {
  std::vector<std::string_view> lines = split_lines(text);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("empty scenario", 1);

  const std::vector<std::string_view> head = split_ws(lines[0]);
  if (head.size() != 6)
    throw ParseError("header needs 'width height max_steps spread_prob ignition_prob seed'", 1);
  Scenario s;
  const int width = parse_number<int>(head[0], 1, "width");
  const int height = parse_number<int>(head[1], 1, "height");
  s.max_steps = parse_number<int>(head[2], 1, "max_steps");
  s.spread_prob = parse_number<double>(head[3], 1, "spread_prob");
  s.ignition_prob = parse_number<double>(head[4], 1, "ignition_prob");
  s.seed = parse_number<std::uint64_t>(head[5], 1, "seed");
  if (width <= 0 || height <= 0) throw ParseError("non-positive grid size", 1);
  if (lines.size() != std::size_t(height) + 1)
    throw ParseError("expected " + std::to_string(height) + " grid rows, found " +
                         std::to_string(lines.size() - 1),
                     lines.size());

  s.grid = Grid(width, height);
  bool have_start = false;
  bool have_goal = false;
  for (int y = 0; y < height; ++y) {
    const std::size_t line_no = std::size_t(y) + 2;
    std::string_view row = lines[std::size_t(y) + 1];
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (row.size() != std::size_t(width))
      throw ParseError("row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(width),
                       line_no);
    for (int x = 0; x < width; ++x) {
      Cell& cell = s.grid.at({x, y});
      switch (row[std::size_t(x)]) {
        case '.': break;
        case '#': cell.kind = CellKind::Obstacle; break;
        case 'o': cell.kind = CellKind::Obstacle; cell.jumpable = true; break;
        case 'F': cell.kind = CellKind::Fire; break;
        case 'S':
          if (have_start) throw ParseError("duplicate start 'S'", line_no);
          have_start = true;
          s.start = {x, y};
          break;
        case 'G':
          if (have_goal) throw ParseError("duplicate goal 'G'", line_no);
          have_goal = true;
          s.goal = {x, y};
          cell.kind = CellKind::Goal;
          break;
        default:
          throw ParseError(std::string("unknown cell character '") + row[std::size_t(x)] + "'",
                           line_no);
      }
    }
  }
  if (!have_start) throw ParseError("missing start 'S'", 0);
  if (!have_goal) throw ParseError("missing goal 'G'", 0);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path));
}

std::string serialize(const Scenario& s) {
  std::string out = std::to_string(s.width()) + ' ' + std::to_string(s.height()) + ' ' +
                    std::to_string(s.max_steps) + ' ' + format_double(s.spread_prob) + ' ' +
                    format_double(s.ignition_prob) + ' ' + std::to_string(s.seed) + '\n';
  for (int y = 0; y < s.height(); ++y) {
    for (int x = 0; x < s.width(); ++x) {
      const Coord c{x, y};
      const Cell& cell = s.grid.at(c);
      char ch = '.';
      if (c == s.start) ch = 'S';
      else if (cell.kind == CellKind::Goal) ch = 'G';
      else if (cell.kind == CellKind::Fire) ch = 'F';
      else if (cell.kind == CellKind::Obstacle) ch = cell.jumpable ? 'o' : '#';
      out += ch;
    }
    out += '\n';
  }
  return out;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_file(path, serialize(scenario));
}

std::uint64_t scenario_hash(const Scenario& scenario) { return fnv1a64(serialize(scenario)); }

std::vector<Coord> reachable_cells(const Grid& grid, Coord from, bool fire_blocks) {
  std::vector<Coord> out;
  if (!grid.in_bounds(from)) return out;
  std::vector<char> seen(grid.size(), 0);
  std::queue<Coord> frontier;
  frontier.push(from);
  seen[grid.index(from)] = 1;
  while (!frontier.empty()) {
    const Coord c = frontier.front();
    frontier.pop();
    out.push_back(c);
    for (Heading h : kHeadings) {
      if (auto next = grid.move_target(c, h, fire_blocks)) {
        if (!seen[grid.index(*next)]) {
          seen[grid.index(*next)] = 1;
          frontier.push(*next);
        }
      }
    }
  }
  return out;
}

bool reachable(const Grid& grid, Coord from, Coord to, bool fire_blocks) {
  for (Coord c : reachable_cells(grid, from, fire_blocks))
    if (c == to) return true;
  return false;
}

Scenario open_scenario(int width, int height, std::uint64_t seed) {
  Scenario s;
  s.grid = Grid(width, height);
  s.start = {0, 0};
  s.goal = {width - 1, height - 1};
  s.grid.at(s.goal).kind = CellKind::Goal;
  s.max_steps = 4 * (width + height);
  s.seed = seed;
  return s;
}

}  // namespace firenav
