#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace firenav {

// x is the column (0 = left), y is the row (0 = top line of a scenario file).
struct Coord {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(Coord, Coord) = default;
  friend constexpr auto operator<=>(Coord, Coord) = default;
  friend constexpr Coord operator+(Coord a, Coord b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Coord operator-(Coord a, Coord b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Coord operator*(int k, Coord a) { return {k * a.x, k * a.y}; }
};

enum class Heading : std::uint8_t { N = 0, E = 1, S = 2, W = 3 };

inline constexpr std::array<Heading, 4> kHeadings = {Heading::N, Heading::E, Heading::S,
                                                     Heading::W};

constexpr Coord offset(Heading h) {
  switch (h) {
    case Heading::N: return {0, -1};
    case Heading::E: return {1, 0};
    case Heading::S: return {0, 1};
    case Heading::W: return {-1, 0};
  }
  return {0, 0};
}
constexpr Heading turn_right(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }
constexpr Heading turn_left(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }
constexpr Heading opposite(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 2) % 4); }
char heading_char(Heading h);

// Index mapping is part of the log and wire formats: do not reorder.
enum class Action : std::uint8_t { Forward = 0, Back = 1, Left = 2, Right = 3, Jump = 4 };

inline constexpr int kNumActions = 5;
inline constexpr std::array<Action, kNumActions> kActions = {
    Action::Forward, Action::Back, Action::Left, Action::Right, Action::Jump};

constexpr int index_of(Action a) { return static_cast<int>(a); }
std::optional<Action> action_from_index(long long index);
std::string_view action_name(Action a);

enum class CellKind : std::uint8_t { Free, Obstacle, Fire, Goal };

struct Cell {
  CellKind kind = CellKind::Free;
  // Only meaningful for obstacles: ladders and furniture can be jumped, walls cannot.
  bool jumpable = false;

  friend bool operator==(const Cell&, const Cell&) = default;

  bool passable() const { return kind != CellKind::Obstacle; }
  bool burning() const { return kind == CellKind::Fire; }
};

class Grid {
 public:
  Grid() = default;
  Grid(int width, int height) : width_(width), height_(height), cells_(std::size_t(width) * height) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Coord c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

  const Cell& at(Coord c) const { return cells_[index(c)]; }
  Cell& at(Coord c) { return cells_[index(c)]; }
  std::size_t index(Coord c) const { return std::size_t(c.y) * width_ + c.x; }
  Coord coord(std::size_t i) const { return {int(i % width_), int(i / width_)}; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<Cell>& cells() const { return cells_; }

  // The cell a single move from `from` towards `dir` arrives at, used by both
  // planners and reachability checks: the neighbor itself if passable, else
  // the cell behind it when the neighbor is a jumpable obstacle. Fire counts
  // as blocked when `fire_blocks` is set.
  std::optional<Coord> move_target(Coord from, Heading dir, bool fire_blocks) const;

  std::size_t count(CellKind kind) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Cell> cells_;
};

}  // namespace firenav
