#include "firenav/grid.hpp"

#include <algorithm>

namespace firenav {

char heading_char(Heading h) { return "NESW"[static_cast<int>(h)]; }

std::optional<Action> action_from_index(long long index) {
  if (index < 0 || index >= kNumActions) return std::nullopt;
  return static_cast<Action>(index);
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Forward: return "Forward";
    case Action::Back: return "Back";
    case Action::Left: return "Left";
    case Action::Right: return "Right";
    case Action::Jump: return "Jump";
  }
  return "?";
}

std::optional<Coord> Grid::move_target(Coord from, Heading dir, bool fire_blocks) const {
  auto open = [&](Coord c) {
    if (!in_bounds(c)) return false;
    const Cell& cell = at(c);
    return cell.passable() && !(fire_blocks && cell.burning());
  };
  const Coord next = from + offset(dir);
  if (open(next)) return next;
  if (in_bounds(next) && at(next).kind == CellKind::Obstacle && at(next).jumpable) {
    const Coord landing = from + 2 * offset(dir);
    if (open(landing)) return landing;
  }
  return std::nullopt;
}

std::size_t Grid::count(CellKind kind) const {
  return std::size_t(std::count_if(cells_.begin(), cells_.end(),
                                   [kind](const Cell& c) { return c.kind == kind; }));
}

}  // namespace firenav
