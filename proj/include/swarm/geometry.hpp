#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace swarm {

/// Grid coordinate. `row` grows downward, `col` grows rightward. Unbounded:
/// off-map coordinates are legal values.
struct Coord {
    int row = 0;
    int col = 0;

    friend constexpr auto operator<=>(const Coord&, const Coord&) = default;
    friend constexpr Coord operator+(Coord a, Coord b) { return {a.row + b.row, a.col + b.col}; }
    friend constexpr Coord operator-(Coord a, Coord b) { return {a.row - b.row, a.col - b.col}; }
};

constexpr int manhattan(Coord a, Coord b) {
    const int dr = a.row - b.row;
    const int dc = a.col - b.col;
    return (dr < 0 ? -dr : dr) + (dc < 0 ? -dc : dc);
}

/// Push directions, listed in cross-direction arbitration priority order.
enum class Direction : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr std::array<Direction, 4> kDirections = {Direction::Up, Direction::Down,
                                                         Direction::Left, Direction::Right};

constexpr Coord offset(Direction d) {
    switch (d) {
        case Direction::Up: return {-1, 0};
        case Direction::Down: return {1, 0};
        case Direction::Left: return {0, -1};
        case Direction::Right: return {0, 1};
    }
    return {0, 0};
}

constexpr std::size_t index_of(Direction d) { return static_cast<std::size_t>(d); }

std::string_view to_string(Direction d);

/// Primary per-round action. Switch is only legal in the synchronization task.
enum class Action : std::uint8_t { Up, Down, Left, Right, Stay, Switch };

std::string_view to_string(Action a);
std::optional<Action> parse_action(std::string_view text);  // case-insensitive

/// Movement direction of an action, if it is one of UP/DOWN/LEFT/RIGHT.
std::optional<Direction> direction_of(Action a);

constexpr bool is_move(Action a) {
    return a == Action::Up || a == Action::Down || a == Action::Left || a == Action::Right;
}

}  // namespace swarm
