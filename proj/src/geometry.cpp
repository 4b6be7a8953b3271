#include "swarm/geometry.hpp"

#include <algorithm>
#include <cctype>

namespace swarm {

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::Up: return "UP";
        case Direction::Down: return "DOWN";
        case Direction::Left: return "LEFT";
        case Direction::Right: return "RIGHT";
    }
    return "?";
}

std::string_view to_string(Action a) {
    switch (a) {
        case Action::Up: return "UP";
        case Action::Down: return "DOWN";
        case Action::Left: return "LEFT";
        case Action::Right: return "RIGHT";
        case Action::Stay: return "STAY";
        case Action::Switch: return "SWITCH";
    }
    return "?";
}

std::optional<Action> parse_action(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (Action a : {Action::Up, Action::Down, Action::Left, Action::Right, Action::Stay,
                     Action::Switch}) {
        if (upper == to_string(a)) return a;
    }
    return std::nullopt;
}

std::optional<Direction> direction_of(Action a) {
    switch (a) {
        case Action::Up: return Direction::Up;
        case Action::Down: return Direction::Down;
        case Action::Left: return Direction::Left;
        case Action::Right: return Direction::Right;
        default: return std::nullopt;
    }
}

}  // namespace swarm
