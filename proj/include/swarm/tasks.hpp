#pragma once

#include <string>
#include <vector>

#include "swarm/grid.hpp"

namespace swarm {

inline constexpr double kWallThreatWeight = 0.9;

/// Agents plus 0.9 x walls inside the 8x8 window whose top-left corner is
/// c - (4, 4). Off-map cells count as nothing.
double threat_heuristic(const EnvironmentState& state, Coord c);

struct PreyStep {
    Coord from;
    Coord to;
    bool moved = false;
};

/// Moves the prey along the two-step path whose destination has the lowest
/// threat; both cells of the path must be empty (the prey's own cell counts
/// as empty). Ties go to the smallest destination in row-major order.
EnvironmentState pursuit_prey_step(const EnvironmentState& state, PreyStep* step = nullptr);

/// True when every 4-neighbour of the prey is an agent or a wall.
bool prey_captured(const EnvironmentState& state);

struct CaptureOutcome {
    bool scored = false;
    std::vector<Coord> candidates;  // respawn cells drawn this round
    std::optional<Coord> respawn;   // nullopt with scored => no empty cell, episode over
};

/// Scores a capture and respawns the prey at the least threatened of
/// `respawn_candidates` seeded random empty cells.
EnvironmentState pursuit_check_and_respawn(const EnvironmentState& state,
                                           CaptureOutcome* outcome = nullptr);

/// Scores when all lights agree and differ from the last scored state.
bool sync_update(const std::vector<bool>& lights, TaskState& task_state);

struct ForagingOutcome {
    int picked_up = 0;
    int delivered = 0;
};

/// Each agent makes at most one transition, decided by what it carried at
/// the start of the update: carriers next to N drop (+1 score), others next
/// to F pick up. Food never runs out.
ForagingOutcome foraging_update(EnvironmentState& state);

/// Translation-invariant optimal matching cost between two point sets.
/// Throws InvalidInputError if the sizes differ.
double flocking_distance(const std::vector<Coord>& src, const std::vector<Coord>& tgt);

/// Hollow rectangle of n cells, as square as possible, with its top-left at
/// (0, 0). Odd n adds one cell above the top-left corner; n < 4 is a line.
std::vector<Coord> flocking_target(int n);

/// Positions of on-map agents in id order.
std::vector<Coord> agent_positions(const EnvironmentState& state);

/// Recomputes cur_dis; score keeps the best improvement seen so far.
void flocking_update_score(EnvironmentState& state);

/// Bonus for an agent leaving at `round`: (max_round - round) / max_round.
double escape_bonus(int round, int max_round);

/// Credits every escaped agent not yet credited; done once all have escaped.
double transport_update(EnvironmentState& state);

/// Task text placed in the agent prompt.
std::string task_description(const EnvironmentState& state);

}  // namespace swarm
