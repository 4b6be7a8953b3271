#include "swarm/tasks.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <set>

#include "swarm/assignment.hpp"

namespace swarm {

namespace {

// Threat scaled by 10 so ties compare exactly.
int threat_tenths(const EnvironmentState& state, const Occupancy& occ, Coord c) {
    int total = 0;
    for (int r = c.row - 4; r < c.row + 4; ++r) {
        for (int col = c.col - 4; col < c.col + 4; ++col) {
            const int idx = occ.at({r, col});
            if (idx < 0) continue;
            const MeshKind k = state.meshes[idx].kind;
            if (k == MeshKind::Agent) total += 10;
            else if (k == MeshKind::Wall) total += 9;
        }
    }
    return total;
}

bool free_for_prey(const EnvironmentState& state, const Occupancy& occ, Coord c, int prey_index) {
    if (!state.inside(c)) return false;
    const int idx = occ.at(c);
    return idx < 0 || idx == prey_index;
}

int prey_index(const EnvironmentState& state) {
    for (std::size_t i = 0; i < state.meshes.size(); ++i) {
        if (state.meshes[i].kind == MeshKind::Prey) return static_cast<int>(i);
    }
    return -1;
}

bool is_kind(const EnvironmentState& state, const Occupancy& occ, Coord c, MeshKind kind) {
    const int idx = occ.at(c);
    return idx >= 0 && state.meshes[idx].kind == kind;
}

}  // namespace

double threat_heuristic(const EnvironmentState& state, Coord c) {
    return threat_tenths(state, Occupancy(state, false), c) / 10.0;
}

EnvironmentState pursuit_prey_step(const EnvironmentState& state, PreyStep* step) {
    EnvironmentState next = state;
    const int pi = prey_index(state);
    if (pi < 0) return next;
    const Occupancy occ(state, false);
    const Coord from = state.meshes[pi].anchor;

    std::optional<Coord> best;
    int best_threat = std::numeric_limits<int>::max();
    for (Direction d1 : kDirections) {
        const Coord mid = from + offset(d1);
        if (!free_for_prey(state, occ, mid, pi)) continue;
        for (Direction d2 : kDirections) {
            const Coord dst = mid + offset(d2);
            if (!free_for_prey(state, occ, dst, pi)) continue;
            const int h = threat_tenths(state, occ, dst);
            if (h < best_threat || (h == best_threat && dst < *best)) {
                best_threat = h;
                best = dst;
            }
        }
    }
    if (best) next.meshes[pi].anchor = *best;
    if (step != nullptr) *step = PreyStep{from, best.value_or(from), best.has_value() && *best != from};
    return next;
}

bool prey_captured(const EnvironmentState& state) {
    const Mesh* prey = state.prey();
    if (prey == nullptr) return false;
    const Occupancy occ(state, false);
    for (Direction d : kDirections) {
        const Coord c = prey->anchor + offset(d);
        if (!state.inside(c)) return false;
        if (!is_kind(state, occ, c, MeshKind::Agent) && !is_kind(state, occ, c, MeshKind::Wall)) {
            return false;
        }
    }
    return true;
}

EnvironmentState pursuit_check_and_respawn(const EnvironmentState& state, CaptureOutcome* outcome) {
    CaptureOutcome local;
    CaptureOutcome& out = outcome != nullptr ? *outcome : local;
    out = CaptureOutcome{};
    EnvironmentState next = state;
    if (!prey_captured(state)) return next;

    out.scored = true;
    next.score += 1.0;
    const int pi = prey_index(next);
    Mesh prey = next.meshes[pi];
    next.meshes.erase(next.meshes.begin() + pi);

    const Occupancy occ(next, false);
    std::vector<Coord> empty;
    for (int r = 0; r < next.height; ++r) {
        for (int c = 0; c < next.width; ++c) {
            if (occ.at({r, c}) < 0) empty.push_back({r, c});
        }
    }
    if (empty.empty()) {
        next.done = true;
        return next;
    }
    const auto count = std::min<std::size_t>(empty.size(),
                                             static_cast<std::size_t>(next.task_state.respawn_candidates));
    for (std::size_t i : next.rng.sample_indices(empty.size(), count)) out.candidates.push_back(empty[i]);

    Coord best = out.candidates.front();
    int best_threat = threat_tenths(next, occ, best);
    for (Coord c : out.candidates) {
        const int h = threat_tenths(next, occ, c);
        if (h < best_threat || (h == best_threat && c < best)) {
            best_threat = h;
            best = c;
        }
    }
    out.respawn = best;
    prey.anchor = best;
    next.meshes.insert(next.meshes.begin() + pi, prey);
    return next;
}

bool sync_update(const std::vector<bool>& lights, TaskState& task_state) {
    if (lights.empty()) return false;
    const bool first = lights.front();
    if (!std::all_of(lights.begin(), lights.end(), [&](bool l) { return l == first; })) return false;
    if (task_state.sync_prev && *task_state.sync_prev == first) return false;
    task_state.sync_prev = first;
    return true;
}

ForagingOutcome foraging_update(EnvironmentState& state) {
    ForagingOutcome out;
    const Occupancy occ(state, false);
    auto next_to = [&](Coord p, MeshKind kind) {
        return std::any_of(kDirections.begin(), kDirections.end(),
                           [&](Direction d) { return is_kind(state, occ, p + offset(d), kind); });
    };
    for (AgentState& a : state.agents) {
        const auto pos = state.agent_position(a.id);
        if (!pos) continue;
        if (a.carrying) {
            if (next_to(*pos, MeshKind::Nest)) {
                a.carrying = false;
                ++out.delivered;
                state.score += 1.0;
            }
        } else if (next_to(*pos, MeshKind::Food)) {
            a.carrying = true;
            ++out.picked_up;
        }
    }
    return out;
}

double flocking_distance(const std::vector<Coord>& src, const std::vector<Coord>& tgt) {
    if (src.size() != tgt.size()) {
        throw InvalidInputError(fmt::format("flocking_distance: {} agents but {} target cells",
                                            src.size(), tgt.size()));
    }
    const std::size_t n = src.size();
    if (n == 0) return 0.0;

    std::set<Coord> shifts;
    for (Coord s : src) {
        for (Coord t : tgt) shifts.insert(s - t);
    }
    // Costs are kept doubled so the half weights stay integral.
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(n));
    for (Coord shift : shifts) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const Coord d = src[i] - tgt[j];
                cost[i][j] = std::abs(d.row - shift.row) + std::abs(d.col - shift.col);
            }
        }
        best = std::min(best, min_cost_assignment(cost));
    }
    return static_cast<double>(best) / 2.0;
}

std::vector<Coord> flocking_target(int n) {
    std::vector<Coord> cells;
    if (n <= 0) return cells;
    if (n < 4) {
        for (int j = 0; j < n; ++j) cells.push_back({0, j});
        return cells;
    }
    const int ring = n - n % 2;
    const int sides = (ring + 4) / 2;  // rows + cols of the rectangle
    const int rows = sides / 2;
    const int cols = sides - rows;
    if (n % 2 == 1) cells.push_back({-1, 0});
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (r == 0 || r == rows - 1 || c == 0 || c == cols - 1) cells.push_back({r, c});
        }
    }
    return cells;
}

std::vector<Coord> agent_positions(const EnvironmentState& state) {
    std::vector<Coord> out;
    for (const AgentState& a : state.agents) {
        if (auto p = state.agent_position(a.id)) out.push_back(*p);
    }
    return out;
}

void flocking_update_score(EnvironmentState& state) {
    TaskState& ts = state.task_state;
    ts.cur_dis = flocking_distance(agent_positions(state), ts.flock_target);
    state.score = std::max(state.score, ts.init_dis - ts.cur_dis);
    if (ts.cur_dis == 0.0) state.done = true;
}

double escape_bonus(int round, int max_round) {
    return static_cast<double>(max_round - round) / static_cast<double>(max_round);
}

double transport_update(EnvironmentState& state) {
    TaskState& ts = state.task_state;
    double delta = 0.0;
    for (const AgentState& a : state.agents) {
        if (!a.escaped_round) continue;
        if (std::find(ts.escaped.begin(), ts.escaped.end(), a.id) != ts.escaped.end()) continue;
        ts.escaped.push_back(a.id);
        delta += escape_bonus(*a.escaped_round, state.max_round);
    }
    state.score += delta;
    if (!state.agents.empty() && ts.escaped.size() == state.agents.size()) state.done = true;
    return delta;
}

namespace {

std::string shape_art(const std::vector<Coord>& cells) {
    if (cells.empty()) return "";
    int r0 = cells.front().row, r1 = r0, c0 = cells.front().col, c1 = c0;
    for (Coord c : cells) {
        r0 = std::min(r0, c.row);
        r1 = std::max(r1, c.row);
        c0 = std::min(c0, c.col);
        c1 = std::max(c1, c.col);
    }
    const std::set<Coord> filled(cells.begin(), cells.end());
    std::string out;
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            out += filled.count({r, c}) ? '#' : '.';
            if (c < c1) out += ' ';
        }
        if (r < r1) out += '\n';
    }
    return out;
}

}  // namespace

std::string task_description(const EnvironmentState& state) {
    switch (state.task) {
        case TaskKind::Pursuit:
            return "The map contains a prey (denoted as P) that moves up to two cells per round and "
                   "keeps away from agents and walls. The goal is to trap the prey so that each of "
                   "its four neighbouring cells (up, down, left, right) holds an agent or a wall. "
                   "Every capture scores one point, after which the prey reappears elsewhere.";
        case TaskKind::Synchronization:
            return "Every agent carries a light that is either ON or OFF. An agent whose light is ON "
                   "is shown as '$' followed by its id. You have an extra action SWITCH that toggles "
                   "your own light; you do not move in a round where you SWITCH. A point is scored "
                   "whenever all lights become equal and this shared state differs from the last "
                   "shared state that scored, so the group must agree and then flip together.";
        case TaskKind::Foraging:
            return "The map contains a nest (denoted as N) and a food source (denoted as F). Move next "
                   "to F to pick up food; an agent carrying food is shown as '$' followed by its id. "
                   "Bring the food next to N to deliver it for one point. The food source never runs "
                   "out, so keep making trips.";
        case TaskKind::Flocking:
            return "The goal is for all agents to arrange themselves into the shape below ('#' marks "
                   "a cell that should hold an agent). Only the shape matters, not where on the map "
                   "it is formed. The score grows as the formation gets closer to the shape.\n" +
                   shape_art(state.task_state.flock_target);
        case TaskKind::Transport:
            return "The boundary of the map is surrounded by walls (denoted as W), with a gap leading "
                   "to the outside of the map (denoted as '*'). The gap is blocked by an obstacle "
                   "(denoted as B).\nThe goal is to first locate the obstacle (B), then have five "
                   "robots simultaneously push it through the exit, and finally escape to the "
                   "outside of the map (denoted as '*').";
    }
    return "";
}

}  // namespace swarm
