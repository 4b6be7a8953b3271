#include "swarm/generate.hpp"

#include <fmt/format.h>

#include <queue>
#include <set>

#include "swarm/tasks.hpp"

namespace swarm {

namespace {

constexpr int kLayoutAttempts = 200;

void add_wall(EnvironmentState& s, Coord c) {
    Mesh m;
    m.kind = MeshKind::Wall;
    m.anchor = c;
    m.is_static = true;
    s.add_mesh(m);
}

void add_ring(EnvironmentState& s, const std::set<Coord>& gap) {
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            const bool border = r == 0 || c == 0 || r == s.height - 1 || c == s.width - 1;
            if (border && !gap.count({r, c})) add_wall(s, {r, c});
        }
    }
}

std::vector<Coord> empty_cells(const EnvironmentState& s) {
    const Occupancy occ(s);
    std::vector<Coord> out;
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            if (occ.at({r, c}) < 0) out.push_back({r, c});
        }
    }
    return out;
}

bool block_fits(const Occupancy& occ, Coord anchor, int size) {
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            if (occ.at({anchor.row + r, anchor.col + c}) >= 0) return false;
        }
    }
    return true;
}

// Places a size x size block at a seeded position in the interior; false if none fits.
bool place_block(EnvironmentState& s, Rng& gen, MeshKind kind, int size) {
    const Occupancy occ(s);
    std::vector<Coord> anchors;
    for (int r = 1; r + size <= s.height - 1; ++r) {
        for (int c = 1; c + size <= s.width - 1; ++c) {
            if (block_fits(occ, {r, c}, size)) anchors.push_back({r, c});
        }
    }
    if (anchors.empty()) return false;
    Mesh m;
    m.kind = kind;
    m.anchor = anchors[gen.below(anchors.size())];
    m.shape = Shape::filled(size, size);
    m.is_static = true;
    s.add_mesh(m);
    return true;
}

// All empty cells form one 4-connected region that touches every nest and food block.
bool free_space_connected(const EnvironmentState& s) {
    const Occupancy occ(s);
    const auto cells = empty_cells(s);
    if (cells.empty()) return false;
    std::set<Coord> seen{cells.front()};
    std::queue<Coord> q;
    q.push(cells.front());
    while (!q.empty()) {
        const Coord c = q.front();
        q.pop();
        for (Direction d : kDirections) {
            const Coord n = c + offset(d);
            if (s.inside(n) && occ.at(n) < 0 && seen.insert(n).second) q.push(n);
        }
    }
    if (seen.size() != cells.size()) return false;
    for (const Mesh& m : s.meshes) {
        if (m.kind != MeshKind::Nest && m.kind != MeshKind::Food) continue;
        bool touches = false;
        for (Coord c : m.cells()) {
            for (Direction d : kDirections) touches = touches || seen.count(c + offset(d)) > 0;
        }
        if (!touches) return false;
    }
    return true;
}

void add_interior_walls(EnvironmentState& s, Rng& gen, int segments) {
    const int max_len = std::max(2, std::min(s.height, s.width) / 3);
    for (int k = 0; k < segments; ++k) {
        const bool horizontal = gen.chance(0.5);
        const int len = gen.between(2, max_len);
        const int rows = horizontal ? 1 : len;
        const int cols = horizontal ? len : 1;
        if (s.height - 2 - rows < 1 || s.width - 2 - cols < 1) continue;
        const Coord start{gen.between(2, s.height - 2 - rows), gen.between(2, s.width - 2 - cols)};
        const Occupancy occ(s);
        bool clear = true;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) clear = clear && occ.at({start.row + r, start.col + c}) < 0;
        }
        if (!clear) continue;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) add_wall(s, {start.row + r, start.col + c});
        }
    }
}

EnvironmentState base_state(TaskKind task, std::uint64_t seed, const EnvConfig& config) {
    EnvironmentState s;
    s.task = task;
    s.height = config.height;
    s.width = config.width;
    s.max_round = config.max_round;
    s.rng = Rng(mix_seed(seed, 0x72756e));
    s.task_state.respawn_candidates = config.respawn_candidates;
    return s;
}

void layout_transport(EnvironmentState& s, Rng& gen, const EnvConfig& config) {
    const int size = config.obstacle_size;
    if (size > s.height - 2 || size > s.width - 2) {
        throw ConfigError(fmt::format("obstacle side {} does not fit a {}x{} map", size, s.height, s.width));
    }
    const int side = static_cast<int>(gen.below(4));  // 0 top, 1 bottom, 2 left, 3 right
    const bool horizontal = side < 2;
    const int span = horizontal ? s.width : s.height;
    const int start = gen.between(1, span - 1 - size);
    Coord anchor;
    std::set<Coord> gap;
    for (int k = 0; k < size; ++k) {
        switch (side) {
            case 0: gap.insert({0, start + k}); break;
            case 1: gap.insert({s.height - 1, start + k}); break;
            case 2: gap.insert({start + k, 0}); break;
            default: gap.insert({start + k, s.width - 1}); break;
        }
    }
    switch (side) {
        case 0: anchor = {0, start}; break;
        case 1: anchor = {s.height - size, start}; break;
        case 2: anchor = {start, 0}; break;
        default: anchor = {start, s.width - size}; break;
    }
    add_ring(s, gap);
    Mesh obstacle;
    obstacle.kind = MeshKind::Obstacle;
    obstacle.anchor = anchor;
    obstacle.shape = Shape::filled(size, size);
    s.add_mesh(obstacle);
}

void layout_foraging(EnvironmentState& s, Rng& gen, const EnvConfig& config) {
    for (int attempt = 0; attempt < kLayoutAttempts; ++attempt) {
        EnvironmentState trial = s;
        add_ring(trial, {});
        add_interior_walls(trial, gen, config.interior_walls);
        if (!place_block(trial, gen, MeshKind::Nest, config.nest_size)) continue;
        if (!place_block(trial, gen, MeshKind::Food, config.food_size)) continue;
        if (!free_space_connected(trial)) continue;
        s = std::move(trial);
        return;
    }
    throw ConfigError("could not lay out a connected foraging map; enlarge the map or shrink the objects");
}

}  // namespace

EnvironmentState generate_environment(TaskKind task, std::uint64_t seed, const EnvConfig& config) {
    config.validate();
    EnvironmentState s = base_state(task, seed, config);
    Rng gen(mix_seed(seed, static_cast<std::uint64_t>(task) + 1));

    switch (task) {
        case TaskKind::Transport: layout_transport(s, gen, config); break;
        case TaskKind::Foraging: layout_foraging(s, gen, config); break;
        default: add_ring(s, {}); break;
    }

    const auto free = empty_cells(s);
    const std::size_t needed = config.num_agents + (task == TaskKind::Pursuit ? 1 : 0);
    if (free.size() < needed) {
        throw ConfigError(fmt::format("map has {} free cells but {} are needed", free.size(), needed));
    }
    const auto picks = gen.sample_indices(free.size(), needed);
    std::size_t next_pick = 0;
    if (task == TaskKind::Pursuit) {
        Mesh prey;
        prey.kind = MeshKind::Prey;
        prey.anchor = free[picks[next_pick++]];
        s.add_mesh(prey);
    }
    for (int id = 0; id < config.num_agents; ++id) {
        Mesh body;
        body.kind = MeshKind::Agent;
        body.anchor = free[picks[next_pick++]];
        body.agent = id;
        AgentState agent;
        agent.id = id;
        agent.name = fmt::format("Agent_{}", id);
        agent.mesh = s.add_mesh(body);
        if (task == TaskKind::Synchronization) agent.light = gen.chance(0.5);
        s.agents.push_back(agent);
    }

    if (task == TaskKind::Flocking) {
        s.task_state.flock_target = flocking_target(config.num_agents);
        s.task_state.init_dis = flocking_distance(agent_positions(s), s.task_state.flock_target);
        s.task_state.cur_dis = s.task_state.init_dis;
    }
    return s;
}

}  // namespace swarm
