#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "swarm/grid.hpp"

namespace swarm {

inline constexpr int kAgentForce = 2;
inline constexpr int kAgentMass = 1;

struct PushIntent {
    int agent = 0;
    Direction direction = Direction::Up;
};

struct ContactNode {
    int mesh = 0;  // mesh id
    int body = 0;
    int area = 0;
    bool is_static = false;
    int force = 0;  // propulsion this mesh contributes along the graph's direction
};

/// Meshes reachable from the pushing agents of one direction. An edge (v, u)
/// means v would push u; meshes of the same rigid body are linked both ways.
struct ContactGraph {
    Direction direction = Direction::Up;
    std::vector<ContactNode> nodes;
    std::vector<std::pair<int, int>> edges;  // indices into nodes
    bool blocked = false;                    // some chain ends at a static mesh
};

using DirectionalGraphs = std::array<ContactGraph, 4>;

/// Static meshes and the prey are nodes but are never expanded.
DirectionalGraphs build_contact_graph(const EnvironmentState& state,
                                      const std::vector<PushIntent>& intents);

struct DagNode {
    std::vector<int> meshes;  // sorted mesh ids
    int mass = 0;             // sum over member bodies of floor(sqrt(body area))
    bool is_static = false;
    int force = 0;            // internal propulsion
};

/// Nodes are numbered in topological order: every edge goes from a lower to a
/// higher index.
struct CondensedDag {
    Direction direction = Direction::Up;
    std::vector<DagNode> nodes;
    std::vector<std::pair<int, int>> edges;
};

CondensedDag condense_scc(const ContactGraph& graph);

struct MovementSolution {
    std::vector<bool> moved;
    std::vector<std::int64_t> net_force;    // internal force plus inflow
    std::vector<std::int64_t> transmitted;  // per dag edge
};

/// Largest set of moving nodes. Feasible sets are closed under union, so the
/// optimum is unique.
MovementSolution resolve_movement(const CondensedDag& dag);

/// Checks every solution invariant; used by tests and debug assertions.
bool satisfies_constraints(const CondensedDag& dag, const MovementSolution& solution);

struct MovementReport {
    std::vector<std::pair<int, Direction>> moved;  // mesh id and direction
    std::vector<int> removed_meshes;
    std::vector<int> escaped_agents;  // ascending id
    std::vector<int> cancelled_components;  // per direction count, for diagnostics
};

/// Translates moved meshes, drops meshes that ended fully off-map and marks
/// their agents escaped at the current round. Lower-priority components
/// (priority Up, Down, Left, Right) are cancelled when they share a mesh with
/// or would overlap a kept higher-priority mover. Throws ConsistencyError if
/// the committed world still has overlapping meshes.
EnvironmentState apply_movement(const EnvironmentState& state,
                                const std::array<CondensedDag, 4>& dags,
                                const std::array<MovementSolution, 4>& solutions,
                                MovementReport* report = nullptr);

/// build_contact_graph, condense_scc, resolve_movement and apply_movement in one call.
EnvironmentState step_physics(const EnvironmentState& state, const std::vector<PushIntent>& intents,
                              MovementReport* report = nullptr);

}  // namespace swarm
