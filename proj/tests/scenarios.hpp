#pragma once

// Small hand-built pushing scenarios shared by the physics tests and the
// acceptance run.

#include <string>
#include <vector>

#include "swarm/physics.hpp"
#include "world_builder.hpp"

namespace swarm::testing {

struct PushScenario {
    std::string name;
    EnvironmentState state;
    std::vector<PushIntent> intents;
    Direction direction = Direction::Right;
    bool expect_moves = false;
    std::vector<int> agent_meshes;
    std::vector<int> block_meshes;
    int expected_block_mass = 0;
    int expected_system_mass = 0;
    int expected_force = 0;
};

struct ScenarioCheck {
    bool moved = false;           // every mesh in the system advanced one cell
    bool stayed = false;          // no mesh changed position
    int block_mass = 0;           // mass of the node holding the block
    int system_mass = 0;          // total mass of the graph's movable nodes
    int applied_force = 0;        // total propulsion in the graph
};

/// One agent pushes a single unit mesh to the right.
inline PushScenario scenario_single_mesh() {
    PushScenario s{"agent + unit mesh", empty_world(6, 8)};
    const int a = add_agent(s.state, {2, 2});
    s.agent_meshes = {s.state.agents[a].mesh};
    s.block_meshes = {add_object(s.state, MeshKind::Obstacle, {2, 3}, Shape::unit())};
    s.intents = {{a, Direction::Right}};
    s.expect_moves = true;
    s.expected_block_mass = 1;
    s.expected_system_mass = 2;
    s.expected_force = 2;
    return s;
}

/// One agent pushes a 2x2 block made of four bonded unit meshes.
inline PushScenario scenario_heavy_block(bool bonded_units = true) {
    PushScenario s{"agent + 2x2 block", empty_world(6, 8)};
    const int a = add_agent(s.state, {2, 2});
    s.agent_meshes = {s.state.agents[a].mesh};
    if (bonded_units) {
        const int body = add_bonded_block(s.state, {2, 3}, 2);
        for (const Mesh& m : s.state.meshes) {
            if (m.body == body) s.block_meshes.push_back(m.id);
        }
    } else {
        s.block_meshes = {add_object(s.state, MeshKind::Obstacle, {2, 3}, Shape::filled(2, 2))};
    }
    s.intents = {{a, Direction::Right}};
    s.expect_moves = false;
    s.expected_block_mass = 2;
    s.expected_system_mass = 3;
    s.expected_force = 2;
    return s;
}

/// Two agents side by side push the same 2x2 block.
inline PushScenario scenario_cooperative(bool bonded_units = true) {
    PushScenario s = scenario_heavy_block(bonded_units);
    s.name = "two agents + 2x2 block";
    const int b = add_agent(s.state, {3, 2});
    s.agent_meshes.push_back(s.state.agents[b].mesh);
    s.intents.push_back({b, Direction::Right});
    s.expect_moves = true;
    s.expected_system_mass = 4;
    s.expected_force = 4;
    return s;
}

inline ScenarioCheck run_scenario(const PushScenario& sc) {
    ScenarioCheck out;
    const auto graphs = build_contact_graph(sc.state, sc.intents);
    const CondensedDag dag = condense_scc(graphs[index_of(sc.direction)]);
    for (const DagNode& node : dag.nodes) {
        if (node.is_static) continue;
        out.system_mass += node.mass;
        out.applied_force += node.force;
        for (int id : node.meshes) {
            if (id == sc.block_meshes.front()) out.block_mass = node.mass;
        }
    }
    const EnvironmentState next = step_physics(sc.state, sc.intents);
    std::vector<int> system = sc.agent_meshes;
    system.insert(system.end(), sc.block_meshes.begin(), sc.block_meshes.end());
    out.moved = true;
    for (int id : system) {
        out.moved = out.moved && anchor_of(next, id) == anchor_of(sc.state, id) + offset(sc.direction);
    }
    out.stayed = true;
    for (const Mesh& m : sc.state.meshes) out.stayed = out.stayed && anchor_of(next, m.id) == m.anchor;
    return out;
}

inline bool scenario_passes(const PushScenario& sc, const ScenarioCheck& r) {
    const bool outcome = sc.expect_moves ? r.moved : r.stayed;
    return outcome && r.block_mass == sc.expected_block_mass && r.system_mass == sc.expected_system_mass &&
           r.applied_force == sc.expected_force;
}

}  // namespace swarm::testing
