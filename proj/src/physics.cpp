#include "swarm/physics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "maxflow.hpp"

namespace swarm {

namespace {

bool is_immovable(const Mesh& m) { return m.is_static || m.kind == MeshKind::Prey; }

std::map<Coord, int> cell_owners(const EnvironmentState& state) {
    std::map<Coord, int> owners;
    for (std::size_t i = 0; i < state.meshes.size(); ++i) {
        for (Coord c : state.meshes[i].cells()) owners.emplace(c, static_cast<int>(i));
    }
    return owners;
}

ContactGraph build_one(const EnvironmentState& state, const std::map<Coord, int>& owners,
                       Direction dir, const std::vector<int>& pushers) {
    ContactGraph g;
    g.direction = dir;
    std::map<int, int> node_of;  // mesh index -> node index
    std::set<std::pair<int, int>> edges;
    std::queue<int> frontier;
    std::set<int> pushing(pushers.begin(), pushers.end());

    auto visit = [&](int mesh_index) {
        auto [it, inserted] = node_of.emplace(mesh_index, static_cast<int>(g.nodes.size()));
        if (inserted) {
            const Mesh& m = state.meshes[mesh_index];
            ContactNode n;
            n.mesh = m.id;
            n.body = m.body;
            n.area = m.shape.area();
            n.is_static = is_immovable(m);
            n.force = pushing.count(mesh_index) ? kAgentForce : 0;
            g.nodes.push_back(n);
            if (n.is_static) g.blocked = true;
            else frontier.push(mesh_index);
        }
        return it->second;
    };

    for (int p : pushers) visit(p);
    while (!frontier.empty()) {
        const int mi = frontier.front();
        frontier.pop();
        const Mesh& m = state.meshes[mi];
        const int v = node_of.at(mi);
        for (Coord c : m.cells()) {
            auto ahead = owners.find(c + offset(dir));
            if (ahead != owners.end() && ahead->second != mi) {
                edges.emplace(v, visit(ahead->second));
            }
            for (Direction nd : kDirections) {
                auto nb = owners.find(c + offset(nd));
                if (nb == owners.end() || nb->second == mi) continue;
                if (state.meshes[nb->second].body != m.body) continue;
                const int u = visit(nb->second);
                edges.emplace(v, u);
                edges.emplace(u, v);
            }
        }
    }
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

}  // namespace

DirectionalGraphs build_contact_graph(const EnvironmentState& state,
                                      const std::vector<PushIntent>& intents) {
    const auto owners = cell_owners(state);
    std::array<std::vector<std::pair<int, int>>, 4> pushers;  // (agent id, mesh index)
    for (const PushIntent& in : intents) {
        if (in.agent < 0 || in.agent >= static_cast<int>(state.agents.size())) continue;
        const AgentState& a = state.agents[in.agent];
        if (!a.on_map()) continue;
        for (std::size_t i = 0; i < state.meshes.size(); ++i) {
            if (state.meshes[i].id == a.mesh) {
                pushers[index_of(in.direction)].emplace_back(in.agent, static_cast<int>(i));
            }
        }
    }
    DirectionalGraphs out;
    for (Direction d : kDirections) {
        auto& list = pushers[index_of(d)];
        std::sort(list.begin(), list.end());
        std::vector<int> meshes;
        for (auto [agent, mi] : list) meshes.push_back(mi);
        out[index_of(d)] = build_one(state, owners, d, meshes);
    }
    return out;
}

CondensedDag condense_scc(const ContactGraph& graph) {
    const int n = static_cast<int>(graph.nodes.size());
    std::vector<std::vector<int>> adj(n);
    for (auto [v, u] : graph.edges) adj[v].push_back(u);

    // Tarjan; components come out sinks first.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<bool> on_stack(n, false);
    int counter = 0, comps = 0;
    std::function<void(int)> strongconnect = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (int u : adj[v]) {
            if (index[u] < 0) {
                strongconnect(u);
                low[v] = std::min(low[v], low[u]);
            } else if (on_stack[u]) {
                low[v] = std::min(low[v], index[u]);
            }
        }
        if (low[v] == index[v]) {
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = comps;
            } while (w != v);
            ++comps;
        }
    };
    for (int v = 0; v < n; ++v) {
        if (index[v] < 0) strongconnect(v);
    }

    CondensedDag dag;
    dag.direction = graph.direction;
    dag.nodes.resize(comps);
    std::vector<std::map<int, int>> body_area(comps);
    for (int v = 0; v < n; ++v) {
        const int c = comps - 1 - comp[v];
        const ContactNode& cn = graph.nodes[v];
        DagNode& node = dag.nodes[c];
        node.meshes.push_back(cn.mesh);
        node.is_static = node.is_static || cn.is_static;
        node.force += cn.force;
        body_area[c][cn.body] += cn.area;
    }
    for (int c = 0; c < comps; ++c) {
        std::sort(dag.nodes[c].meshes.begin(), dag.nodes[c].meshes.end());
        for (auto [body, area] : body_area[c]) dag.nodes[c].mass += mass_of(Shape::filled(1, area));
    }
    std::set<std::pair<int, int>> edges;
    for (auto [v, u] : graph.edges) {
        const int a = comps - 1 - comp[v];
        const int b = comps - 1 - comp[u];
        if (a != b) edges.emplace(a, b);
    }
    dag.edges.assign(edges.begin(), edges.end());
    return dag;
}

namespace {

/// Max-flow feasibility of a moving set. Included nodes carry their internal
/// force as supply; `demand` nodes must absorb their mass. Returns the flow
/// network so callers can read per-edge transmission.
struct FlowCheck {
    detail::MaxFlow net;
    std::vector<int> edge_handle;  // per dag edge, -1 when not in the network
    bool saturated = false;
};

FlowCheck run_flow(const CondensedDag& dag, const std::vector<int>& nodes,
                   const std::vector<signed char>& state) {
    // state: 1 = moving (supply + demand), 2 = relay (supply only), 0 = excluded
    const int n = static_cast<int>(dag.nodes.size());
    const int source = n;
    const int sink = n + 1;
    FlowCheck fc{detail::MaxFlow(n + 2), std::vector<int>(dag.edges.size(), -1), false};
    std::int64_t demand = 0;
    for (int v : nodes) {
        if (state[v] == 0) continue;
        const DagNode& node = dag.nodes[v];
        if (node.force > 0) fc.net.add_edge(source, v, node.force);
        if (state[v] == 1) {
            fc.net.add_edge(v, sink, node.mass);
            demand += node.mass;
        }
    }
    for (std::size_t e = 0; e < dag.edges.size(); ++e) {
        auto [v, u] = dag.edges[e];
        if (state[v] != 0 && state[u] != 0) {
            fc.edge_handle[e] = fc.net.add_edge(v, u, detail::MaxFlow::kInfinite);
        }
    }
    fc.saturated = fc.net.solve(source, sink) == demand;
    return fc;
}

class BranchAndBound {
public:
    BranchAndBound(const CondensedDag& dag, std::vector<int> nodes)
        : dag_(dag), nodes_(std::move(nodes)), state_(dag.nodes.size(), 0),
          children_(dag.nodes.size()) {
        for (auto [v, u] : dag.edges) children_[v].push_back(u);
        std::sort(nodes_.begin(), nodes_.end());
        for (int v : nodes_) state_[v] = dag.nodes[v].is_static ? 0 : 2;
        undecided_ = static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(),
                                                    [&](int v) { return state_[v] == 2; }));
    }

    std::vector<int> solve() {
        branch(static_cast<int>(nodes_.size()) - 1);
        return best_;
    }

private:
    void branch(int pos) {
        if (ones_ + undecided_ <= best_count_) return;
        if (pos < 0) {
            best_count_ = ones_;
            best_.clear();
            for (int v : nodes_) {
                if (state_[v] == 1) best_.push_back(v);
            }
            return;
        }
        const int v = nodes_[pos];
        if (dag_.nodes[v].is_static) {
            branch(pos - 1);
            return;
        }
        --undecided_;
        const bool children_move = std::all_of(children_[v].begin(), children_[v].end(),
                                               [&](int u) { return state_[u] == 1; });
        if (children_move) {
            state_[v] = 1;
            ++ones_;
            if (run_flow(dag_, nodes_, state_).saturated) branch(pos - 1);
            --ones_;
        }
        state_[v] = 0;
        if (ones_ == 0 || run_flow(dag_, nodes_, state_).saturated) branch(pos - 1);
        state_[v] = 2;
        ++undecided_;
    }

    const CondensedDag& dag_;
    std::vector<int> nodes_;
    std::vector<signed char> state_;
    std::vector<std::vector<int>> children_;
    std::vector<int> best_;
    int best_count_ = -1;
    int ones_ = 0;
    int undecided_ = 0;
};

std::vector<std::vector<int>> weak_components(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (auto [v, u] : edges) parent[find(v)] = find(u);
    std::map<int, std::vector<int>> groups;
    for (int v = 0; v < n; ++v) groups[find(v)].push_back(v);
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

MovementSolution resolve_movement(const CondensedDag& dag) {
    const int n = static_cast<int>(dag.nodes.size());
    MovementSolution sol;
    sol.moved.assign(n, false);
    sol.net_force.assign(n, 0);
    sol.transmitted.assign(dag.edges.size(), 0);

    std::vector<int> all_nodes(n);
    std::iota(all_nodes.begin(), all_nodes.end(), 0);
    for (const auto& comp : weak_components(n, dag.edges)) {
        for (int v : BranchAndBound(dag, comp).solve()) sol.moved[v] = true;
    }

    std::vector<signed char> state(n, 0);
    for (int v = 0; v < n; ++v) state[v] = sol.moved[v] ? 1 : 0;
    FlowCheck fc = run_flow(dag, all_nodes, state);
    for (int v = 0; v < n; ++v) sol.net_force[v] = dag.nodes[v].force;
    for (std::size_t e = 0; e < dag.edges.size(); ++e) {
        if (fc.edge_handle[e] < 0) continue;
        sol.transmitted[e] = fc.net.flow_on(fc.edge_handle[e]);
        sol.net_force[dag.edges[e].second] += sol.transmitted[e];
    }
    return sol;
}

bool satisfies_constraints(const CondensedDag& dag, const MovementSolution& sol) {
    const std::size_t n = dag.nodes.size();
    if (sol.moved.size() != n || sol.net_force.size() != n ||
        sol.transmitted.size() != dag.edges.size()) {
        return false;
    }
    std::vector<std::int64_t> inflow(n, 0), outflow(n, 0);
    for (std::size_t e = 0; e < dag.edges.size(); ++e) {
        auto [v, u] = dag.edges[e];
        const std::int64_t t = sol.transmitted[e];
        if (t < 0) return false;
        if (t > 0 && !(sol.moved[v] && sol.moved[u])) return false;
        if (sol.moved[v] && !sol.moved[u]) return false;  // cannot move into a standing node
        inflow[u] += t;
        outflow[v] += t;
    }
    for (std::size_t v = 0; v < n; ++v) {
        const DagNode& node = dag.nodes[v];
        if (sol.net_force[v] != node.force + inflow[v]) return false;
        if (!sol.moved[v]) continue;
        if (node.is_static) return false;
        if (sol.net_force[v] < node.mass) return false;
        if (outflow[v] > sol.net_force[v] - node.mass) return false;
    }
    return true;
}

EnvironmentState apply_movement(const EnvironmentState& state,
                                const std::array<CondensedDag, 4>& dags,
                                const std::array<MovementSolution, 4>& solutions,
                                MovementReport* report) {
    MovementReport local;
    MovementReport& rep = report != nullptr ? *report : local;
    rep = MovementReport{};
    rep.cancelled_components.assign(4, 0);

    std::map<int, Direction> kept;  // mesh id -> direction
    std::set<Coord> claimed;        // post-move cells of kept movers
    std::map<int, const Mesh*> by_id;
    for (const Mesh& m : state.meshes) by_id[m.id] = &m;

    for (Direction d : kDirections) {
        const CondensedDag& dag = dags[index_of(d)];
        const MovementSolution& sol = solutions[index_of(d)];
        for (const auto& comp : weak_components(static_cast<int>(dag.nodes.size()), dag.edges)) {
            std::vector<int> meshes;
            for (int v : comp) {
                if (sol.moved.at(v)) meshes.insert(meshes.end(), dag.nodes[v].meshes.begin(),
                                                   dag.nodes[v].meshes.end());
            }
            if (meshes.empty()) continue;
            std::vector<Coord> cells;
            bool conflict = false;
            for (int id : meshes) {
                if (kept.count(id)) conflict = true;
                for (Coord c : by_id.at(id)->cells()) {
                    cells.push_back(c + offset(d));
                    if (claimed.count(cells.back())) conflict = true;
                }
            }
            if (conflict) {
                ++rep.cancelled_components[index_of(d)];
                continue;
            }
            for (int id : meshes) kept.emplace(id, d);
            claimed.insert(cells.begin(), cells.end());
        }
    }

    EnvironmentState next = state;
    std::vector<Mesh> meshes;
    meshes.reserve(next.meshes.size());
    for (Mesh m : next.meshes) {
        auto it = kept.find(m.id);
        if (it != kept.end()) {
            m.anchor = m.anchor + offset(it->second);
            rep.moved.emplace_back(m.id, it->second);
            const auto cells = m.cells();
            const bool gone = std::none_of(cells.begin(), cells.end(),
                                           [&](Coord c) { return next.inside(c); });
            if (gone) {
                rep.removed_meshes.push_back(m.id);
                if (m.agent >= 0) {
                    AgentState& a = next.agents.at(m.agent);
                    a.mesh = -1;
                    a.escaped_round = state.round;
                    rep.escaped_agents.push_back(m.agent);
                }
                continue;
            }
        }
        meshes.push_back(std::move(m));
    }
    next.meshes = std::move(meshes);
    std::sort(rep.escaped_agents.begin(), rep.escaped_agents.end());

    std::set<Coord> seen;
    for (const Mesh& m : next.meshes) {
        for (Coord c : m.cells()) {
            if (!seen.insert(c).second) {
                throw ConsistencyError(
                    fmt::format("mesh {} overlaps another mesh at ({},{}) after commit", m.id, c.row, c.col));
            }
        }
    }
    return next;
}

EnvironmentState step_physics(const EnvironmentState& state, const std::vector<PushIntent>& intents,
                              MovementReport* report) {
    const auto graphs = build_contact_graph(state, intents);
    std::array<CondensedDag, 4> dags;
    std::array<MovementSolution, 4> solutions;
    for (Direction d : kDirections) {
        dags[index_of(d)] = condense_scc(graphs[index_of(d)]);
        solutions[index_of(d)] = resolve_movement(dags[index_of(d)]);
    }
    return apply_movement(state, dags, solutions, report);
}

}  // namespace swarm
