#include <doctest.h>

#include <queue>
#include <set>

#include "swarm/generate.hpp"
#include "swarm/grid.hpp"
#include "world_builder.hpp"

using namespace swarm;
using namespace swarm::testing;

namespace {

int count_kind(const EnvironmentState& s, MeshKind kind) {
    int n = 0;
    for (const Mesh& m : s.meshes) n += m.kind == kind ? 1 : 0;
    return n;
}

bool ring_intact_except(const EnvironmentState& s, const std::set<Coord>& gap) {
    const Occupancy occ(s);
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            if (!(r == 0 || c == 0 || r == s.height - 1 || c == s.width - 1) || gap.count({r, c})) continue;
            const int idx = occ.at({r, c});
            if (idx < 0 || s.meshes[idx].kind != MeshKind::Wall) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("mass is the floor of the square root of the area") {
    CHECK(mass_of(Shape::unit()) == 1);
    CHECK(mass_of(Shape::filled(2, 2)) == 2);
    CHECK(mass_of(Shape::filled(3, 3)) == 3);
    CHECK(mass_of(Shape::filled(1, 3)) == 1);
    CHECK(mass_of(Shape::filled(5, 5)) == 5);
    CHECK(mass_of(Shape::filled(5, 7)) == 5);
    CHECK(mass_of(Shape::filled(6, 6)) == 6);
    CHECK(mass_of(Shape(2, 2, {1, 0, 1, 1})) == 1);
    CHECK_THROWS_AS(mass_of(Shape(1, 2, {0, 0})), InvalidShapeError);
    CHECK_THROWS_AS(mass_of(Shape()), InvalidShapeError);
    CHECK_THROWS_AS(Shape(2, 2, {1, 1, 1}), InvalidShapeError);
}

TEST_CASE("mesh cells follow the mask") {
    Mesh m;
    m.anchor = {3, 4};
    m.shape = Shape(2, 2, {1, 0, 0, 1});
    CHECK(m.cells() == std::vector<Coord>{{3, 4}, {4, 5}});
}

TEST_CASE("cell_at symbols and precedence") {
    auto s = empty_world(5, 5);
    add_wall(s, {0, 0});
    const int a = add_agent(s, {2, 2});
    add_object(s, MeshKind::Obstacle, {1, 1}, Shape::unit());
    CHECK(cell_at(s, {-1, 0}) == "*");
    CHECK(cell_at(s, {0, 5}) == "*");
    CHECK(cell_at(s, {4, 4}) == ".");
    CHECK(cell_at(s, {0, 0}) == "W");
    CHECK(cell_at(s, {1, 1}) == "B");
    CHECK(cell_at(s, {2, 2}) == std::to_string(a));

    s.agents[a].carrying = true;
    CHECK(cell_at(s, {2, 2}) == "$0");

    // Stacked claims resolve agent > prey > food/nest > obstacle > wall.
    add_object(s, MeshKind::Wall, {3, 3}, Shape::unit(), true);
    add_object(s, MeshKind::Obstacle, {3, 3}, Shape::unit());
    CHECK(cell_at(s, {3, 3}) == "B");
    add_object(s, MeshKind::Food, {3, 3}, Shape::unit(), true);
    CHECK(cell_at(s, {3, 3}) == "F");
    add_object(s, MeshKind::Prey, {3, 3}, Shape::unit());
    CHECK(cell_at(s, {3, 3}) == "P");
    add_agent(s, {3, 3});
    CHECK(cell_at(s, {3, 3}) == "1");
    CHECK_THROWS_AS(Occupancy{s}, ConsistencyError);
}

TEST_CASE("render_ascii layout") {
    auto s = empty_world(3, 3);
    CHECK(render_ascii(s) ==
          "     0   1   2\n"
          "  0  .   .   .\n"
          "  1  .   .   .\n"
          "  2  .   .   .\n");

    auto ring = empty_world(4, 12);
    add_wall_ring(ring);
    const auto grid = symbol_grid(ring);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 12; ++c) {
            const bool border = r == 0 || c == 0 || r == 3 || c == 11;
            CHECK(grid.cells[r][c] == (border ? "W" : "."));
        }
    }
    CHECK(render_ascii(ring).substr(0, 52) == "     0   1   2   3   4   5   6   7   8   9   10  11\n");
}

TEST_CASE("render and parse round-trip") {
    SymbolGrid g;
    g.origin = {-2, 9};
    g.cells = {{"*", "*", "10", "$11"}, {"W", "Y", "$100", "."}, {"P", "N", "F", "B"}};
    const std::string text = render_grid(g);
    CHECK(parse_grid(text) == g);

    for (TaskKind t : kAllTasks) {
        for (std::uint64_t seed : {0u, 1u, 2u}) {
            const auto s = generate_environment(t, seed, EnvConfig{});
            CHECK(parse_grid(render_ascii(s)) == symbol_grid(s));
        }
    }
    CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("     0   1\n  0  .\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("     0   2\n  0  .   .\n"), std::invalid_argument);
}

TEST_CASE("task names") {
    for (TaskKind t : kAllTasks) CHECK(parse_task(to_string(t)) == t);
    CHECK(parse_task("Transport") == TaskKind::Transport);
    CHECK(parse_task("sync") == TaskKind::Synchronization);
    CHECK_THROWS_AS(parse_task("chess"), ConfigError);
}

TEST_CASE("pursuit generation") {
    EnvConfig cfg;
    cfg.num_agents = 10;
    const auto s = generate_environment(TaskKind::Pursuit, 7, cfg);
    CHECK(s.agents.size() == 10);
    CHECK(count_kind(s, MeshKind::Prey) == 1);
    CHECK(ring_intact_except(s, {}));
    CHECK(s.round == 0);
    CHECK(s.score == 0.0);
    const Occupancy occ(s);  // throws on overlap
    for (const auto& a : s.agents) {
        const auto p = s.agent_position(a.id);
        REQUIRE(p);
        CHECK(s.inside(*p));
        CHECK(a.name == "Agent_" + std::to_string(a.id));
    }
}

TEST_CASE("generation is a pure function of its inputs") {
    EnvConfig cfg;
    cfg.num_agents = 10;
    for (TaskKind t : kAllTasks) {
        for (std::uint64_t seed : {0u, 7u, 12345u}) {
            const auto a = generate_environment(t, seed, cfg);
            const auto b = generate_environment(t, seed, cfg);
            CHECK(a == b);
            CHECK(render_ascii(a) == render_ascii(b));
        }
        CHECK(render_ascii(generate_environment(t, 1, cfg)) != render_ascii(generate_environment(t, 2, cfg)));
    }
}

TEST_CASE("transport layout: one gap blocked by a mass-5 obstacle") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto s = generate_environment(TaskKind::Transport, seed, EnvConfig{});
        REQUIRE(count_kind(s, MeshKind::Obstacle) == 1);
        const Mesh* obstacle = nullptr;
        for (const Mesh& m : s.meshes) {
            if (m.kind == MeshKind::Obstacle) obstacle = &m;
        }
        CHECK(mass_of(obstacle->shape) == 5);
        CHECK_FALSE(obstacle->is_static);
        std::set<Coord> gap;
        for (Coord c : obstacle->cells()) {
            if (c.row == 0 || c.col == 0 || c.row == s.height - 1 || c.col == s.width - 1) gap.insert(c);
        }
        CHECK(gap.size() == 5);  // one contiguous side of the block sits in the ring
        CHECK(ring_intact_except(s, gap));
        int border_walls = 0;
        for (const Mesh& m : s.meshes) border_walls += m.kind == MeshKind::Wall ? 1 : 0;
        CHECK(border_walls == 2 * s.height + 2 * s.width - 4 - 5);
    }
}

TEST_CASE("foraging layout keeps free space connected") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto s = generate_environment(TaskKind::Foraging, seed, EnvConfig{});
        CHECK(count_kind(s, MeshKind::Nest) == 1);
        CHECK(count_kind(s, MeshKind::Food) == 1);
        const Occupancy occ(s);
        std::vector<Coord> free;
        for (int r = 0; r < s.height; ++r) {
            for (int c = 0; c < s.width; ++c) {
                const int idx = occ.at({r, c});
                if (idx < 0 || s.meshes[idx].kind == MeshKind::Agent) free.push_back({r, c});
            }
        }
        std::set<Coord> seen{free.front()};
        std::queue<Coord> q;
        q.push(free.front());
        while (!q.empty()) {
            const Coord c = q.front();
            q.pop();
            for (Direction d : kDirections) {
                const Coord n = c + offset(d);
                const int idx = occ.at(n);
                const bool open = s.inside(n) && (idx < 0 || s.meshes[idx].kind == MeshKind::Agent);
                if (open && seen.insert(n).second) q.push(n);
            }
        }
        CHECK(seen.size() == free.size());
    }
}

TEST_CASE("synchronization lights and flocking bookkeeping") {
    const auto sync = generate_environment(TaskKind::Synchronization, 3, EnvConfig{});
    int lit = 0;
    for (const auto& a : sync.agents) lit += a.light ? 1 : 0;
    CHECK(lit > 0);
    CHECK(lit < static_cast<int>(sync.agents.size()));
    CHECK_FALSE(sync.task_state.sync_prev.has_value());

    const auto flock = generate_environment(TaskKind::Flocking, 3, EnvConfig{});
    CHECK(flock.task_state.flock_target.size() == flock.agents.size());
    CHECK(flock.task_state.init_dis > 0.0);
    CHECK(flock.task_state.cur_dis == flock.task_state.init_dis);
}

TEST_CASE("infeasible configurations are rejected") {
    EnvConfig crowded;
    crowded.height = 4;
    crowded.width = 4;
    crowded.num_agents = 4;  // four interior cells, plus the prey
    CHECK_THROWS_AS(generate_environment(TaskKind::Pursuit, 0, crowded), ConfigError);
    CHECK_NOTHROW(generate_environment(TaskKind::Synchronization, 0, crowded));

    EnvConfig small;
    small.height = 6;
    small.width = 6;
    small.num_agents = 2;
    CHECK_THROWS_AS(generate_environment(TaskKind::Transport, 0, small), ConfigError);

    EnvConfig even_view;
    even_view.view_size = 4;
    CHECK_THROWS_AS(generate_environment(TaskKind::Pursuit, 0, even_view), ConfigError);
    EnvConfig no_agents;
    no_agents.num_agents = 0;
    CHECK_THROWS_AS(no_agents.validate(), ConfigError);
}
