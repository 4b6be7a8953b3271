// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>

#include "golden_example.hpp"
#include "mock_llm.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"
#include "swarm/episode.hpp"
#include "swarm/metrics.hpp"
#include "swarm/runlog.hpp"
#include "swarm/tasks.hpp"
#include "temp_dir.hpp"

using namespace swarm;
using namespace swarm::testing;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (cond) return;
        if (ok) detail = what;
        ok = false;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1. Pushing scenarios with their mass bookkeeping.
Outcome physics_scenarios() {
    Outcome out;
    const auto t0 = Clock::now();
    for (bool bonded : {true, false}) {
        for (const auto& sc : {scenario_single_mesh(), scenario_heavy_block(bonded), scenario_cooperative(bonded)}) {
            const auto r = run_scenario(sc);
            out.require(scenario_passes(sc, r),
                        fmt::format("{}: moved={} stayed={} block mass={} system mass={} force={}", sc.name,
                                    r.moved, r.stayed, r.block_mass, r.system_mass, r.applied_force));
        }
    }
    // Agents weigh 1 in every scenario.
    const auto sc = scenario_single_mesh();
    const auto dag = condense_scc(build_contact_graph(sc.state, sc.intents)[index_of(Direction::Right)]);
    for (const auto& n : dag.nodes) {
        if (n.meshes.front() == sc.agent_meshes.front()) out.require(n.mass == 1, "agent mass is not 1");
    }
    out.require(seconds_since(t0) < 1.0, "slower than 1 s");
    if (out.ok) out.detail = "moves / stops / moves; masses 1 and 2, system masses 2, 3, 4";
    return out;
}

// 2. Movement solver against exhaustive enumeration.
Outcome solver_oracle() {
    Outcome out;
    const auto t0 = Clock::now();
    Rng rng(2024);
    int agree = 0;
    for (int i = 0; i < 500; ++i) {
        const auto dag = random_dag(rng, 1 + static_cast<int>(rng.below(12)));
        const auto sol = resolve_movement(dag);
        const int moved = static_cast<int>(std::count(sol.moved.begin(), sol.moved.end(), true));
        if (moved == oracle_max_moved(dag) && satisfies_constraints(dag, sol)) ++agree;
    }
    out.require(agree == 500, fmt::format("{}/500 agree", agree));
    out.require(seconds_since(t0) < 30.0, "slower than 30 s");
    if (out.ok) out.detail = "500/500 agree";
    return out;
}

// 3. Flocking distance against brute force.
Outcome flocking_oracle() {
    Outcome out;
    const auto t0 = Clock::now();
    Rng rng(77);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const int n = 1 + static_cast<int>(rng.below(6));
        std::vector<Coord> a, b;
        for (int j = 0; j < n; ++j) {
            a.push_back({rng.between(0, 11), rng.between(0, 11)});
            b.push_back({rng.between(0, 5), rng.between(0, 5)});
        }
        worst = std::max(worst, std::abs(flocking_distance(a, b) - oracle_flocking_distance(a, b)));
    }
    out.require(worst <= 1e-9, fmt::format("max error {}", worst));
    out.require(seconds_since(t0) < 30.0, "slower than 30 s");
    if (out.ok) out.detail = fmt::format("max error {}", worst);
    return out;
}

double window_threat(const EnvironmentState& s, Coord c) {
    double h = 0.0;
    for (const Mesh& m : s.meshes) {
        for (Coord p : m.cells()) {
            const bool in = s.inside(p) && p.row >= c.row - 4 && p.row < c.row + 4 && p.col >= c.col - 4 &&
                            p.col < c.col + 4;
            if (!in) continue;
            if (m.kind == MeshKind::Agent) h += 1.0;
            if (m.kind == MeshKind::Wall) h += 0.9;
        }
    }
    return h;
}

// 4. Task scoring rules.
Outcome scoring_suites() {
    Outcome out;

    // Pursuit capture and respawn.
    auto s = empty_world(10, 10);
    add_wall_ring(s);
    add_object(s, MeshKind::Prey, {4, 4}, Shape::unit());
    for (Coord c : {Coord{3, 4}, Coord{5, 4}, Coord{4, 3}, Coord{4, 5}, Coord{2, 7}}) add_agent(s, c);
    s.rng = Rng(31);
    CaptureOutcome cap;
    const auto next = pursuit_check_and_respawn(s, &cap);
    out.require(cap.scored && next.score == 1.0, "capture not scored");
    auto without = s;
    without.meshes.erase(std::remove_if(without.meshes.begin(), without.meshes.end(),
                                        [](const Mesh& m) { return m.kind == MeshKind::Prey; }),
                         without.meshes.end());
    Coord best = cap.candidates.front();
    for (Coord c : cap.candidates) {
        const double h = window_threat(without, c), hb = window_threat(without, best);
        if (h < hb || (h == hb && c < best)) best = c;
    }
    out.require(cap.candidates.size() == 8, "expected 8 respawn candidates");
    out.require(cap.respawn == best && next.prey()->anchor == best, "respawn is not the argmin-H candidate");

    // Sync: every prev state x every 3-light combination.
    const std::optional<bool> prevs[] = {std::nullopt, false, true};
    int rows = 0;
    for (auto prev : prevs) {
        for (int bits = 0; bits < 8; ++bits) {
            TaskState ts;
            ts.sync_prev = prev;
            const bool value = bits == 7;
            const bool expect = (bits == 0 || bits == 7) && (!prev || *prev != value);
            if (sync_update({bool(bits & 1), bool(bits & 2), bool(bits & 4)}, ts) == expect) ++rows;
        }
    }
    out.require(rows == 24, fmt::format("sync truth table {}/24", rows));

    // Foraging pickup then delivery.
    auto f = empty_world(7, 7, TaskKind::Foraging);
    add_object(f, MeshKind::Food, {1, 1}, Shape::unit(), true);
    add_object(f, MeshKind::Nest, {5, 5}, Shape::unit(), true);
    const int a = add_agent(f, {1, 2});
    const auto pick = foraging_update(f);
    f.find_mesh(f.agents[a].mesh)->anchor = {4, 5};
    const auto drop = foraging_update(f);
    out.require(pick.picked_up == 1 && drop.delivered == 1 && f.score == 1.0 && !f.agents[a].carrying,
                "foraging cycle");

    // Transport bonus.
    const double b0 = escape_bonus(0, 100), b42 = escape_bonus(42, 100), b100 = escape_bonus(100, 100);
    out.require(b0 == 1.0 && b42 == 0.58 && b100 == 0.0, fmt::format("bonus {} {} {}", b0, b42, b100));
    if (out.ok) out.detail = "capture/respawn, 24/24 sync rows, foraging cycle, bonus {1.0, 0.58, 0.0}";
    return out;
}

// 5. Prompt golden file and example response.
Outcome prompt_golden() {
    Outcome out;
    const auto expected = read_file(test_data("golden/transport_agent5_round62.txt"));
    const auto actual = render_golden_prompt(golden_example());
    if (actual != expected) {
        std::size_t i = 0;
        while (i < actual.size() && i < expected.size() && actual[i] == expected[i]) ++i;
        out.require(false, fmt::format("prompt differs at byte {}", i));
    }
    const auto doc = nlohmann::json::parse(read_file(test_data("golden/example_response.json")));
    const auto intent = parse_response(doc.at("response").get<std::string>());
    out.require(intent.action == Action::Up && !intent.parse_failed, "example action is not UP");
    out.require(intent.message == doc.at("message").get<std::string>(), "example message mismatch");
    if (out.ok) out.detail = fmt::format("{} bytes identical", expected.size());
    return out;
}

// 6. Metric hand values and exploration monotonicity.
Outcome metric_checks() {
    Outcome out;
    using A = Action;
    const auto near = [](double x, double y) { return std::abs(x - y) <= 1e-12; };
    out.require(near(directional_entropy({A::Up, A::Up, A::Up, A::Up}), 0.0), "entropy all-UP");
    out.require(near(directional_entropy({A::Up, A::Down, A::Left, A::Right}), 2.0), "entropy uniform");
    out.require(near(directional_entropy({A::Up, A::Up, A::Down, A::Down}), 1.0), "entropy 2/2");
    out.require(near(polarization({A::Up, A::Up, A::Up}), 1.0), "polarization all-UP");
    out.require(near(polarization({A::Up, A::Down, A::Up, A::Down}), 0.0), "polarization half/half");

    EnvConfig cfg;
    cfg.num_agents = 10;
    cfg.max_round = 60;
    for (TaskKind t : kAllTasks) {
        ScriptedController ctl({PolicyKind::RandomWalk, 1, true}, t);
        const auto r = run_episode("x", t, 5, cfg, ctl);
        const auto m = recompute_metrics(r.data);
        for (std::size_t i = 1; i < m.size(); ++i) {
            out.require(m[i].exploration_rate >= m[i - 1].exploration_rate,
                        fmt::format("{}: exploration decreased at round {}", to_string(t), i));
        }
    }
    return out;
}

// 7. Byte-identical logs from repeated scripted runs.
Outcome determinism() {
    Outcome out;
    EnvConfig cfg;
    cfg.num_agents = 10;
    cfg.max_round = 100;
    double slowest = 0.0;
    for (TaskKind t : kAllTasks) {
        std::string game[2], agents[2];
        for (int pass = 0; pass < 2; ++pass) {
            TempDir dir;
            const auto t0 = Clock::now();
            ScriptedController ctl({PolicyKind::RandomWalk, 42, true}, t);
            RunLogWriter writer(dir.path(), "det");
            run_episode("det", t, 11, cfg, ctl, &writer);
            slowest = std::max(slowest, seconds_since(t0));
            game[pass] = read_file(game_log_path(dir.path(), "det").string());
            agents[pass] = read_file(agent_log_path(dir.path(), "det").string());
        }
        out.require(game[0] == game[1], fmt::format("{}: game_log differs", to_string(t)));
        out.require(agents[0] == agents[1], fmt::format("{}: agent_log differs", to_string(t)));
    }
    out.require(slowest < 5.0, fmt::format("slowest episode {:.2f} s", slowest));
    if (out.ok) out.detail = fmt::format("5 tasks, slowest episode {:.3f} s", slowest);
    return out;
}

// 8. Metrics recomputed from written logs equal the live ones.
Outcome replay_equivalence() {
    Outcome out;
    TempDir dir;
    Rng rng(808);
    const PolicyKind policies[] = {PolicyKind::RandomWalk, PolicyKind::Greedy};
    std::vector<RunData> runs;
    std::vector<std::vector<RoundMetrics>> live;
    for (int i = 0; i < 10; ++i) {
        const TaskKind t = kAllTasks[rng.below(5)];
        EnvConfig cfg;
        cfg.num_agents = rng.between(4, 12);
        cfg.max_round = rng.between(20, 60);
        ScriptedController ctl({policies[rng.below(2)], rng.next(), true}, t);
        auto r = run_episode(fmt::format("replay{}", i), t, rng.next() % 1000, cfg, ctl);
        runs.push_back(std::move(r.data));
        live.push_back(std::move(r.metrics));
    }
    write_batch(dir.path(), runs);
    int equal = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (recompute_metrics(load_run(runs[i].meta.run_id, dir.path())) == live[i]) ++equal;
    }
    out.require(equal == 10, fmt::format("{}/10 runs equal", equal));
    if (out.ok) out.detail = "10/10 runs equal on every field";
    return out;
}

// 9. Pursuit against a flaky local endpoint.
Outcome llm_smoke() {
    Outcome out;
    MockLlm::Options opt;
    opt.failure_rate = 0.3;
    opt.delay_ms = 2;
    MockLlm mock(opt);
    ModelEndpointConfig cfg;
    cfg.base_url = mock.base_url();
    cfg.model = "mock";
    cfg.api_key = "local";
    cfg.max_retries = 1;
    cfg.backoff_s = 0.0;
    cfg.timeout_s = 10.0;
    LlmController ctl(cfg);

    struct Barrier : EpisodeObserver {
        const MockLlm* mock;
        const LlmController* ctl;
        int checks = 0;
        bool ok = true;
        Barrier(const MockLlm* m, const LlmController* c) : mock(m), ctl(c) {}
        void before_commit(const EnvironmentState&) override {
            ++checks;
            ok = ok && mock->active() == 0 && ctl->stats().in_flight == 0;
        }
    } barrier(&mock, &ctl);

    EnvConfig env;
    env.num_agents = 6;
    env.max_round = 20;
    EpisodeResult r;
    try {
        r = run_episode("smoke", TaskKind::Pursuit, 1, env, ctl, &barrier);
    } catch (const std::exception& e) {
        out.require(false, fmt::format("episode threw: {}", e.what()));
        return out;
    }
    out.require(r.data.meta.rounds == 20 || r.final_state.done, "episode did not complete");
    out.require(barrier.ok && barrier.checks == r.data.meta.rounds, "commit happened with requests outstanding");
    int fallbacks = 0, bad = 0;
    for (const auto& a : r.data.agents) {
        if (a.fallback.rfind("gateway: ", 0) != 0) continue;
        ++fallbacks;
        if (a.action != "STAY") ++bad;
    }
    out.require(mock.failures() > 0, "no failures were injected");
    out.require(fallbacks > 0 && bad == 0, fmt::format("{} fallbacks, {} not STAY", fallbacks, bad));
    if (out.ok) {
        out.detail = fmt::format("{} rounds, {} requests, {} injected failures, {} STAY fallbacks, peak {} in flight",
                                 r.data.meta.rounds, mock.requests(), mock.failures(), fallbacks,
                                 ctl.stats().peak_in_flight.load());
    }
    return out;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"physics scenarios", physics_scenarios},
        {"movement solver vs exhaustive search", solver_oracle},
        {"flocking distance vs brute force", flocking_oracle},
        {"task scoring suites", scoring_suites},
        {"prompt golden file and response parsing", prompt_golden},
        {"metric hand checks", metric_checks},
        {"determinism of scripted runs", determinism},
        {"log replay equivalence", replay_equivalence},
        {"LLM smoke test against mock endpoint", llm_smoke},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = fmt::format("exception: {}", e.what());
        }
        const double dt = seconds_since(t0);
        std::cout << fmt::format("[{}] {}. {} ({:.3f} s){}{}\n", o.ok ? "PASS" : "FAIL", index, name, dt,
                                 o.detail.empty() ? "" : ": ", o.detail)
                  << std::flush;
        failed += o.ok ? 0 : 1;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
