#include <doctest.h>

#include <fmt/format.h>

#include "mock_llm.hpp"
#include "swarm/episode.hpp"
#include "swarm/generate.hpp"

using namespace swarm;
using namespace swarm::testing;

namespace {

EnvConfig small_config(int rounds = 20) {
    EnvConfig cfg;
    cfg.num_agents = 6;
    cfg.max_round = rounds;
    return cfg;
}

/// Checks the world handed to before_commit is the one the agents observed.
class CommitProbe : public EpisodeObserver {
public:
    void before_commit(const EnvironmentState& state) override {
        ++commits;
        if (last_round && state.round != *last_round + 1) ordered = false;
        last_round = state.round;
    }
    void on_round(const RoundRecord& rec, const std::vector<AgentRecord>& agents) override {
        for (const auto& a : agents) same_round = same_round && a.round == rec.round;
    }
    int commits = 0;
    bool ordered = true;
    bool same_round = true;
    std::optional<int> last_round;
};

class BrokenController : public Controller {
public:
    std::vector<AgentReply> decide(const std::vector<Observation>& obs, const std::vector<std::string>&) override {
        return std::vector<AgentReply>(obs.size(), AgentReply{"ACTION: UP", 0, ""});
    }
    std::string model_label() const override { return "broken"; }
    std::string policy_label() const override { return "broken"; }
    int outstanding() const override { return 1; }
};

}  // namespace

TEST_CASE("scripted episodes run to max_round and log every live agent") {
    for (TaskKind t : kAllTasks) {
        ScriptedController ctl({PolicyKind::RandomWalk, 3, true}, t);
        CommitProbe probe;
        const auto r = run_episode("ep", t, 9, small_config(), ctl, &probe);
        CAPTURE(to_string(t));
        CHECK(r.data.rounds.size() == r.metrics.size());
        CHECK(r.data.meta.rounds == static_cast<int>(r.data.rounds.size()));
        CHECK(r.data.meta.model == "scripted-random-walk");
        CHECK(r.data.meta.policy == "random-walk");
        CHECK_FALSE(r.data.meta.temperature);
        CHECK(r.data.meta.initial.agents.size() == 6);
        CHECK(probe.commits == r.data.meta.rounds);
        CHECK(probe.ordered);
        CHECK(probe.same_round);
        if (!r.final_state.done) CHECK(r.data.meta.rounds == 20);
        for (std::size_t i = 0; i < r.data.rounds.size(); ++i) CHECK(r.data.rounds[i].round == static_cast<int>(i));
        CHECK(r.data.meta.score == r.final_state.score);
        for (const auto& a : r.data.agents) {
            CHECK(a.fallback.empty());
            CHECK(parse_action(a.action));
        }
    }
}

TEST_CASE("stay policy leaves agents in place") {
    ScriptedController ctl({PolicyKind::Stay, 0, false}, TaskKind::Flocking);
    const auto r = run_episode("stay", TaskKind::Flocking, 1, small_config(5), ctl);
    for (const auto& rec : r.data.rounds) CHECK(rec.agents == r.data.meta.initial.agents);
    for (const auto& m : r.metrics) {
        CHECK(m.stillness_proportion == 1.0);
        CHECK(m.push_events == 0.0);
        CHECK(m.avg_moving_distance == 0.0);
    }
}

TEST_CASE("identical inputs give identical runs") {
    for (TaskKind t : kAllTasks) {
        ScriptedController a({PolicyKind::Greedy, 5, true}, t), b({PolicyKind::Greedy, 5, true}, t);
        const auto x = run_episode("d", t, 21, small_config(), a);
        const auto y = run_episode("d", t, 21, small_config(), b);
        CHECK(x.data == y.data);
        CHECK(x.metrics == y.metrics);
    }
}

TEST_CASE("live metrics equal metrics recomputed from the records") {
    for (TaskKind t : kAllTasks) {
        ScriptedController ctl({PolicyKind::RandomWalk, 8, true}, t);
        const auto r = run_episode("m", t, 2, small_config(30), ctl);
        CHECK(recompute_metrics(r.data) == r.metrics);
        for (std::size_t i = 1; i < r.metrics.size(); ++i) {
            CHECK(r.metrics[i].exploration_rate >= r.metrics[i - 1].exploration_rate);
        }
    }
}

TEST_CASE("prompts carry the history and inbox of earlier rounds") {
    ScriptedController ctl({PolicyKind::RandomWalk, 4, true}, TaskKind::Pursuit);
    const auto r = run_episode("h", TaskKind::Pursuit, 4, small_config(6), ctl);
    for (const auto& a : r.data.agents) {
        CHECK(a.prompt.find(fmt::format("Round: {}\n", a.round)) != std::string::npos);
        if (a.round > 0) CHECK(a.prompt.find(fmt::format("Round {}: Action: ", a.round - 1)) != std::string::npos);
        CHECK(a.prompt.find(a.view.substr(0, a.view.find('\n'))) != std::string::npos);
    }
}

TEST_CASE("engine refuses to commit with outstanding requests") {
    BrokenController ctl;
    CHECK_THROWS_AS(run_episode("b", TaskKind::Pursuit, 0, small_config(), ctl), ConsistencyError);
}

TEST_CASE("LLM controller: fallbacks and barrier") {
    MockLlm::Options opt;
    opt.failure_rate = 0.3;
    MockLlm mock(opt);
    ModelEndpointConfig cfg;
    cfg.base_url = mock.base_url();
    cfg.model = "mock";
    cfg.api_key = "k";
    cfg.max_retries = 1;
    cfg.backoff_s = 0;
    cfg.max_concurrent = 4;
    LlmController ctl(cfg);

    struct Barrier : EpisodeObserver {
        const MockLlm* mock = nullptr;
        const LlmController* ctl = nullptr;
        bool ok = true;
        void before_commit(const EnvironmentState&) override {
            ok = ok && mock->active() == 0 && ctl->stats().in_flight == 0;
        }
    } barrier;
    barrier.mock = &mock;
    barrier.ctl = &ctl;

    const auto r = run_episode("llm", TaskKind::Pursuit, 3, small_config(8), ctl, &barrier);
    CHECK(barrier.ok);
    CHECK(r.data.meta.rounds == 8);
    CHECK(r.data.meta.temperature == 0.7);
    int gateway = 0;
    for (const auto& a : r.data.agents) {
        if (a.fallback.rfind("gateway: ", 0) == 0) {
            ++gateway;
            CHECK(a.action == "STAY");
            CHECK(a.response.empty());
        }
    }
    CHECK(gateway > 0);
    CHECK(mock.failures() > 0);
}
