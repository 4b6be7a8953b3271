#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarm/agent.hpp"
#include "swarm/grid.hpp"
#include "swarm/llm.hpp"
#include "swarm/metrics.hpp"

namespace swarm {

inline constexpr int kSchemaVersion = 1;

struct AgentPosition {
    int id = 0;
    int x = 0;  // column
    int y = 0;  // row

    friend bool operator==(const AgentPosition&, const AgentPosition&) = default;
};

/// Global state after a round's commit, plus the messages sent during it.
struct RoundRecord {
    int round = 0;
    std::vector<std::vector<std::string>> grid;
    double score = 0.0;
    std::vector<AgentPosition> agents;
    std::vector<std::string> messages;

    friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct AgentRecord {
    int round = 0;
    int agent_id = 0;
    std::string name;
    std::string view;
    std::string prompt;
    std::string response;
    std::string action;
    std::string message;
    std::string fallback;  // empty, "parse" or "gateway: <error>"
    int retries = 0;

    friend bool operator==(const AgentRecord&, const AgentRecord&) = default;
};

struct RunMeta {
    int schema_version = kSchemaVersion;
    std::string run_id;
    std::string model;
    std::string policy;
    std::string task;
    std::uint64_t seed = 0;
    int num_agents = 0;
    int max_round = 0;
    int height = 0;
    int width = 0;
    int view_size = 0;
    int memory = 0;
    std::optional<double> temperature;
    int rounds = 0;
    double score = 0.0;
    RoundRecord initial;  // round 0 state; messages unused

    friend bool operator==(const RunMeta&, const RunMeta&) = default;
};

struct RunData {
    RunMeta meta;
    std::vector<RoundRecord> rounds;
    std::vector<AgentRecord> agents;

    friend bool operator==(const RunData&, const RunData&) = default;
};

struct AgentReply {
    std::string response;
    int retries = 0;
    std::string error;  // non-empty when no response could be obtained
};

/// Decides for every live agent of a round from the same snapshot.
class Controller {
public:
    virtual ~Controller() = default;
    virtual std::vector<AgentReply> decide(const std::vector<Observation>& observations,
                                           const std::vector<std::string>& prompts) = 0;
    virtual std::string model_label() const = 0;
    virtual std::string policy_label() const = 0;
    virtual std::optional<double> temperature() const { return std::nullopt; }
    /// Requests still outstanding; the engine refuses to commit unless zero.
    virtual int outstanding() const { return 0; }
};

class ScriptedController : public Controller {
public:
    ScriptedController(ScriptedPolicy policy, TaskKind task) : policy_(policy), task_(task) {}
    std::vector<AgentReply> decide(const std::vector<Observation>& observations,
                                   const std::vector<std::string>& prompts) override;
    std::string model_label() const override;
    std::string policy_label() const override { return std::string(to_string(policy_.kind)); }

private:
    ScriptedPolicy policy_;
    TaskKind task_;
};

class LlmController : public Controller {
public:
    explicit LlmController(ModelEndpointConfig cfg, GatewayStats* stats = nullptr);
    std::vector<AgentReply> decide(const std::vector<Observation>& observations,
                                   const std::vector<std::string>& prompts) override;
    std::string model_label() const override { return cfg_.model; }
    std::string policy_label() const override { return "llm"; }
    std::optional<double> temperature() const override { return cfg_.temperature; }
    int outstanding() const override { return stats_->in_flight.load(); }
    const GatewayStats& stats() const { return *stats_; }

private:
    ModelEndpointConfig cfg_;
    GatewayStats own_stats_;
    GatewayStats* stats_;
};

class EpisodeObserver {
public:
    virtual ~EpisodeObserver() = default;
    virtual void on_start(const RunMeta&) {}
    /// Called after decisions are in and before the world changes.
    virtual void before_commit(const EnvironmentState&) {}
    virtual void on_round(const RoundRecord&, const std::vector<AgentRecord>&) {}
};

struct EpisodeResult {
    RunData data;
    std::vector<RoundMetrics> metrics;
    EnvironmentState final_state;
};

RoundRecord snapshot(const EnvironmentState& state, int round);

/// Plays up to max_round rounds (fewer if the task finishes) and returns the
/// logs and per-round metrics.
EpisodeResult run_episode(const std::string& run_id, TaskKind task, std::uint64_t seed,
                          const EnvConfig& config, Controller& controller,
                          EpisodeObserver* observer = nullptr);

/// Rebuilds per-round metrics from logged positions, actions and messages.
std::vector<RoundMetrics> recompute_metrics(const RunData& run);

}  // namespace swarm
