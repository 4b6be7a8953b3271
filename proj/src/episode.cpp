#include "swarm/episode.hpp"

#include <fmt/format.h>

#include "swarm/generate.hpp"
#include "swarm/physics.hpp"
#include "swarm/tasks.hpp"

namespace swarm {

std::vector<AgentReply> ScriptedController::decide(const std::vector<Observation>& observations,
                                                   const std::vector<std::string>&) {
    std::vector<AgentReply> out;
    out.reserve(observations.size());
    for (const auto& obs : observations) {
        out.push_back({format_response(scripted_policy(obs, policy_, task_)), 0, ""});
    }
    return out;
}

std::string ScriptedController::model_label() const {
    return fmt::format("scripted-{}", to_string(policy_.kind));
}

LlmController::LlmController(ModelEndpointConfig cfg, GatewayStats* stats)
    : cfg_(std::move(cfg)), stats_(stats != nullptr ? stats : &own_stats_) {
    cfg_.validate();
}

std::vector<AgentReply> LlmController::decide(const std::vector<Observation>&,
                                              const std::vector<std::string>& prompts) {
    std::vector<AgentReply> out;
    for (auto& c : complete_round(prompts, cfg_, stats_)) {
        out.push_back({c.text.value_or(""), c.retries, c.text ? "" : c.error});
    }
    return out;
}

RoundRecord snapshot(const EnvironmentState& state, int round) {
    RoundRecord rec;
    rec.round = round;
    rec.grid = symbol_grid(state).cells;
    rec.score = state.score;
    for (const AgentState& a : state.agents) {
        if (auto p = state.agent_position(a.id)) rec.agents.push_back({a.id, p->col, p->row});
    }
    return rec;
}

namespace {

std::map<int, Coord> positions_of(const std::vector<AgentPosition>& agents) {
    std::map<int, Coord> out;
    for (const auto& a : agents) out[a.id] = {a.y, a.x};
    return out;
}

}  // namespace

EpisodeResult run_episode(const std::string& run_id, TaskKind task, std::uint64_t seed,
                          const EnvConfig& config, Controller& controller, EpisodeObserver* observer) {
    EnvironmentState state = generate_environment(task, seed, config);
    const std::string description = task_description(state);
    const bool sync = task == TaskKind::Synchronization;

    EpisodeResult result;
    RunMeta& meta = result.data.meta;
    meta.run_id = run_id;
    meta.model = controller.model_label();
    meta.policy = controller.policy_label();
    meta.task = std::string(to_string(task));
    meta.seed = seed;
    meta.num_agents = config.num_agents;
    meta.max_round = config.max_round;
    meta.height = config.height;
    meta.width = config.width;
    meta.view_size = config.view_size;
    meta.memory = config.memory;
    meta.temperature = controller.temperature();
    meta.initial = snapshot(state, 0);
    if (observer != nullptr) observer->on_start(meta);

    std::vector<AgentMemory> memory(state.agents.size(), AgentMemory(config.memory));
    std::vector<std::vector<std::string>> inboxes(state.agents.size());
    ExplorationTracker exploration;
    exploration.add(positions_of(meta.initial.agents));

    while (!state.done && state.round < state.max_round) {
        const int round = state.round;
        const EnvironmentState before = state;

        std::vector<int> alive;
        std::vector<Observation> observations;
        std::vector<std::string> prompts;
        for (const AgentState& a : state.agents) {
            if (!a.on_map()) continue;
            alive.push_back(a.id);
            observations.push_back(build_observation(state, a.id, config.view_size, memory[a.id], inboxes[a.id]));
            const auto& hist = memory[a.id].history();
            prompts.push_back(render_prompt(observations.back(), description,
                                            {hist.begin(), hist.end()}, config.memory));
        }

        const auto replies = controller.decide(observations, prompts);
        if (replies.size() != alive.size()) {
            throw ConsistencyError(fmt::format("controller answered {} of {} agents", replies.size(), alive.size()));
        }
        if (controller.outstanding() != 0) {
            throw ConsistencyError("commit attempted while requests are outstanding");
        }
        if (observer != nullptr) observer->before_commit(state);

        std::vector<AgentRecord> agent_records;
        std::vector<PushIntent> pushes;
        std::vector<std::string> outbox(state.agents.size());
        RoundInputs inputs;
        for (std::size_t i = 0; i < alive.size(); ++i) {
            const int id = alive[i];
            AgentRecord rec;
            rec.round = round;
            rec.agent_id = id;
            rec.name = state.agents[id].name;
            rec.view = render_grid(observations[i].view);
            rec.prompt = prompts[i];
            rec.response = replies[i].response;
            rec.retries = replies[i].retries;
            ActionIntent intent;
            if (!replies[i].error.empty()) {
                rec.fallback = "gateway: " + replies[i].error;
            } else {
                intent = parse_response(replies[i].response, sync);
                if (intent.parse_failed) rec.fallback = "parse";
            }
            intent.agent = id;
            rec.action = std::string(to_string(intent.action));
            rec.message = intent.message;
            if (auto d = direction_of(intent.action)) pushes.push_back({id, *d});
            outbox[id] = intent.message;
            inputs.actions.emplace_back(id, intent.action);
            inputs.messages.push_back(intent.message);
            memory[id].remember(observations[i].view, {round, intent.action, intent.message});
            agent_records.push_back(std::move(rec));
        }

        state = step_physics(state, pushes);

        bool captured = false;
        switch (task) {
            case TaskKind::Foraging: foraging_update(state); break;
            case TaskKind::Pursuit: {
                CaptureOutcome outcome;
                state = pursuit_check_and_respawn(state, &outcome);
                captured = outcome.scored;
                break;
            }
            case TaskKind::Transport: transport_update(state); break;
            case TaskKind::Flocking: flocking_update_score(state); break;
            case TaskKind::Synchronization: break;
        }
        if (task == TaskKind::Pursuit && !captured && !state.done) state = pursuit_prey_step(state);
        if (sync) {
            for (const auto& [id, action] : inputs.actions) {
                if (action == Action::Switch) state.agents[id].light = !state.agents[id].light;
            }
            std::vector<bool> lights;
            for (const AgentState& a : state.agents) lights.push_back(a.light);
            if (sync_update(lights, state.task_state)) state.score += 1.0;
        }

        inboxes = deliver_messages(before, outbox, config.view_size);
        state.round = round + 1;

        RoundRecord rec = snapshot(state, round);
        for (const auto& m : outbox) {
            if (!m.empty()) rec.messages.push_back(m);
        }
        inputs.before = positions_of(snapshot(before, round).agents);
        inputs.after = positions_of(rec.agents);
        result.metrics.push_back(round_metrics(inputs, exploration));

        if (observer != nullptr) observer->on_round(rec, agent_records);
        result.data.rounds.push_back(std::move(rec));
        for (auto& r : agent_records) result.data.agents.push_back(std::move(r));
    }

    meta.rounds = static_cast<int>(result.data.rounds.size());
    meta.score = state.score;
    result.final_state = std::move(state);
    return result;
}

std::vector<RoundMetrics> recompute_metrics(const RunData& run) {
    std::vector<RoundMetrics> out;
    ExplorationTracker exploration;
    exploration.add(positions_of(run.meta.initial.agents));
    const std::vector<AgentPosition>* before = &run.meta.initial.agents;
    std::size_t next_agent = 0;
    for (const RoundRecord& rec : run.rounds) {
        RoundInputs inputs;
        inputs.before = positions_of(*before);
        inputs.after = positions_of(rec.agents);
        for (; next_agent < run.agents.size() && run.agents[next_agent].round == rec.round; ++next_agent) {
            const AgentRecord& a = run.agents[next_agent];
            const auto action = parse_action(a.action);
            if (!action) {
                throw std::invalid_argument(fmt::format("agent_log[{}].action: '{}' is not an action",
                                                        next_agent, a.action));
            }
            inputs.actions.emplace_back(a.agent_id, *action);
            inputs.messages.push_back(a.message);
        }
        out.push_back(round_metrics(inputs, exploration));
        before = &rec.agents;
    }
    return out;
}

}  // namespace swarm
