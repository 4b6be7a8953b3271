#include "swarm/agent.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "swarm/rng.hpp"

namespace swarm {

void AgentMemory::remember(const SymbolGrid& frame, const HistoryEntry& entry) {
    frames_.push_front(frame);
    history_.push_back(entry);
    // The current frame takes one of the `capacity_` slots at prompt time.
    while (static_cast<int>(frames_.size()) > std::max(0, capacity_ - 1)) frames_.pop_back();
    while (static_cast<int>(history_.size()) > capacity_) history_.pop_front();
}

SymbolGrid egocentric_view(const EnvironmentState& state, int agent, int view_size) {
    const auto pos = state.agent_position(agent);
    if (!pos) throw std::invalid_argument(fmt::format("agent {} is not on the map", agent));
    const int lo = (view_size - 1) / 2;
    const Occupancy occ(state, false);
    SymbolGrid grid;
    grid.origin = {pos->row - lo, pos->col - lo};
    grid.cells.resize(view_size);
    for (int i = 0; i < view_size; ++i) {
        for (int j = 0; j < view_size; ++j) {
            const Coord c{grid.origin.row + i, grid.origin.col + j};
            grid.cells[i].push_back(c == *pos ? "Y" : cell_at(state, occ, c));
        }
    }
    return grid;
}

std::string status_line(const EnvironmentState& state, int agent) {
    const AgentState& a = state.agents.at(agent);
    switch (state.task) {
        case TaskKind::Foraging:
            return a.carrying ? "You are carrying food." : "You are not carrying food.";
        case TaskKind::Synchronization:
            return a.light ? "Your light is ON." : "Your light is OFF.";
        default:
            return "";
    }
}

Observation build_observation(const EnvironmentState& state, int agent, int view_size,
                              const AgentMemory& memory, std::vector<std::string> inbox) {
    const AgentState& a = state.agents.at(agent);
    Observation obs;
    obs.agent = agent;
    obs.name = a.name;
    obs.position = state.agent_position(agent).value();
    obs.round = state.round;
    obs.score = state.score;
    obs.view_size = view_size;
    obs.view = egocentric_view(state, agent, view_size);
    obs.frames.push_back(obs.view);
    obs.frames.insert(obs.frames.end(), memory.past_frames().begin(), memory.past_frames().end());
    obs.inbox = std::move(inbox);
    obs.carrying = a.carrying;
    obs.light = a.light;
    obs.status = status_line(state, agent);
    return obs;
}

std::string render_view_block(const std::vector<SymbolGrid>& frames) {
    std::string out;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (i > 0) out += '\n';
        out += i == 0 ? std::string("Current Step:") : fmt::format("{} Steps Before:", i);
        out += '\n';
        out += render_grid(frames[i]);
    }
    return out;
}

namespace {

constexpr std::string_view kPromptRules =
    "Symbol legend:\n"
    "- Number: An agent whose id is this number (do not mistake column no. and line no. as agent id).\n"
    "- Y: Yourself. Others see you as your id instead of \"Y\".\n"
    "- W: Wall.\n"
    "- B: Pushable obstacle (requires at least 5 agents pushing in the same direction).\n"
    "- .: Empty space (you can move to this area).\n"
    "- *: Area outside the map.\n"
    "And other symbols given in task description (if any).\n"
    "\n"
    "Available actions:\n"
    "1. UP: Move up\n"
    "2. DOWN: Move down\n"
    "3. LEFT: Move left\n"
    "4. RIGHT: Move right\n"
    "5. STAY: Stay in place\n"
    "6. MSG: Send a message\n"
    "And other actions given in task description (if any).\n"
    "\n"
    "Physics rules:\n"
    "1. Your own weight is 1, and you can exert a force of up to 2.\n"
    "2. An object (including yourself) can only be pushed if the total force in one direction is "
    "greater than or equal to its weight.\n"
    "3. Static objects like W (walls) cannot be pushed; only B can be pushed.\n"
    "4. Force can be transmitted, but only between directly adjacent objects. That means, if an "
    "agent is applying force in a direction, you can push that agent from behind to help.\n"
    "5. Only pushing is allowed - there is no pulling or lateral dragging. In other words, to push "
    "an object to the right, you must be on its left side and take the RIGHT action to apply "
    "force.\n"
    "\n"
    "Message rules:\n"
    "1. A message is a string including things you want to tell other agents.\n"
    "2. Your message can be received by all agents within your view, and you can receive messages "
    "from all agents within your view.\n"
    "3. Messages are broadcast-based. The source of a message is anonymous.\n"
    "4. Write only what's necessary in your message. Avoid any ambiguity in your message.\n"
    "5. Messages is capped to no more than 120 characters, exceeding part will be replaced by "
    "\"...\".\n"
    "\n"
    "Other rules:\n"
    "1. Coordinates are represented as (i, j), where i is the row index and j is the column "
    "index. Your {k}x{k} vision uses global coordinates, so please use global coordinates.\n"
    "2. The direction of increasing i is downward, and increasing j is to the right.\n"
    "3. Objects that are completely outside the map (marked with \"*\") will be removed.\n"
    "\n"
    "Please think carefully and choose your next action. You will need to collaborate with other "
    "agents to successfully complete the task.\n"
    "\n"
    "Your response should include:\n"
    "1. Analysis of the current situation\n"
    "2. Your decision and reasoning\n"
    "3. The message to be left (if any)\n"
    "\n"
    "End your response clearly with your chosen action: \"ACTION: [YOUR_ACTION]\" and/or "
    "\"MSG: [Your message (no line breaks).]\"";

}  // namespace

std::string render_prompt(const Observation& obs, const std::string& task_desc,
                          const std::vector<HistoryEntry>& history, int memory) {
    std::string messages;
    for (const auto& m : obs.inbox) messages += fmt::format("Message: \"{}\"\n", m);
    std::string past;
    for (const auto& h : history) {
        past += fmt::format("Round {}: Action: {}, Message: \"{}\"\n", h.round, to_string(h.action),
                            h.message);
    }
    std::string out = fmt::format(
        "You are Agent {}, operating in a multi-agent environment. Your goal is to complete the "
        "task through exploration and collaboration.\n\n"
        "Task description:\n{}\n\n"
        "Round: {}\n\n"
        "Your recent {}-step vision (not the entire map):\n{}\n\n"
        "Your current observation:\n{}\n\n"
        "Message you received:\n{}\n\n"
        "Your action history:\n{}\n\n",
        obs.name, task_desc, obs.round, memory, render_view_block(obs.frames), obs.status, messages,
        past);
    std::string rules(kPromptRules);
    const std::string k = std::to_string(obs.view_size);
    const auto at = rules.find("{k}x{k}");
    rules.replace(at, 7, k + "x" + k);
    return out + rules;
}

namespace {

bool word_start(std::string_view text, std::size_t i) {
    return i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
}

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::size_t skip_spaces(std::string_view text, std::size_t i) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    return i;
}

std::string trim(std::string_view text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return std::string(text.substr(b, e - b));
}

bool utf8_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

std::size_t code_points(std::string_view text) {
    return static_cast<std::size_t>(std::count_if(
        text.begin(), text.end(), [](char c) { return !utf8_continuation(static_cast<unsigned char>(c)); }));
}

std::string truncate_message(std::string_view message) {
    if (code_points(message) <= kMaxMessageLength) return std::string(message);
    std::size_t kept = 0;
    std::size_t i = 0;
    for (; i < message.size(); ++i) {
        if (!utf8_continuation(static_cast<unsigned char>(message[i]))) {
            if (kept == kMaxMessageLength - 3) break;
            ++kept;
        }
    }
    return std::string(message.substr(0, i)) + "...";
}

ActionIntent parse_response(std::string_view text, bool allow_switch) {
    ActionIntent intent;
    const std::string low = lower(text);

    std::optional<Action> action;
    for (std::size_t at = low.find("action"); at != std::string::npos; at = low.find("action", at + 1)) {
        if (!word_start(low, at)) continue;
        std::size_t i = skip_spaces(low, at + 6);
        if (i >= low.size() || low[i] != ':') continue;
        i = skip_spaces(low, i + 1);
        while (i < low.size() && (low[i] == '[' || low[i] == '"' || low[i] == '\'' || low[i] == '*' ||
                                  low[i] == ' ')) {
            ++i;
        }
        std::size_t j = i;
        while (j < low.size() && std::isalpha(static_cast<unsigned char>(low[j]))) ++j;
        const auto parsed = parse_action(std::string_view(low).substr(i, j - i));
        if (!parsed) continue;
        if (*parsed == Action::Switch && !allow_switch) continue;
        action = parsed;
    }

    std::optional<std::string> message;
    for (std::size_t at = low.find("msg"); at != std::string::npos; at = low.find("msg", at + 1)) {
        if (!word_start(low, at)) continue;
        const std::size_t colon = skip_spaces(low, at + 3);
        if (colon >= low.size() || low[colon] != ':') continue;
        std::size_t end = text.find('\n', colon);
        if (end == std::string_view::npos) end = text.size();
        message = trim(text.substr(colon + 1, end - colon - 1));
    }

    if (action) {
        intent.action = *action;
        intent.message = truncate_message(message.value_or(""));
    } else {
        intent.action = Action::Stay;
        intent.parse_failed = true;
    }
    return intent;
}

std::vector<std::vector<std::string>> deliver_messages(const EnvironmentState& state,
                                                       const std::vector<std::string>& outbox,
                                                       int view_size) {
    const int lo = (view_size - 1) / 2;
    std::vector<std::vector<std::string>> inboxes(state.agents.size());
    for (std::size_t s = 0; s < outbox.size() && s < state.agents.size(); ++s) {
        if (outbox[s].empty()) continue;
        const auto from = state.agent_position(static_cast<int>(s));
        if (!from) continue;
        for (std::size_t r = 0; r < state.agents.size(); ++r) {
            if (r == s) continue;
            const auto to = state.agent_position(static_cast<int>(r));
            if (!to) continue;
            if (std::abs(to->row - from->row) <= lo && std::abs(to->col - from->col) <= lo) {
                inboxes[r].push_back(outbox[s]);
            }
        }
    }
    return inboxes;
}

std::string_view to_string(PolicyKind p) {
    switch (p) {
        case PolicyKind::Stay: return "stay";
        case PolicyKind::RandomWalk: return "random-walk";
        case PolicyKind::Greedy: return "greedy";
    }
    return "?";
}

PolicyKind parse_policy(std::string_view name) {
    const std::string l = lower(name);
    for (PolicyKind p : {PolicyKind::Stay, PolicyKind::RandomWalk, PolicyKind::Greedy}) {
        if (l == to_string(p)) return p;
    }
    throw ConfigError(fmt::format("unknown policy '{}'", name));
}

namespace {

ActionIntent random_walk(const Observation& obs, const ScriptedPolicy& policy, TaskKind task) {
    Rng rng(mix_seed(mix_seed(policy.seed, static_cast<std::uint64_t>(obs.agent)),
                     static_cast<std::uint64_t>(obs.round)));
    std::vector<Action> choices = {Action::Up, Action::Down, Action::Left, Action::Right, Action::Stay};
    if (task == TaskKind::Synchronization) choices.push_back(Action::Switch);
    ActionIntent intent;
    intent.agent = obs.agent;
    intent.action = choices[rng.below(choices.size())];
    if (policy.chatty && rng.chance(0.3)) {
        if (rng.chance(0.5)) {
            intent.message = fmt::format("At ({},{}), going {}.", obs.position.row, obs.position.col,
                                         to_string(intent.action));
        } else {
            intent.message = fmt::format("Anyone near ({},{})?", obs.position.row, obs.position.col);
        }
    }
    return intent;
}

std::optional<std::string> greedy_target(const Observation& obs, TaskKind task) {
    switch (task) {
        case TaskKind::Pursuit: return "P";
        case TaskKind::Foraging: return obs.carrying ? "N" : "F";
        case TaskKind::Transport: return "B";
        default: return std::nullopt;
    }
}

}  // namespace

ActionIntent scripted_policy(const Observation& obs, const ScriptedPolicy& policy, TaskKind task) {
    ActionIntent intent;
    intent.agent = obs.agent;
    switch (policy.kind) {
        case PolicyKind::Stay:
            return intent;
        case PolicyKind::RandomWalk:
            return random_walk(obs, policy, task);
        case PolicyKind::Greedy: {
            const auto symbol = greedy_target(obs, task);
            std::optional<Coord> best;
            if (symbol) {
                for (int i = 0; i < obs.view.rows(); ++i) {
                    for (int j = 0; j < obs.view.cols(); ++j) {
                        if (obs.view.cells[i][j] != *symbol) continue;
                        const Coord c{obs.view.origin.row + i, obs.view.origin.col + j};
                        if (!best || manhattan(c, obs.position) < manhattan(*best, obs.position)) best = c;
                    }
                }
            }
            if (!best) return random_walk(obs, policy, task);
            const Coord d = *best - obs.position;
            if (d.row == 0 && d.col == 0) return intent;
            if (std::abs(d.row) >= std::abs(d.col)) intent.action = d.row < 0 ? Action::Up : Action::Down;
            else intent.action = d.col < 0 ? Action::Left : Action::Right;
            return intent;
        }
    }
    return intent;
}

std::string format_response(const ActionIntent& intent) {
    std::string out = fmt::format("ACTION: {}", to_string(intent.action));
    if (!intent.message.empty()) out += fmt::format("\nMSG: {}", intent.message);
    return out;
}

}  // namespace swarm
