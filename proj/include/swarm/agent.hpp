#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "swarm/grid.hpp"

namespace swarm {

inline constexpr std::size_t kMaxMessageLength = 120;

struct Observation {
    int agent = 0;
    std::string name;
    Coord position;
    int round = 0;
    double score = 0.0;
    int view_size = 5;
    SymbolGrid view;                // k x k, self shown as Y
    std::vector<SymbolGrid> frames;  // newest first; frames[0] == view
    std::vector<std::string> inbox;
    bool carrying = false;
    bool light = false;
    std::string status;  // task-specific "current observation" line
};

struct HistoryEntry {
    int round = 0;
    Action action = Action::Stay;
    std::string message;
};

/// Rolling per-agent memory: past view frames and past (action, message) pairs.
class AgentMemory {
public:
    explicit AgentMemory(int capacity = 5) : capacity_(capacity) {}

    /// Frames seen in earlier rounds, newest first.
    const std::deque<SymbolGrid>& past_frames() const { return frames_; }
    const std::deque<HistoryEntry>& history() const { return history_; }

    void remember(const SymbolGrid& frame, const HistoryEntry& entry);

private:
    int capacity_;
    std::deque<SymbolGrid> frames_;
    std::deque<HistoryEntry> history_;
};

/// k x k window around `agent` with global labels. Off-map cells are `*`.
SymbolGrid egocentric_view(const EnvironmentState& state, int agent, int view_size);

Observation build_observation(const EnvironmentState& state, int agent, int view_size,
                              const AgentMemory& memory, std::vector<std::string> inbox);

std::string status_line(const EnvironmentState& state, int agent);

/// Frames labelled "Current Step:", "1 Steps Before:", ... separated by blank lines.
std::string render_view_block(const std::vector<SymbolGrid>& frames);

std::string render_prompt(const Observation& obs, const std::string& task_desc,
                          const std::vector<HistoryEntry>& history, int memory);

struct ActionIntent {
    int agent = 0;
    Action action = Action::Stay;
    std::string message;
    bool parse_failed = false;
};

/// Last `ACTION:` naming a valid action wins (SWITCH only when allowed); the
/// message is the last `MSG:` payload up to the line end. Falls back to STAY
/// with parse_failed set.
ActionIntent parse_response(std::string_view text, bool allow_switch = false);

/// Caps a message at 120 code points, replacing the overflow with "...".
std::string truncate_message(std::string_view message);
std::size_t code_points(std::string_view text);

/// Inbox per agent id. A receiver gets each non-empty message from another
/// on-map agent whose k x k window contains it, ordered by sender id.
std::vector<std::vector<std::string>> deliver_messages(const EnvironmentState& state,
                                                       const std::vector<std::string>& outbox,
                                                       int view_size);

enum class PolicyKind : std::uint8_t { Stay, RandomWalk, Greedy };

std::string_view to_string(PolicyKind p);
PolicyKind parse_policy(std::string_view name);  // throws ConfigError

struct ScriptedPolicy {
    PolicyKind kind = PolicyKind::Stay;
    std::uint64_t seed = 0;
    /// Random-walk agents occasionally broadcast their position.
    bool chatty = true;
};

/// Deterministic in (policy, seed, observation).
ActionIntent scripted_policy(const Observation& obs, const ScriptedPolicy& policy, TaskKind task);

/// Response text a scripted controller logs for an intent; parse_response inverts it.
std::string format_response(const ActionIntent& intent);

}  // namespace swarm
