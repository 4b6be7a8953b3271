#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "swarm/geometry.hpp"

namespace swarm {

/// Everything one round's metrics depend on. All of it is recoverable from
/// the run logs.
struct RoundInputs {
    std::map<int, Coord> before;  // on-map agents at the start of the round
    std::map<int, Coord> after;   // on-map agents after the commit
    std::vector<std::pair<int, Action>> actions;  // acting agents
    std::vector<std::string> messages;            // sent this round, empty ones included
};

struct RoundMetrics {
    double directional_entropy = 0.0;
    double stillness_proportion = 0.0;
    double dominant_action_proportion = 0.0;
    double polarization = 0.0;
    double avg_moving_distance = 0.0;
    double exploration_rate = 0.0;
    double local_structure_count = 0.0;
    double push_events = 0.0;
    double msg_question_prop = 0.0;
    double msg_digit_prop = 0.0;
    double msg_len_mean = 0.0;
    double msg_len_std = 0.0;
    std::optional<double> info_homogeneity;  // needs an embedding backend; never filled here

    friend bool operator==(const RoundMetrics&, const RoundMetrics&) = default;
};

/// Shannon entropy in bits over UP/DOWN/LEFT/RIGHT only; 0 without moves.
double directional_entropy(const std::vector<Action>& actions);

/// Norm of the mean unit vector over move and STAY actions; 0 without any.
double polarization(const std::vector<Action>& actions);

/// Cumulative set of cells any agent has occupied.
class ExplorationTracker {
public:
    std::size_t add(const std::map<int, Coord>& positions);
    std::size_t size() const { return cells_.size(); }

private:
    std::set<Coord> cells_;
};

/// Appends `inputs.after` to the tracker before reading the exploration count.
RoundMetrics round_metrics(const RoundInputs& inputs, ExplorationTracker& exploration);

/// Field-wise mean. Throws std::invalid_argument on an empty list.
RoundMetrics run_summary(const std::vector<RoundMetrics>& rounds);

/// Column names in output order.
std::vector<std::string> metric_names();
std::vector<double> metric_values(const RoundMetrics& m);

/// Header, one row per round, then a `summary` row.
std::string metrics_csv(const std::vector<RoundMetrics>& rounds);

}  // namespace swarm
