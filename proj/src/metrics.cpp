#include "swarm/metrics.hpp"

#include <fmt/format.h>

#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "swarm/agent.hpp"

namespace swarm {

double directional_entropy(const std::vector<Action>& actions) {
    std::array<int, 4> counts{};
    int total = 0;
    for (Action a : actions) {
        if (auto d = direction_of(a)) {
            ++counts[index_of(*d)];
            ++total;
        }
    }
    if (total == 0) return 0.0;
    double h = 0.0;
    for (int c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

namespace {

bool coordinated(Action a) { return a != Action::Switch; }

}  // namespace

double polarization(const std::vector<Action>& actions) {
    // Unit vectors in (x, y) screen convention: UP is (0, -1), RIGHT is (1, 0).
    double x = 0.0, y = 0.0;
    int n = 0;
    for (Action a : actions) {
        if (!coordinated(a)) continue;
        ++n;
        switch (a) {
            case Action::Up: y -= 1; break;
            case Action::Down: y += 1; break;
            case Action::Left: x -= 1; break;
            case Action::Right: x += 1; break;
            default: break;
        }
    }
    if (n == 0) return 0.0;
    return std::hypot(x / n, y / n);
}

std::size_t ExplorationTracker::add(const std::map<int, Coord>& positions) {
    for (const auto& [id, c] : positions) cells_.insert(c);
    return cells_.size();
}

RoundMetrics round_metrics(const RoundInputs& in, ExplorationTracker& exploration) {
    RoundMetrics m;
    std::vector<Action> actions;
    for (const auto& [id, a] : in.actions) actions.push_back(a);
    m.directional_entropy = directional_entropy(actions);
    m.polarization = polarization(actions);

    std::array<int, 6> counts{};
    int coord_actors = 0;
    for (Action a : actions) {
        ++counts[static_cast<std::size_t>(a)];
        if (coordinated(a)) ++coord_actors;
    }
    if (!actions.empty()) {
        m.stillness_proportion = static_cast<double>(counts[static_cast<std::size_t>(Action::Stay)]) / actions.size();
    }
    if (coord_actors > 0) {
        int top = 0;
        for (Action a : {Action::Up, Action::Down, Action::Left, Action::Right, Action::Stay}) {
            top = std::max(top, counts[static_cast<std::size_t>(a)]);
        }
        m.dominant_action_proportion = static_cast<double>(top) / coord_actors;
    }

    int both = 0;
    double moved = 0.0;
    for (const auto& [id, c] : in.before) {
        auto it = in.after.find(id);
        if (it == in.after.end()) continue;
        ++both;
        moved += manhattan(c, it->second);
    }
    if (both > 0) m.avg_moving_distance = moved / both;

    m.exploration_rate = static_cast<double>(exploration.add(in.after));

    int structure = 0;
    for (auto a = in.before.begin(); a != in.before.end(); ++a) {
        for (auto b = std::next(a); b != in.before.end(); ++b) {
            if (manhattan(a->second, b->second) != 1) continue;
            auto a2 = in.after.find(a->first);
            auto b2 = in.after.find(b->first);
            if (a2 != in.after.end() && b2 != in.after.end() && manhattan(a2->second, b2->second) == 1) {
                ++structure;
            }
        }
    }
    m.local_structure_count = structure;

    std::map<Coord, int> occupant;
    for (const auto& [id, c] : in.before) occupant[c] = id;
    int pushes = 0;
    for (const auto& [id, action] : in.actions) {
        const auto dir = direction_of(action);
        if (!dir) continue;
        const Coord d = offset(*dir);
        auto from = in.before.find(id);
        auto to = in.after.find(id);
        if (from == in.before.end() || to == in.after.end() || to->second != from->second + d) continue;
        auto pushed = occupant.find(from->second + d);
        if (pushed == occupant.end()) continue;
        auto pushed_to = in.after.find(pushed->second);
        if (pushed_to != in.after.end() && pushed_to->second == pushed->first + d) ++pushes;
    }
    m.push_events = pushes;

    std::vector<double> lengths;
    int questions = 0;
    std::size_t digits = 0, chars = 0;
    for (const auto& msg : in.messages) {
        if (msg.empty()) continue;
        lengths.push_back(static_cast<double>(code_points(msg)));
        if (msg.find('?') != std::string::npos) ++questions;
        chars += code_points(msg);
        for (unsigned char ch : msg) digits += std::isdigit(ch) ? 1 : 0;
    }
    if (!lengths.empty()) {
        const double n = static_cast<double>(lengths.size());
        m.msg_question_prop = questions / n;
        m.msg_digit_prop = static_cast<double>(digits) / static_cast<double>(chars);
        double sum = 0.0;
        for (double l : lengths) sum += l;
        m.msg_len_mean = sum / n;
        double var = 0.0;
        for (double l : lengths) var += (l - m.msg_len_mean) * (l - m.msg_len_mean);
        m.msg_len_std = std::sqrt(var / n);
    }
    return m;
}

std::vector<std::string> metric_names() {
    return {"directional_entropy",   "stillness_proportion", "dominant_action_proportion",
            "polarization",          "avg_moving_distance",  "exploration_rate",
            "local_structure_count", "push_events",          "msg_question_prop",
            "msg_digit_prop",        "msg_len_mean",         "msg_len_std"};
}

std::vector<double> metric_values(const RoundMetrics& m) {
    return {m.directional_entropy,   m.stillness_proportion, m.dominant_action_proportion,
            m.polarization,          m.avg_moving_distance,  m.exploration_rate,
            m.local_structure_count, m.push_events,          m.msg_question_prop,
            m.msg_digit_prop,        m.msg_len_mean,         m.msg_len_std};
}

RoundMetrics run_summary(const std::vector<RoundMetrics>& rounds) {
    if (rounds.empty()) throw std::invalid_argument("run_summary: no rounds");
    std::vector<double> sums(metric_names().size(), 0.0);
    for (const auto& r : rounds) {
        const auto v = metric_values(r);
        for (std::size_t i = 0; i < v.size(); ++i) sums[i] += v[i];
    }
    for (double& s : sums) s /= static_cast<double>(rounds.size());
    RoundMetrics m;
    double* fields[] = {&m.directional_entropy,   &m.stillness_proportion, &m.dominant_action_proportion,
                        &m.polarization,          &m.avg_moving_distance,  &m.exploration_rate,
                        &m.local_structure_count, &m.push_events,          &m.msg_question_prop,
                        &m.msg_digit_prop,        &m.msg_len_mean,         &m.msg_len_std};
    for (std::size_t i = 0; i < sums.size(); ++i) *fields[i] = sums[i];
    return m;
}

std::string metrics_csv(const std::vector<RoundMetrics>& rounds) {
    std::string out = "round";
    for (const auto& n : metric_names()) out += "," + n;
    out += '\n';
    auto row = [&](const std::string& label, const RoundMetrics& m) {
        out += label;
        for (double v : metric_values(m)) out += fmt::format(",{}", v);
        out += '\n';
    };
    for (std::size_t i = 0; i < rounds.size(); ++i) row(std::to_string(i), rounds[i]);
    if (!rounds.empty()) row("summary", run_summary(rounds));
    return out;
}

}  // namespace swarm
