#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

namespace swarm::detail {

/// Dinic's algorithm on a small dense-ish network.
class MaxFlow {
public:
    static constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max() / 4;

    explicit MaxFlow(int n) : adj_(n), level_(n), iter_(n) {}

    int add_edge(int from, int to, std::int64_t cap) {
        const int id = static_cast<int>(edges_.size());
        edges_.push_back({to, cap, 0});
        edges_.push_back({from, 0, 0});
        adj_[from].push_back(id);
        adj_[to].push_back(id + 1);
        return id;
    }

    std::int64_t flow_on(int edge) const { return edges_[edge].flow; }

    std::int64_t solve(int s, int t) {
        std::int64_t total = 0;
        while (bfs(s, t)) {
            std::fill(iter_.begin(), iter_.end(), 0);
            while (std::int64_t f = dfs(s, t, kInfinite)) total += f;
        }
        return total;
    }

private:
    struct Edge {
        int to;
        std::int64_t cap;
        std::int64_t flow;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int id : adj_[v]) {
                const Edge& e = edges_[id];
                if (e.cap - e.flow > 0 && level_[e.to] < 0) {
                    level_[e.to] = level_[v] + 1;
                    q.push(e.to);
                }
            }
        }
        return level_[t] >= 0;
    }

    std::int64_t dfs(int v, int t, std::int64_t pushed) {
        if (v == t) return pushed;
        for (std::size_t& i = iter_[v]; i < adj_[v].size(); ++i) {
            const int id = adj_[v][i];
            Edge& e = edges_[id];
            if (e.cap - e.flow <= 0 || level_[e.to] != level_[v] + 1) continue;
            const std::int64_t got = dfs(e.to, t, std::min(pushed, e.cap - e.flow));
            if (got > 0) {
                e.flow += got;
                edges_[id ^ 1].flow -= got;
                return got;
            }
        }
        return 0;
    }

    std::vector<std::vector<int>> adj_;
    std::vector<Edge> edges_;
    std::vector<int> level_;
    std::vector<std::size_t> iter_;
};

}  // namespace swarm::detail
