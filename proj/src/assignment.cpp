#include "swarm/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace swarm {

std::int64_t min_cost_assignment(const std::vector<std::vector<std::int64_t>>& cost,
                                 std::vector<int>* assignment) {
    const int n = static_cast<int>(cost.size());
    for (const auto& row : cost) {
        if (static_cast<int>(row.size()) != n) {
            throw std::invalid_argument("min_cost_assignment: cost matrix must be square");
        }
    }
    if (assignment != nullptr) assignment->assign(n, -1);
    if (n == 0) return 0;

    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    // 1-based rows/cols; column 0 is the virtual start.
    std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    std::vector<bool> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            std::int64_t delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const std::int64_t cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::int64_t total = 0;
    for (int j = 1; j <= n; ++j) {
        total += cost[match[j] - 1][j - 1];
        if (assignment != nullptr) (*assignment)[match[j] - 1] = j - 1;
    }
    return total;
}

}  // namespace swarm
