#pragma once

#include <cstdint>
#include <vector>

namespace swarm {

/// Minimum-cost perfect matching on a square integer cost matrix (Hungarian
/// method with potentials, O(n^3)). `assignment[r]` receives the column
/// matched to row r. Throws std::invalid_argument if the matrix is not square.
std::int64_t min_cost_assignment(const std::vector<std::vector<std::int64_t>>& cost,
                                 std::vector<int>* assignment = nullptr);

}  // namespace swarm
