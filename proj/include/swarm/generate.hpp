#pragma once

#include <cstdint>

#include "swarm/grid.hpp"

namespace swarm {

/// Builds the round-0 world for a task. A pure function of its arguments.
///
/// Every layout has a wall ring. Transport leaves a gap as wide as the
/// obstacle on a seeded side and docks the obstacle in it; Foraging adds
/// seeded interior wall segments plus nest and food blocks, resampled until
/// all free cells are connected. Throws ConfigError when the pieces do not fit.
EnvironmentState generate_environment(TaskKind task, std::uint64_t seed, const EnvConfig& config);

}  // namespace swarm
