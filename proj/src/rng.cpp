#include "swarm/rng.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace swarm {

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    // Reject the tail that would bias the modulo.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
}

int Rng::between(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("Rng::between: empty range");
    const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
    return static_cast<int>(lo + static_cast<std::int64_t>(below(span)));
}

bool Rng::chance(double p) {
    // 53 random mantissa bits -> [0, 1).
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return u < p;
}

std::vector<std::size_t> Rng::sample_indices(std::size_t n, std::size_t count) {
    if (count > n) throw std::invalid_argument("Rng::sample_indices: count exceeds population");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

}  // namespace swarm
