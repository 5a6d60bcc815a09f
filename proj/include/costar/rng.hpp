#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <utility>

namespace costar {

// std::mt19937_64 output is fixed by the standard but the distributions are
// not, so bounded draws are done here to keep shuffles identical across
// standard libraries.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % bound;
}

/// Fisher-Yates shuffle driven by a seeded mt19937_64.
template <typename T>
void seeded_shuffle(std::span<T> items, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(bounded_draw(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace costar
