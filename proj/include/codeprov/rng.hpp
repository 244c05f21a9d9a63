#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace codeprov::rng {

// Unbiased draw in [0, n) via rejection sampling. std::uniform_int_distribution
// is implementation-defined, so seeded results would differ across standard
// libraries; this keeps shuffles reproducible everywhere.
inline std::uint64_t bounded(std::mt19937_64& engine, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x;
    do {
        x = engine();
    } while (x >= limit);
    return x % n;
}

// Fisher-Yates with the portable draw above; same seed, same permutation,
// on every platform.
template <class T>
void shuffle(std::vector<T>& items, std::mt19937_64& engine) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded(engine, i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

}  // namespace codeprov::rng
