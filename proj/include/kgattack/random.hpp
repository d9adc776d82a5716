#pragma once

// Seedable sampling helpers. std::mt19937_64 output is fully specified by the
// standard; the draws below avoid std::uniform_*_distribution and std::shuffle,
// whose results are implementation-defined, so identical seeds give identical
// samples on every toolchain.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kgattack {

using Rng = std::mt19937_64;

inline double uniform_double01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased draw from [0, n).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("uniform_below: n must be positive");
    }
    const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
    std::uint64_t x;
    do {
        x = rng();
    } while (x < threshold);
    return x % n;
}

inline bool coin_flip(Rng& rng) {
    return (rng() >> 63) != 0;
}

// k distinct indices from [0, n), uniform without replacement, in draw order.
// Sparse Fisher-Yates: O(k) memory regardless of n.
inline std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t k,
                                                             Rng& rng) {
    if (k > n) {
        throw std::invalid_argument("sample_without_replacement: k exceeds n");
    }
    std::unordered_map<std::uint64_t, std::uint64_t> moved;
    std::vector<std::uint64_t> out;
    out.reserve(k);
    for (std::uint64_t i = 0; i < k; ++i) {
        const std::uint64_t j = i + uniform_below(rng, n - i);
        auto it_j = moved.find(j);
        const std::uint64_t value_j = (it_j == moved.end()) ? j : it_j->second;
        auto it_i = moved.find(i);
        const std::uint64_t value_i = (it_i == moved.end()) ? i : it_i->second;
        out.push_back(value_j);
        moved[j] = value_i;
    }
    return out;
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// Derive a stream seed from a base seed and an index (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace kgattack
