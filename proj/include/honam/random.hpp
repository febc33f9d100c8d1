#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace honam {

/// Engine used for every seeded draw in the library.
using Rng = std::mt19937_64;

inline std::vector<double> normal_draws(Rng& rng, std::size_t n, double mean, double stddev) {
    std::normal_distribution<double> dist(mean, stddev);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

inline std::vector<double> uniform_draws(Rng& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

/// 64-bit FNV-1a; used for schema fingerprints, file checksums and manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace honam
