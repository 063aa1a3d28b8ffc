#pragma once

#include <cstdint>

namespace csma {

// Coin purposes; part of the hash key so streams never overlap.
enum class CoinPurpose : std::uint64_t { pause = 0, keep = 1, arrival = 2 };

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t slot,
                                     std::uint64_t node,
                                     CoinPurpose purpose) noexcept {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ slot);
    h = mix64(h ^ node);
    return mix64(h ^ static_cast<std::uint64_t>(purpose));
}

/// Uniform in [0, 1) from the top 53 bits of the counter hash.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t slot,
                                 std::uint64_t node,
                                 CoinPurpose purpose) noexcept {
    return static_cast<double>(counter_hash(seed, slot, node, purpose) >> 11) *
           0x1.0p-53;
}

} // namespace csma
