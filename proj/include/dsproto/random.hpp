#pragma once

#include <cstdint>
#include <random>

namespace dsproto {

using Rng = std::mt19937_64;

// Splits one user seed into independent streams (SplitMix64 finalizer), so
// each component can be seeded and tested in isolation.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    return Rng(derive_seed(seed, stream));
}

// Stream identifiers, one per consumer of the user seed.
namespace stream {
inline constexpr std::uint64_t search = 1;
inline constexpr std::uint64_t generator = 2;
inline constexpr std::uint64_t bench_split = 3;
inline constexpr std::uint64_t bench_recluster = 4;
}  // namespace stream

}  // namespace dsproto
