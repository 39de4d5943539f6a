#pragma once

#include <cstdint>

namespace entire_dyn {

// Stateless counter-based generator: every draw is a pure function of
// (seed, index, lane), so sample i is the same no matter which worker
// produces it.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t lane)
{
    const std::uint64_t h = splitmix64(splitmix64(seed ^ splitmix64(index)) + lane * 0xd1b54a32d192ed03ULL);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace entire_dyn
