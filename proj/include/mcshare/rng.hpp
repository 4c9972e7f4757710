#pragma once

// Counter-based substreams: realization i of an experiment always draws from
// the engine seeded with mix(seed, domain, i), independent of worker count.

#include <cstdint>
#include <random>

namespace mcshare {

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Separates the random streams of estimators that must stay independent.
enum class StreamDomain : std::uint64_t {
    network = 1,
    hybrid = 2,
    rician = 3,
    ppp = 4,
};

inline constexpr std::uint64_t substream_seed(std::uint64_t seed, StreamDomain domain, std::uint64_t index)
{
    return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(domain))) + index);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, StreamDomain domain, std::uint64_t index)
{
    return Engine(substream_seed(seed, domain, index));
}

} // namespace mcshare
