#pragma once

#include <cstdint>
#include <random>

namespace d2d {

using Rng = std::mt19937_64;

//! SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/*!
 * Independent random stream keyed by (seed, a, b).
 *
 * The stream is a pure function of its key, so trial workers can be scheduled
 * in any order and still reproduce the same draws.
 */
Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace d2d
