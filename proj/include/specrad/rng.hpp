#pragma once

// Random streams. The engine is std::mt19937_64, whose output sequence is
// fixed by the standard; the conversions below are written out instead of
// using <random> distributions so that draws are identical across standard
// library implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace specrad {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream seed for trial `index` of an experiment seeded by `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1].
inline double uniform01_open_left(Engine& g) { return 1.0 - uniform01(g); }

/// +1 or -1 from the top bit of one engine word.
inline double random_sign(Engine& g) { return (g() >> 63) ? -1.0 : 1.0; }

/// Box-Muller pair of independent standard normals.
struct NormalPair {
    double first;
    double second;
};

inline NormalPair standard_normal_pair(Engine& g) {
    const double u1 = uniform01_open_left(g);
    const double u2 = uniform01(g);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

/// Uniform integer in [0, bound) by rejection (no modulo bias).
inline std::uint64_t uniform_below(Engine& g, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = g();
    } while (x >= limit);
    return x % bound;
}

}  // namespace specrad
