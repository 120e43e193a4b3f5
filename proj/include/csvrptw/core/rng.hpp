#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace csvrptw {

// splitmix64: cheap, well-mixed stream for deriving independent sub-seeds
// from one master seed. Every stochastic component takes an explicit seed
// derived through here, so experiment cells replay bit-identically no
// matter how the worker pool schedules them.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Sub-seed for a named purpose ("dataset", "csaa", ...) plus an index.
inline std::uint64_t derive_seed(std::uint64_t master, const std::string& tag,
                                 std::uint64_t index = 0) {
    return splitmix64(master ^ splitmix64(fnv1a(tag) + 0x9e3779b97f4a7c15ULL * (index + 1)));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace csvrptw
