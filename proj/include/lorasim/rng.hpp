#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lorasim {

using Engine = std::mt19937_64;

// SplitMix64 finalizer; decorrelates neighbouring seeds before they reach the engine.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream seed for a (master seed, key...) tuple. Independent of evaluation order.
template <typename... Keys>
constexpr std::uint64_t derive_seed(std::uint64_t master, Keys... keys) noexcept {
    std::uint64_t s = mix64(master);
    ((s = mix64(s ^ static_cast<std::uint64_t>(keys))), ...);
    return s;
}

/// Stable 64-bit FNV-1a, used for string keys (household ids) and file checksums.
constexpr std::uint64_t fnv1a(std::string_view bytes,
                              std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline Engine make_engine(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Engine(seq);
}

}  // namespace lorasim
