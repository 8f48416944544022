#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace flrwn {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a, 64 bit. Stable across platforms, used for stream names and config hashes.
constexpr std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed of the named stream `name` at replication `index` under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view name,
                                    std::uint64_t index = 0) {
    return mix64(mix64(master ^ fnv1a(name)) + mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
    return Rng(derive_seed(master, name, index));
}

}  // namespace flrwn
