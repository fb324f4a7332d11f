#pragma once

#include <cstdint>
#include <initializer_list>

namespace budgetwise {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based derivation of an independent stream seed from a master seed
// and a list of keys (stream tag, iteration, draw index, ...).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = mix64(master);
    for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

namespace stream {
inline constexpr std::uint64_t sampler = 1;
inline constexpr std::uint64_t evaluation = 2;
inline constexpr std::uint64_t gp = 3;
inline constexpr std::uint64_t baseline = 4;
} // namespace stream

} // namespace budgetwise
