#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace newsrace {

// Every stochastic operation takes an explicit stream; nothing draws from a
// global generator.
using Stream = std::mt19937_64;

// Uniform double on the open interval (0, 1), built from the top 53 bits.
inline double uniform01(Stream& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// splitmix64 finalizer, used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_label(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Seed for the replication keyed by (master, kind, n, rep). Independent of the
// order in which replications are executed.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::string_view kind,
                                       std::uint64_t n, std::uint64_t rep) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ hash_label(kind));
    h = mix64(h ^ n);
    h = mix64(h ^ (rep * 0xd6e8feb86659fd93ULL));
    return h;
}

inline Stream make_stream(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Stream(seq);
}

}  // namespace newsrace
