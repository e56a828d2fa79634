#pragma once

#include <cstdint>

namespace cimx {

// SplitMix64 step (Steele et al.). Used both as a lightweight engine and to
// derive independent substream seeds from one experiment seed.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// UniformRandomBitGenerator wrapper so <random> distributions work on top.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }
    result_type operator()() { return splitmix64_next(state_); }

private:
    std::uint64_t state_;
};

// Deterministic substream derivation: children of one seed are decorrelated
// by mixing the tag through two SplitMix64 rounds. Generators seed one
// substream per column, which makes column order (and hence OpenMP
// scheduling) irrelevant to the output.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed ^ (0x6a09e667f3bcc909ull + tag);
    splitmix64_next(s);
    return splitmix64_next(s) ^ tag;
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return substream(substream(seed, a), b);
}

}  // namespace cimx
