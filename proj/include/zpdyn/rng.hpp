#pragma once

#include <cstdint>

// splitmix64, hand-rolled Fisher-Yates. Corpora and builders must be
// bit-identical for a given seed on every platform, which rules out
// std::uniform_int_distribution and std::shuffle (both implementation
// defined). The modulo bias of below() is irrelevant here: we need
// determinism, not perfect uniformity, and n is tiny compared to 2^64.

namespace zpdyn {

struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
};

} // namespace zpdyn
