#pragma once

// Counter-mode pseudo-randomness: every word is a pure function of
// (seed, stream, counter), so generation order and thread count never
// change any output.

#include "cachesim/bitblock.hpp"

#include <cstdint>

namespace cachesim {

inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t stream_word(uint64_t seed, uint64_t stream, uint64_t counter) {
    return mix64(counter + mix64(stream + mix64(seed)));
}

inline BitBlock random_bits(uint64_t seed, uint64_t stream, size_t nbits) {
    BitBlock out(nbits);
    for (size_t base = 0; base < nbits; base += 64) {
        uint64_t word = stream_word(seed, stream, base / 64);
        size_t chunk = nbits - base < 64 ? nbits - base : 64;
        for (size_t i = 0; i < chunk; ++i) out.set(base + i, (word >> i) & 1);
    }
    return out;
}

// Uniform double in [0, 1) from one counter position.
inline double uniform01(uint64_t seed, uint64_t stream, uint64_t counter) {
    return static_cast<double>(stream_word(seed, stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace cachesim
