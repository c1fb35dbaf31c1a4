// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors

#pragma once

#include <cstdint>
#include <random>

namespace rpnsel {

// splitmix64 step; used to whiten seeds and derive independent streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic sub-stream seed: same (base, stream) always yields the same
// value, distinct streams decorrelate even for adjacent base seeds.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ splitmix64(stream * 0xd6e8feb86659fd93ULL + 1));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

}  // namespace rpnsel
