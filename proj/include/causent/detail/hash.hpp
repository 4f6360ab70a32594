#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

namespace causent::detail {

// splitmix64 finalizer; used both as a seed mixer and a cheap hash combiner.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

// FNV-1a over the raw bytes of a double vector. Used to derive per-series
// RNG streams from column content so that results do not depend on the
// position of a column inside the dataset.
inline std::uint64_t hash_doubles(const std::vector<double>& v) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double d : v) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    }
    return hash_combine(h, v.size());
}

}  // namespace causent::detail
