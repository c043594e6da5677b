#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>

namespace exitwalk {

/// Identifier recorded in every output that consumed randomness.
inline constexpr const char* kRngAlgorithm = "sm64ctr-v1";

/// Counter-based generator: output i is a SplitMix64-style hash of
/// (key, i). Substreams are derived by hashing labels or indices into
/// the key, so any path/worker stream is reachable without sequencing
/// through the others.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc908ull)) {}

    CounterRng derive(std::string_view label) const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return CounterRng(mix(key_ ^ h), 0);
    }

    CounterRng derive(std::uint64_t index) const {
        return CounterRng(mix(key_ + 0x9e3779b97f4a7c15ull * (index + 1)), 0);
    }

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

    /// Uniform in the open interval (0,1); safe as log() argument and as
    /// an inverse-CDF draw (breakpoint ties have probability zero).
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// One Box-Muller pair of independent standard normals.
    std::pair<double, double> next_gaussian_pair() {
        double u1 = next_unit();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    int next_int(int lo, int hi) {  // inclusive range
        return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    std::uint64_t counter() const { return counter_; }

private:
    CounterRng(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// FNV-1a over a descriptor string; used as a stable instance id.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace exitwalk
