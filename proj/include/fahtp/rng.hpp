#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace fahtp {

/// Counter-based generator: output k of stream `key` is splitmix64_mix(key + k * golden_gamma).
/// Identical to SplitMix64 seeded with `key`, so any draw can be recomputed from (key, k).
///
/// Streams are split by hashing the purpose path into the key:
///   key = fold(seed, ids...)  with  fold(h, id) = splitmix64_mix(h ^ splitmix64_mix(id + golden_gamma))
/// The simulation harness uses the path (replication, sweep point, purpose).
class CounterRng {
public:
    static constexpr const char* name = "splitmix64-counter";
    static constexpr int version = 1;
    static constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) noexcept
    {
        std::uint64_t h = mix(seed);
        for (std::uint64_t id : ids) h = mix(h ^ mix(id + golden_gamma));
        return h;
    }

    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) noexcept
        : key_(derive(seed, ids))
    {}

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept
    {
        ++counter_;
        return mix(key_ + counter_ * golden_gamma);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, bound), bound > 0, by rejection (no modulo bias).
    std::uint64_t uniform_index(std::uint64_t bound) noexcept
    {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool coin() noexcept { return (next_u64() >> 63) != 0; }

    /// Standard normal by Box-Muller; both variates of a pair are used.
    double normal() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01(); // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace fahtp
