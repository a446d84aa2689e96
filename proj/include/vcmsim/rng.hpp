#pragma once

// =============================================================================
// Counter-based deterministic random streams
// =============================================================================
// Every stochastic entity (one per device, plus auxiliary streams for
// initialization and pulse scheduling) owns a private stream identified by
// (master_seed, stream_id). A draw is a pure function of (key, counter), so
// results are bit-identical regardless of thread scheduling or evaluation
// order, and a stream is checkpointed by storing nothing but its counter.
//
// The generator applies the SplitMix64 output permutation to a Weyl sequence
// seeded from the stream key — the classic counter-mode construction. It is
// not cryptographic; it is statistically solid for simulation use and costs
// a handful of arithmetic ops per draw.
// =============================================================================

#include <cmath>
#include <cstdint>

#include "vcmsim/constants.hpp"

namespace vcmsim {

namespace detail {

/// SplitMix64 finalizer: full-avalanche 64-bit permutation.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Derive the 64-bit key of stream `stream_id` under `master_seed`.
/// Two mixing rounds decorrelate even adjacent (seed, id) pairs.
inline constexpr std::uint64_t stream_key(std::uint64_t master_seed,
                                          std::uint64_t stream_id) {
    return detail::mix64(detail::mix64(master_seed) ^
                         detail::mix64(stream_id ^ 0xa0761d6478bd642fULL));
}

/// A position in one deterministic stream. Copyable; copying forks the
/// sequence (both copies replay the same tail), so mutate exactly one owner.
class StreamRng {
public:
    StreamRng() = default;
    StreamRng(std::uint64_t master_seed, std::uint64_t stream_id,
              std::uint64_t counter = 0)
        : key_(stream_key(master_seed, stream_id)), counter_(counter) {}

    /// Next raw 64-bit draw; advances the counter by one.
    std::uint64_t next_u64() {
        return detail::mix64(key_ ^ (++counter_ * 0x9e3779b97f4a7c15ULL));
    }

    /// Uniform double in [0, 1), 53-bit resolution. One counter tick.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [a, b). One counter tick.
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Uniform double in (-1, 1]. One counter tick.
    double uniform_sym() {
        return 1.0 - 2.0 * uniform01();
    }

    /// Standard normal via Box-Muller. Always consumes exactly two counter
    /// ticks and keeps no cached spare, so the stream state remains the bare
    /// counter.
    double normal() {
        // u1 in (0, 1] so the log is finite.
        const double u1 =
            static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * constants::pi * u2);
    }

    /// Bernoulli(p). One counter tick.
    bool bernoulli(double p) { return uniform01() < p; }

    [[nodiscard]] std::uint64_t counter() const { return counter_; }
    void set_counter(std::uint64_t c) { counter_ = c; }
    [[nodiscard]] std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace vcmsim
