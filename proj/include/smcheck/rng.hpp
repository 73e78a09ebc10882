#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace smcheck {

/// Deterministic 64-bit pseudo-random source.
///
/// The generator is xoshiro256** (Blackman & Vigna, 2018):
///
///     result = rotl(s1 * 5, 7) * 9
///     t = s1 << 17
///     s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
///
/// The 256-bit state is expanded from the 64-bit seed with SplitMix64
/// (increment 0x9e3779b97f4a7c15, multipliers 0xbf58476d1ce4e5b9 and
/// 0x94d049bb133111eb, shifts 30/27/31), so any seed gives a non-zero state.
///
/// `fork(i)` derives the child seed splitmix64(seed ^ splitmix64(i)) from the
/// original seed only, not from the current stream position, so forked
/// sources are reproducible regardless of how many draws were taken.
///
/// A source is single-owner. Parallel runs each get their own fork.
class RandomSource {
public:
    using result_type = std::uint64_t;

    explicit RandomSource(std::uint64_t seed = 0);

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    /// Next raw 64-bit output.
    std::uint64_t next() noexcept;

    /// Uniform integer in [0, n-1] by rejection sampling (no modulo bias).
    /// Throws std::invalid_argument for n == 0.
    std::uint64_t uniform_int(std::uint64_t n);

    /// Uniform real in [0, 1 - 2^-53], 53 bits of resolution.
    double uniform01() noexcept;

    /// True with probability p. Throws std::invalid_argument unless 0 <= p <= 1.
    bool bernoulli(double p);

    /// Negative-exponential sample with the given mean, -mean * ln(1 - u).
    /// Throws std::invalid_argument unless mean > 0.
    double exponential(double mean);

    /// Inverse-CDF transform used by exponential(); u is clamped to [0, 1 - 2^-53].
    static double exponential_from_uniform(double mean, double u);

    [[nodiscard]] RandomSource fork(std::uint64_t index) const;

    // UniformRandomBitGenerator
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return next(); }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
};

/// One SplitMix64 output for the given input (pure function).
std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace smcheck
