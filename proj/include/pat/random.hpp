#pragma once

#include <cstdint>
#include <limits>

namespace pat {

/// SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256** seeded through SplitMix64. Only integer arithmetic and the
/// documented 53-bit float mapping are used, so streams are identical on any
/// platform and easy to reproduce from other languages.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on [0, 1): (next >> 11) * 2^-53.
    double uniform() noexcept;
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [lo, hi] (inclusive), via floor(uniform * span).
    int uniform_int(int lo, int hi) noexcept;
    /// Standard normal via Box-Muller (one value per call).
    double normal() noexcept;

private:
    std::uint64_t s_[4];
};

/// Independent stream seed for item `index` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

} // namespace pat
