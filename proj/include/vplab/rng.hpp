// rng.hpp
// Philox4x32-10 counter-based generator plus the handful of distributions the
// simulators need. Distributions are implemented here rather than taken from
// <random> so that draws are identical across standard libraries.

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace vplab {

class Philox {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    /// `stream` selects an independent sub-sequence for the same seed.
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1), never 0 or 1.
    double uniform_open();
    /// Standard normal (Box-Muller, pairs cached).
    double normal();
    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    std::uint64_t seed() const { return seed_; }

    /// The raw bijection, exposed for known-answer tests.
    static Block philox4x32_10(Block ctr, Key key);

private:
    void refill();

    std::uint64_t seed_;
    Key key_;
    Block ctr_{};
    Block buf_{};
    int used_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace vplab
