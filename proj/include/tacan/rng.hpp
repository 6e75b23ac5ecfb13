#pragma once

#include <cstdint>
#include <random>

namespace tacan {

/// Seeded random stream with a platform-independent output sequence.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// Uniform and normal variates are derived here rather than through the
/// <random> distributions, which are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Seed for an independent sub-stream (task `index` of a sweep seeded
    /// with `seed`).
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

    /// Uniform in (0, 1).
    double uniform_open();

    /// Standard normal (Box-Muller; the second variate is cached).
    double normal();

    /// Laplace with zero mean and unit variance.
    double laplace();

    bool bit() { return (engine_() >> 63) != 0; }

    /// Uniform integer in [0, bound). bound > 0.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tacan
