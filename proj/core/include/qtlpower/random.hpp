#pragma once

#include <cstdint>
#include <random>

namespace qtlpower {

/// 64-bit finalizer from SplitMix64. Bijective on uint64.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives the stream seed for one replicate of one grid cell.
///
/// The result depends only on the three inputs, so any partition of the
/// replicates across workers reproduces the same streams.
std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t cell_index,
                             std::uint64_t replicate_index) noexcept;

/// Random stream owned by a single worker.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard.
/// Uniform and normal variates are derived here rather than through
/// <random> distributions, whose algorithms are implementation-defined, so a
/// seed reproduces the same draws on every standard library.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Standard normal (Marsaglia polar method).
    double standard_normal() noexcept;

    double normal(double mean, double sd) noexcept { return mean + sd * standard_normal(); }

    bool bernoulli(double prob) noexcept { return uniform() < prob; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qtlpower
