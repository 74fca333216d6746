#pragma once

#include <cstdint>

namespace penbsde {

/// Counter-based pseudo random stream.
///
/// Draw n of a stream is a pure function of (seed, n): a SplitMix64 finalizer
/// applied to the counter mixed with the seed. Results are therefore identical
/// across runs and platforms, and a stream can be repositioned with seek().
/// Not thread-safe; give each worker its own stream via substream().
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t position = 0) noexcept
        : seed_(seed), counter_(position) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t position() const noexcept { return counter_; }
    void seek(std::uint64_t position) noexcept { counter_ = position; }

    std::uint64_t nextU64() noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;

    /// Exponential with the given rate (rate > 0).
    double exponential(double rate) noexcept;

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Independent stream derived from this stream's seed and an index.
    RandomStream substream(std::uint64_t index) const noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace penbsde
