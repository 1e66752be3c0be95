#pragma once

#include <cstdint>

namespace nakamap {

/// SplitMix64 generator. Small state makes it cheap to spin up one
/// independent stream per voxel, keyed by coordinates.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    /// Stream keyed by (seed, a, b); distinct keys give decorrelated streams.
    static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Uniform on (0, 1].
    double uniform_open_zero() noexcept { return 1.0 - uniform(); }

    /// Standard normal via the Marsaglia polar method.
    double normal() noexcept;

    /// Gamma(shape, 1) via Marsaglia-Tsang squeeze/rejection.
    double gamma(double shape) noexcept;

    /// Poisson(mean) by inversion; intended for small means.
    unsigned poisson(double mean) noexcept;

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

} // namespace nakamap
