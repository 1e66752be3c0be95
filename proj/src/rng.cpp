#include "nakamap/rng.hpp"

#include <cmath>

namespace nakamap {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept
{
    std::uint64_t key = mix64(seed + kGolden);
    key = mix64(key ^ (a * kGolden + 0x632BE59BD9B4E019ULL));
    key = mix64(key ^ (b * kGolden + 0x8CB92BA72F3D8DD7ULL));
    return Rng(key);
}

std::uint64_t Rng::next_u64() noexcept
{
    state_ += kGolden;
    return mix64(state_);
}

double Rng::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

double Rng::gamma(double shape) noexcept
{
    if (shape < 1.0) {
        // Boost to shape + 1 and rescale by U^(1/shape).
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform_open_zero(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open_zero();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2)
            return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

unsigned Rng::poisson(double mean) noexcept
{
    const double limit = std::exp(-mean);
    unsigned count = 0;
    double product = uniform_open_zero();
    while (product > limit) {
        ++count;
        product *= uniform_open_zero();
    }
    return count;
}

} // namespace nakamap
