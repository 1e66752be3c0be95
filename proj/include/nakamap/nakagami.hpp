#pragma once

#include "nakamap/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nakamap {

/// Shape estimates are clamped to this range.
inline constexpr double kMuMin = 0.02;
inline constexpr double kMuMax = 100.0;

/// Nakagami shape (mu, dimensionless) and scale (omega, envelope-squared units).
struct NakagamiParams {
    double mu = 1.0;
    double omega = 1.0;

    /// Throws InvalidParams unless both are finite and positive.
    void validate() const;

    friend bool operator==(const NakagamiParams&, const NakagamiParams&) = default;
};

/// Envelope samples: finite, nonnegative, at least one.
class SampleSet {
public:
    explicit SampleSet(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    SampleSet scaled(double factor) const;

private:
    std::vector<double> values_;
};

struct FitQuality {
    double rmse = 0.0;
    std::size_t n = 0;
};

struct MleResult {
    NakagamiParams params;
    int iterations = 0;
    /// Zero-valued samples left out of the log moment.
    std::size_t zero_count = 0;
};

double pdf(const NakagamiParams& p, double x);
double log_pdf(const NakagamiParams& p, double x);

/// P(mu, mu x^2 / omega): x^2 is gamma distributed with shape mu, scale omega/mu.
double cdf(const NakagamiParams& p, double x);

double log_likelihood(const NakagamiParams& p, const SampleSet& s);

/// One draw using the caller's stream.
double draw(const NakagamiParams& p, Rng& rng);

/// n draws from a stream seeded by `seed`.
SampleSet sample(const NakagamiParams& p, std::size_t n, std::uint64_t seed);

/// Inverse normalized variance: omega = E[x^2], mu = E[x^2]^2 / Var[x^2]
/// with the population variance.
NakagamiParams estimate_moments(const SampleSet& s);

/// Maximum likelihood fit.
///
/// omega is the second sample moment. mu solves ln(mu) - psi(mu) = s*, where
/// s* = ln(mean x^2) - mean(ln x^2) over the strictly positive samples, by
/// Newton iteration from the Minka starting point. Should an iterate leave
/// (0, 1000) the solve falls back to bisection on [1e-3, 1e3]. Windows with
/// more than 10% zeros are rejected (ExcessiveZeros).
MleResult estimate_mle(const SampleSet& s);

/// Root-mean-square distance between the model CDF and the empirical CDF
/// (plotting positions (i - 0.5)/n) over the order statistics 2..n.
FitQuality fit_quality(const NakagamiParams& p, const SampleSet& s);

} // namespace nakamap
