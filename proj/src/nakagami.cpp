#include "nakamap/nakagami.hpp"

#include "nakamap/error.hpp"
#include "nakamap/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace nakamap {

namespace {

constexpr double kMaxZeroFraction = 0.10;
constexpr double kDegenerateLogSpread = 1e-14;
constexpr double kNewtonTolerance = 1e-10;
constexpr int kNewtonMaxIterations = 50;
constexpr double kBracketLo = 1e-3;
constexpr double kBracketHi = 1e3;

void require_nonnegative(double x)
{
    if (std::isnan(x) || x < 0.0)
        throw Error(ErrorCode::NegativeArgument, "Nakagami support is x >= 0, got " + std::to_string(x));
}

double clamp_mu(double mu)
{
    return std::clamp(mu, kMuMin, kMuMax);
}

// ln(mu) - psi(mu) - target; strictly decreasing in mu.
double shape_equation(double mu, double target)
{
    return std::log(mu) - special::digamma(mu) - target;
}

double solve_shape_bisection(double target, int& iterations)
{
    double lo = kBracketLo;
    double hi = kBracketHi;
    if (shape_equation(lo, target) <= 0.0)
        return lo;
    if (shape_equation(hi, target) >= 0.0)
        return hi;
    while (hi - lo > 1e-12 * lo && iterations < 500) {
        const double mid = 0.5 * (lo + hi);
        if (shape_equation(mid, target) > 0.0)
            lo = mid;
        else
            hi = mid;
        ++iterations;
    }
    return 0.5 * (lo + hi);
}

double solve_shape(double target, int& iterations)
{
    double mu = (3.0 - target + std::sqrt((target - 3.0) * (target - 3.0) + 24.0 * target)) / (12.0 * target);
    iterations = 0;
    while (iterations < kNewtonMaxIterations) {
        const double f = shape_equation(mu, target);
        const double slope = 1.0 / mu - special::trigamma(mu);
        const double next = mu - f / slope;
        ++iterations;
        if (!(next > 0.0 && next < kBracketHi) || !std::isfinite(next))
            return solve_shape_bisection(target, iterations);
        const double change = std::fabs((next - mu) / mu);
        mu = next;
        if (change < kNewtonTolerance)
            return mu;
    }
    return solve_shape_bisection(target, iterations);
}

} // namespace

void NakagamiParams::validate() const
{
    if (!(mu > 0.0) || !std::isfinite(mu) || !(omega > 0.0) || !std::isfinite(omega))
        throw Error(ErrorCode::InvalidParams,
                    "Nakagami parameters need mu > 0 and omega > 0, got mu=" + std::to_string(mu) +
                        " omega=" + std::to_string(omega));
}

SampleSet::SampleSet(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty())
        throw Error(ErrorCode::TooFewSamples, "sample set is empty");
    for (double v : values_) {
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonFiniteValue, "sample set contains a non-finite value");
        if (v < 0.0)
            throw Error(ErrorCode::NegativeValue, "envelope samples must be nonnegative");
    }
}

SampleSet SampleSet::scaled(double factor) const
{
    std::vector<double> out(values_.begin(), values_.end());
    for (double& v : out)
        v *= factor;
    return SampleSet(std::move(out));
}

double log_pdf(const NakagamiParams& p, double x)
{
    p.validate();
    require_nonnegative(x);
    const double rate = p.mu / p.omega;
    if (x == 0.0) {
        if (p.mu == 0.5)
            return std::log(2.0) + 0.5 * std::log(rate) - special::lgamma(0.5);
        return p.mu < 0.5 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    }
    return std::numbers::ln2 + p.mu * std::log(rate) - special::lgamma(p.mu) + (2.0 * p.mu - 1.0) * std::log(x) -
           rate * x * x;
}

double pdf(const NakagamiParams& p, double x)
{
    p.validate();
    require_nonnegative(x);
    const double rate = p.mu / p.omega;
    const double exponent = rate * x * x;
    // Direct evaluation is only safe away from overflow/underflow of the
    // individual factors.
    const bool moderate = p.mu <= 50.0 && exponent < 500.0 && x > 1e-100 && x < 1e100 && rate > 1e-100 &&
                          rate < 1e100;
    if (!moderate)
        return std::exp(log_pdf(p, x));
    const double gamma_mu = std::exp(special::lgamma(p.mu));
    return 2.0 * std::pow(rate, p.mu) * std::pow(x, 2.0 * p.mu - 1.0) * std::exp(-exponent) / gamma_mu;
}

double cdf(const NakagamiParams& p, double x)
{
    p.validate();
    require_nonnegative(x);
    if (x == 0.0)
        return 0.0;
    return special::gamma_p(p.mu, p.mu * x * x / p.omega);
}

double log_likelihood(const NakagamiParams& p, const SampleSet& s)
{
    double total = 0.0;
    for (double x : s.values())
        total += log_pdf(p, x);
    return total;
}

double draw(const NakagamiParams& p, Rng& rng)
{
    return std::sqrt(rng.gamma(p.mu) * (p.omega / p.mu));
}

SampleSet sample(const NakagamiParams& p, std::size_t n, std::uint64_t seed)
{
    p.validate();
    if (n == 0)
        throw Error(ErrorCode::TooFewSamples, "sample count must be at least 1");
    Rng rng(seed);
    std::vector<double> values(n);
    for (double& v : values)
        v = draw(p, rng);
    return SampleSet(std::move(values));
}

NakagamiParams estimate_moments(const SampleSet& s)
{
    const auto values = s.values();
    if (values.size() < 2)
        throw Error(ErrorCode::TooFewSamples, "moment estimation needs at least 2 samples");
    const double n = static_cast<double>(values.size());
    double sum_sq = 0.0;
    for (double x : values)
        sum_sq += x * x;
    const double mean_sq = sum_sq / n;
    double sum_dev = 0.0;
    for (double x : values) {
        const double d = x * x - mean_sq;
        sum_dev += d * d;
    }
    const double var_sq = sum_dev / n;
    if (mean_sq == 0.0 || var_sq == 0.0)
        throw Error(ErrorCode::DegenerateSample, "zero variance of squared samples");
    return {clamp_mu(mean_sq * mean_sq / var_sq), mean_sq};
}

MleResult estimate_mle(const SampleSet& s)
{
    const auto values = s.values();
    if (values.size() < 2)
        throw Error(ErrorCode::TooFewSamples, "maximum likelihood needs at least 2 samples");

    double sum_sq = 0.0;
    double sum_sq_pos = 0.0;
    double sum_log_sq = 0.0;
    std::size_t positive = 0;
    for (double x : values) {
        const double sq = x * x;
        sum_sq += sq;
        if (x > 0.0) {
            sum_sq_pos += sq;
            sum_log_sq += std::log(sq);
            ++positive;
        }
    }
    const std::size_t zeros = values.size() - positive;
    if (positive == 0)
        throw Error(ErrorCode::ContainsZeroOnly, "all samples are zero");
    if (static_cast<double>(zeros) > kMaxZeroFraction * static_cast<double>(values.size()))
        throw Error(ErrorCode::ExcessiveZeros,
                    std::to_string(zeros) + " of " + std::to_string(values.size()) + " samples are zero");

    const double n_pos = static_cast<double>(positive);
    const double log_spread = std::log(sum_sq_pos / n_pos) - sum_log_sq / n_pos;
    if (!(log_spread > kDegenerateLogSpread))
        throw Error(ErrorCode::DegenerateSample, "positive samples are all equal");

    MleResult result;
    result.zero_count = zeros;
    result.params.omega = sum_sq / static_cast<double>(values.size());
    result.params.mu = clamp_mu(solve_shape(log_spread, result.iterations));
    return result;
}

FitQuality fit_quality(const NakagamiParams& p, const SampleSet& s)
{
    p.validate();
    if (s.size() < 2)
        throw Error(ErrorCode::TooFewSamples, "goodness of fit needs at least 2 samples");
    std::vector<double> sorted(s.values().begin(), s.values().end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double sum = 0.0;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const double empirical = (static_cast<double>(i) + 0.5) / n;
        const double d = cdf(p, sorted[i]) - empirical;
        sum += d * d;
    }
    return {std::sqrt(sum / n), sorted.size()};
}

} // namespace nakamap
