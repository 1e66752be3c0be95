#include "nakamap/special.hpp"

#include "nakamap/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace nakamap::special {

namespace {

// Asymptotic expansions are used at or above this point; smaller arguments
// are shifted up with the recurrence first.
constexpr double kAsymptoticDigamma = 10.0;
constexpr double kAsymptoticLgamma = 10.0;

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 10000;

void require_positive(double z, const char* fn)
{
    if (!(z > 0.0) || !std::isfinite(z))
        throw Error(ErrorCode::NonPositiveArgument, std::string(fn) + " requires z > 0, got " + std::to_string(z));
}

double lgamma_stirling(double z)
{
    const double inv = 1.0 / z;
    const double inv2 = inv * inv;
    // Bernoulli-number series B_{2k} / (2k (2k-1) z^{2k-1}) through z^-13.
    const double series =
        inv * (1.0 / 12.0 +
               inv2 * (-1.0 / 360.0 +
                       inv2 * (1.0 / 1260.0 +
                               inv2 * (-1.0 / 1680.0 +
                                       inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

// Series for P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < kMaxIterations; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x); used for x >= a + 1.
double gamma_q_fraction(double a, double x)
{
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps)
            break;
    }
    return std::exp(-x + a * std::log(x) - lgamma(a)) * h;
}

void check_incomplete_args(double a, double x)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw Error(ErrorCode::NonPositiveArgument, "incomplete gamma requires a > 0");
    if (std::isnan(x) || x < 0.0)
        throw Error(ErrorCode::NegativeArgument, "incomplete gamma requires x >= 0");
}

} // namespace

double lgamma(double z)
{
    require_positive(z, "lgamma");
    if (z >= kAsymptoticLgamma)
        return lgamma_stirling(z);
    double product = 1.0;
    while (z < kAsymptoticLgamma) {
        product *= z;
        z += 1.0;
    }
    return lgamma_stirling(z) - std::log(product);
}

double digamma(double z)
{
    require_positive(z, "digamma");
    double shift = 0.0;
    while (z < kAsymptoticDigamma) {
        shift += 1.0 / z;
        z += 1.0;
    }
    const double inv = 1.0 / z;
    const double inv2 = inv * inv;
    const double series =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 -
                                        inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
    return std::log(z) - 0.5 * inv - series - shift;
}

double trigamma(double z)
{
    require_positive(z, "trigamma");
    double shift = 0.0;
    while (z < kAsymptoticDigamma) {
        shift += 1.0 / (z * z);
        z += 1.0;
    }
    const double inv = 1.0 / z;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 + inv * (0.5 + inv * (1.0 / 6.0 -
                                         inv2 * (1.0 / 30.0 -
                                                 inv2 * (1.0 / 42.0 -
                                                         inv2 * (1.0 / 30.0 -
                                                                 inv2 * (5.0 / 66.0 -
                                                                         inv2 * (691.0 / 2730.0 - inv2 * (7.0 / 6.0)))))))));
    return series + shift;
}

double gamma_p(double a, double x)
{
    check_incomplete_args(a, x);
    if (x == 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;
    if (x < a + 1.0)
        return gamma_p_series(a, x);
    return 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x)
{
    check_incomplete_args(a, x);
    if (x == 0.0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    if (x < a + 1.0)
        return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

} // namespace nakamap::special
