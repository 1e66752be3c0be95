#pragma once

namespace nakamap::special {

/// ln Γ(z) for z > 0.
double lgamma(double z);

/// ψ(z) = d/dz ln Γ(z) for z > 0.
double digamma(double z);

/// ψ'(z) for z > 0.
double trigamma(double z);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

} // namespace nakamap::special
