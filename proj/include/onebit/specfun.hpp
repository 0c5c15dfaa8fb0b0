#pragma once

// Special functions and Gaussian densities. All functions are pure and reentrant.

#include <numbers>

namespace onebit {

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2*pi)

/// Pr(N(0,1) >= z), evaluated through erfc so the upper tail keeps full relative precision.
/// Throws DomainError for non-finite z.
double q_func(double z);

/// Standard normal density.
double normal_pdf(double x);

/// Density of V given U for a standard bivariate normal pair with correlation r.
/// Throws DegenerateCorrelationError when |r| >= 1.
double cond_pdf(double v, double u, double r);

/// Binary entropy in bits with the 0*log(0) = 0 convention.
double binary_entropy(double p);

/// Pr(a < Z < b) for Z ~ N(0,1); either bound may be infinite. Chooses the
/// tail that avoids cancellation.
double normal_interval_prob(double a, double b);

/// Partial moments of X ~ N(mean, sd^2) restricted to (a, b):
/// mass = Pr(a<X<b), first = E[X; a<X<b], second = E[X^2; a<X<b].
struct PartialMoments {
    double mass = 0.0;
    double first = 0.0;
    double second = 0.0;
};

PartialMoments normal_partial_moments(double a, double b, double mean, double sd);

}  // namespace onebit
