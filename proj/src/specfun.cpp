#include "onebit/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "onebit/error.hpp"

namespace onebit {

double q_func(double z) {
    if (!std::isfinite(z)) throw DomainError("q_func: non-finite argument");
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

double normal_pdf(double x) {
    if (std::isnan(x)) throw DomainError("normal_pdf: NaN argument");
    if (std::isinf(x)) return 0.0;
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double cond_pdf(double v, double u, double r) {
    if (!(std::abs(r) < 1.0)) {
        throw DegenerateCorrelationError("cond_pdf: |r| must be < 1, got " + std::to_string(r));
    }
    const double var = 1.0 - r * r;
    const double d = v - r * u;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binary_entropy: p outside [0,1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

namespace {

// Q with infinite arguments allowed.
double q_ext(double z) {
    if (z == std::numeric_limits<double>::infinity()) return 0.0;
    if (z == -std::numeric_limits<double>::infinity()) return 1.0;
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

// z * phi(z), zero at +-infinity.
double z_pdf(double z) {
    if (std::isinf(z)) return 0.0;
    return z * kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

}  // namespace

double normal_interval_prob(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) throw DomainError("normal_interval_prob: NaN bound");
    if (!(a < b)) return 0.0;
    if (a >= 0.0) return q_ext(a) - q_ext(b);
    if (b <= 0.0) return q_ext(-b) - q_ext(-a);
    return 1.0 - q_ext(b) - q_ext(-a);
}

PartialMoments normal_partial_moments(double a, double b, double mean, double sd) {
    PartialMoments m;
    if (!(a < b)) return m;
    const double za = (a - mean) / sd;
    const double zb = (b - mean) / sd;
    const double pa = std::isinf(za) ? 0.0 : normal_pdf(za);
    const double pb = std::isinf(zb) ? 0.0 : normal_pdf(zb);
    const double mass = normal_interval_prob(za, zb);
    const double ez = pa - pb;                      // E[Z; za<Z<zb]
    const double ez2 = mass + z_pdf(za) - z_pdf(zb);  // E[Z^2; za<Z<zb]
    m.mass = mass;
    m.first = mean * mass + sd * ez;
    m.second = mean * mean * mass + 2.0 * mean * sd * ez + sd * sd * ez2;
    return m;
}

}  // namespace onebit
