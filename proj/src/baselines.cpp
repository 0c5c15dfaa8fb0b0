#include "onebit/baselines.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "onebit/error.hpp"
#include "onebit/specfun.hpp"

namespace onebit {

namespace {

void check_plt(const PltParams& p) {
    if (!(p.alpha >= 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
        throw ConfigError("PLT parameters need alpha >= 0 and beta > 0");
    }
}

void check_pbt(const PbtParams& p) {
    if (!(p.level >= 0.0) || !(p.delta > 0.0) || !std::isfinite(p.level) || !std::isfinite(p.delta)) {
        throw ConfigError("PBT parameters need level >= 0 and delta > 0");
    }
}

constexpr int kScanPoints = 32;
constexpr int kGoldenIters = 30;
constexpr double kShapeLo = 0.2;   // in units of sigma_v
constexpr double kShapeHi = 20.0;

// Coarse log-spaced scan over the shape parameter followed by golden-section search
// between the neighbours of the best scan point.
SchemeResult search_shape(const std::function<SchemeResult(double)>& at, double sigma_v) {
    const double lo = std::log(kShapeLo * sigma_v);
    const double hi = std::log(kShapeHi * sigma_v);
    const double step = (hi - lo) / (kScanPoints - 1);
    SchemeResult best = at(std::exp(lo));
    int best_i = 0;
    for (int i = 1; i < kScanPoints; ++i) {
        SchemeResult r = at(std::exp(lo + i * step));
        if (r.eval.value < best.eval.value) {
            best = std::move(r);
            best_i = i;
        }
    }
    double a = lo + std::max(0, best_i - 1) * step;
    double b = lo + std::min(kScanPoints - 1, best_i + 1) * step;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a), d = a + phi * (b - a);
    SchemeResult rc = at(std::exp(c)), rd = at(std::exp(d));
    for (int it = 0; it < kGoldenIters; ++it) {
        if (rc.eval.value <= rd.eval.value) {
            b = d;
            d = c;
            rd = std::move(rc);
            c = b - phi * (b - a);
            rc = at(std::exp(c));
        } else {
            a = c;
            c = d;
            rc = std::move(rd);
            d = a + phi * (b - a);
            rd = at(std::exp(d));
        }
    }
    if (rc.eval.value < best.eval.value) best = std::move(rc);
    if (rd.eval.value < best.eval.value) best = std::move(rd);
    return best;
}

}  // namespace

double plt_value(const PltParams& p, double v) {
    const double k = std::floor(v / p.beta + 0.5);
    const double sign = std::fmod(k, 2.0) == 0.0 ? 1.0 : -1.0;
    return p.alpha * sign * (p.beta * k - v);
}

EncoderMapping plt_mapping(const PltParams& p, const SourceGrid& grid) {
    check_plt(p);
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) f[i] = plt_value(p, grid.nodes[i]);
    return EncoderMapping(grid, std::move(f));
}

double plt_power(const PltParams& p, double sigma_v) {
    check_plt(p);
    if (!(sigma_v > 0.0)) throw ConfigError("sigma_v must be > 0");
    const double b = p.beta;
    const auto n = static_cast<long>(std::ceil(10.0 * sigma_v / b)) + 2;
    double quad = 0.0, lin = 0.0;
    for (long i = -n; i <= n; ++i) {
        const double lo = (static_cast<double>(i) - 0.5) * b;
        const double hi = (static_cast<double>(i) + 0.5) * b;
        const double di = static_cast<double>(i);
        quad += di * di * normal_interval_prob(lo / sigma_v, hi / sigma_v);
        const double elo = std::exp(-lo * lo / (2.0 * sigma_v * sigma_v));
        const double ehi = std::exp(-hi * hi / (2.0 * sigma_v * sigma_v));
        lin += di * (elo - ehi);
    }
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return p.alpha * p.alpha * (sigma_v * sigma_v + b * b * quad - 2.0 * b * sigma_v * inv_sqrt_2pi * lin);
}

double pbt_value(const PbtParams& p, double v) {
    const double a = std::abs(v);
    const double cell = std::floor(2.0 * a / p.delta);
    const double s = std::fmod(cell, 2.0) == 0.0 ? 1.0 : -1.0;
    return v < 0.0 ? -s * p.level : s * p.level;
}

EncoderMapping pbt_mapping(const PbtParams& p, const SourceGrid& grid) {
    check_pbt(p);
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) f[i] = pbt_value(p, grid.nodes[i]);
    return EncoderMapping(grid, std::move(f));
}

double one_bit_capacity(double snr) {
    if (!(snr >= 0.0)) throw DomainError("snr must be >= 0");
    return 1.0 - binary_entropy(q_func(std::sqrt(snr)));
}

BoundReport slb(const SystemParams& params, double snr) {
    params.validate();
    const double c = one_bit_capacity(snr);
    BoundReport rep;
    rep.scheme = BoundScheme::Slb;
    rep.params_used = params;
    rep.value = (1.0 - params.r * params.r) * params.sigma_v * params.sigma_v * std::exp2(-2.0 * c);
    return rep;
}

SchemeResult best_plt(const Objective& obj, double power) {
    if (!(power > 0.0)) throw ConfigError("power target must be > 0");
    const double sv = obj.params().sigma_v;
    return search_shape(
        [&](double beta) {
            PltParams p{1.0, beta};
            p.alpha = std::sqrt(power / plt_power(p, sv));
            SchemeResult r;
            r.mapping = plt_mapping(p, obj.v_grid());
            r.eval = obj.evaluate(r.mapping.values);
            r.shape = beta;
            r.scale = p.alpha;
            return r;
        },
        sv);
}

SchemeResult best_pbt(const Objective& obj, double power) {
    if (!(power > 0.0)) throw ConfigError("power target must be > 0");
    const double gamma = std::sqrt(power);
    return search_shape(
        [&](double delta) {
            SchemeResult r;
            r.mapping = pbt_mapping(PbtParams{gamma, delta}, obj.v_grid());
            r.eval = obj.evaluate(r.mapping.values);
            r.shape = delta;
            r.scale = gamma;
            return r;
        },
        obj.params().sigma_v);
}

}  // namespace onebit
