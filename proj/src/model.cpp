#include "onebit/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "onebit/error.hpp"
#include "onebit/specfun.hpp"

namespace onebit {

std::string to_string(Criterion c) { return c == Criterion::Mse ? "mse" : "dop"; }

Criterion parse_criterion(std::string_view name) {
    if (name == "mse") return Criterion::Mse;
    if (name == "dop") return Criterion::Dop;
    throw ConfigError("unknown criterion '" + std::string(name) + "' (expected mse or dop)");
}

void SystemParams::validate() const {
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(sigma_v)) throw ConfigError("sigma_v must be > 0");
    if (!positive(sigma_u)) throw ConfigError("sigma_u must be > 0");
    if (!positive(sigma_w)) throw ConfigError("sigma_w must be > 0");
    if (!(std::abs(r) <= 1.0)) throw ConfigError("r must lie in [-1, 1]");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
    if (!positive(d_target)) throw ConfigError("d_target must be > 0");
}

bool SystemParams::perfect_side_info() const { return std::abs(r) >= 1.0; }

double SystemParams::innovation_sd() const {
    return sigma_v * std::sqrt(std::max(0.0, 1.0 - r * r));
}

double SourceGrid::tail_mass() const { return q_func(halfwidth_sigmas); }

std::vector<double> SourceGrid::probability_weights() const {
    std::vector<double> p(size());
    for (std::size_t i = 0; i < size(); ++i) {
        p[i] = weights[i] * normal_pdf(nodes[i] / sigma) / sigma;
    }
    const double tail = tail_mass();
    p.front() += tail;
    p.back() += tail;
    return p;
}

std::size_t SourceGrid::nearest(double x) const {
    const double t = std::round((x - lo()) / spacing());
    if (!(t > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(t), size() - 1);
}

SourceGrid make_grid(double sigma, double halfwidth_sigmas, std::size_t n) {
    if (n < 3 || n % 2 == 0) {
        throw ConfigError("grid size must be odd and >= 3, got " + std::to_string(n));
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("grid sigma must be > 0");
    if (!(halfwidth_sigmas >= 4.0) || !std::isfinite(halfwidth_sigmas)) {
        throw ConfigError("grid halfwidth must be >= 4 sigmas");
    }
    SourceGrid g;
    g.sigma = sigma;
    g.halfwidth_sigmas = halfwidth_sigmas;
    g.nodes.resize(n);
    g.weights.resize(n);
    const double half = halfwidth_sigmas * sigma;
    const auto mid = static_cast<std::ptrdiff_t>(n / 2);
    const double h = half / static_cast<double>(mid);
    for (std::size_t i = 0; i < n; ++i) {
        // Symmetric construction keeps v_{mid+k} == -v_{mid-k} bit for bit.
        g.nodes[i] = static_cast<double>(static_cast<std::ptrdiff_t>(i) - mid) * h;
        g.weights[i] = h;
    }
    g.weights.front() = g.weights.back() = 0.5 * h;
    return g;
}

EncoderMapping::EncoderMapping(SourceGrid g, std::vector<double> f)
    : grid(std::move(g)), values(std::move(f)) {
    if (values.size() != grid.size()) throw ConfigError("mapping size does not match its grid");
    for (double x : values) {
        if (!std::isfinite(x)) throw DomainError("mapping contains a non-finite value");
    }
}

double EncoderMapping::at(double x) const { return interpolate_clamped(grid, values, x); }

EncoderMapping zero_mapping(const SourceGrid& grid) {
    return EncoderMapping(grid, std::vector<double>(grid.size(), 0.0));
}

DecoderTable::DecoderTable(SourceGrid g, std::vector<double> y0, std::vector<double> y1)
    : u_grid(std::move(g)), g0(std::move(y0)), g1(std::move(y1)) {
    if (g0.size() != u_grid.size() || g1.size() != u_grid.size()) {
        throw ConfigError("decoder table size does not match its grid");
    }
    for (std::size_t j = 0; j < g0.size(); ++j) {
        if (!std::isfinite(g0[j]) || !std::isfinite(g1[j])) {
            throw DomainError("decoder table contains a non-finite value");
        }
    }
}

double DecoderTable::at(int y, double u) const { return interpolate_clamped(u_grid, for_bit(y), u); }

double average_power(const EncoderMapping& f, const SystemParams& params) {
    SourceGrid g = f.grid;
    // The grid may have been built for another sigma; weights always use sigma_v.
    g.halfwidth_sigmas = g.hi() / params.sigma_v;
    g.sigma = params.sigma_v;
    const std::vector<double> p = g.probability_weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * f.values[i] * f.values[i];
    return acc;
}

double interpolate_clamped(const SourceGrid& grid, std::span<const double> values, double x) {
    if (x <= grid.lo()) return values.front();
    if (x >= grid.hi()) return values.back();
    const double t = (x - grid.lo()) / grid.spacing();
    auto i = static_cast<std::size_t>(t);
    if (i >= values.size() - 1) i = values.size() - 2;
    const double frac = t - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
}

double side_info_estimate(const SystemParams& params, double u) {
    return params.r * params.sigma_v / params.sigma_u * u;
}

}  // namespace onebit
