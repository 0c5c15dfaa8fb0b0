#include "onebit/mse.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "onebit/error.hpp"
#include "onebit/specfun.hpp"

namespace onebit {

namespace {

constexpr double kDenominatorFloor = 1e-300;

// Pr(Y = y | f) for the one-bit ADC: Y = 0 iff f + W >= 0.
inline double bit_prob(int y, double f, double sigma_w) {
    return y == 0 ? q_func(-f / sigma_w) : q_func(f / sigma_w);
}

}  // namespace

SourceGrid default_u_grid(const SystemParams& params, const SourceGrid& v_grid) {
    return make_grid(params.sigma_u, v_grid.halfwidth_sigmas, v_grid.size());
}

MseProblem::MseProblem(const SystemParams& params, SourceGrid v_grid, SourceGrid u_grid)
    : params_(params), v_grid_(std::move(v_grid)), u_grid_(std::move(u_grid)) {
    params_.validate();
    degenerate_ = params_.perfect_side_info();
    const std::size_t nv = v_grid_.size();
    const std::size_t nu = u_grid_.size();

    SourceGrid vg = v_grid_;
    vg.sigma = params_.sigma_v;
    vg.halfwidth_sigmas = v_grid_.hi() / params_.sigma_v;
    power_weights_ = vg.probability_weights();
    node_weights_.resize(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        node_weights_[i] = v_grid_.weights[i] * normal_pdf(v_grid_.nodes[i] / params_.sigma_v) / params_.sigma_v;
    }
    SourceGrid ug = u_grid_;
    ug.sigma = params_.sigma_u;
    ug.halfwidth_sigmas = u_grid_.hi() / params_.sigma_u;
    u_weights_ = ug.probability_weights();
    if (degenerate_) return;

    const double sd = params_.innovation_sd();
    kernel_.resize(nu * nv);
    left0_.resize(nu);
    left1_.resize(nu);
    left2_.resize(nu);
    right0_.resize(nu);
    right1_.resize(nu);
    right2_.resize(nu);
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nu; ++j) {
        const double mean = side_info_estimate(params_, u_grid_.nodes[j]);
        double* row = &kernel_[j * nv];
        for (std::size_t i = 0; i < nv; ++i) {
            const double z = (v_grid_.nodes[i] - mean) / sd;
            row[i] = v_grid_.weights[i] * normal_pdf(z) / sd;
        }
        const PartialMoments lt = normal_partial_moments(-inf, v_grid_.lo(), mean, sd);
        const PartialMoments rt = normal_partial_moments(v_grid_.hi(), inf, mean, sd);
        left0_[j] = lt.mass;
        left1_[j] = lt.first;
        left2_[j] = lt.second;
        right0_[j] = rt.mass;
        right1_[j] = rt.first;
        right2_[j] = rt.second;
    }
}

void MseProblem::check_size(std::span<const double> f) const {
    if (f.size() != v_grid_.size()) throw ConfigError("mapping size does not match the problem grid");
}

double MseProblem::power(std::span<const double> f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += power_weights_[i] * f[i] * f[i];
    return acc;
}

MseProblem::Moments MseProblem::moments(std::span<const double> f) const {
    check_size(f);
    const std::size_t nv = v_grid_.size();
    const std::size_t nu = u_grid_.size();
    const double sw = params_.sigma_w;
    Moments m;
    for (int y = 0; y < 2; ++y) {
        m.s0[y].assign(nu, 0.0);
        m.s1[y].assign(nu, 0.0);
        m.s2[y].assign(nu, 0.0);
    }
    if (degenerate_) {
        for (std::size_t j = 0; j < nu; ++j) {
            const double v = side_info_estimate(params_, u_grid_.nodes[j]);
            const double fv = interpolate_clamped(v_grid_, f, v);
            for (int y = 0; y < 2; ++y) {
                const double p = bit_prob(y, fv, sw);
                m.s0[y][j] = p;
                m.s1[y][j] = p * v;
                m.s2[y][j] = p * v * v;
            }
        }
        return m;
    }

    // Per node: P(Y=0|v_i), and the same times v_i and v_i^2. P(Y=1) = 1 - P(Y=0)
    // is evaluated separately to keep tail precision.
    std::vector<double> a0(nv), a1(nv), a2(nv), b0(nv), b1(nv), b2(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        const double v = v_grid_.nodes[i];
        const double p0 = bit_prob(0, f[i], sw);
        const double p1 = bit_prob(1, f[i], sw);
        a0[i] = p0;
        a1[i] = p0 * v;
        a2[i] = p0 * v * v;
        b0[i] = p1;
        b1[i] = p1 * v;
        b2[i] = p1 * v * v;
    }
    const double lo0 = a0.front(), lo1 = b0.front();
    const double hi0 = a0.back(), hi1 = b0.back();
    for (std::size_t j = 0; j < nu; ++j) {
        const double* row = &kernel_[j * nv];
        double x0 = 0, x1 = 0, x2 = 0, y0 = 0, y1 = 0, y2 = 0;
        for (std::size_t i = 0; i < nv; ++i) {
            const double k = row[i];
            x0 += k * a0[i];
            x1 += k * a1[i];
            x2 += k * a2[i];
            y0 += k * b0[i];
            y1 += k * b1[i];
            y2 += k * b2[i];
        }
        m.s0[0][j] = x0 + lo0 * left0_[j] + hi0 * right0_[j];
        m.s1[0][j] = x1 + lo0 * left1_[j] + hi0 * right1_[j];
        m.s2[0][j] = x2 + lo0 * left2_[j] + hi0 * right2_[j];
        m.s0[1][j] = y0 + lo1 * left0_[j] + hi1 * right0_[j];
        m.s1[1][j] = y1 + lo1 * left1_[j] + hi1 * right1_[j];
        m.s2[1][j] = y2 + lo1 * left2_[j] + hi1 * right2_[j];
    }
    return m;
}

DecoderTable MseProblem::decoder_from(const Moments& m) const {
    const std::size_t nu = u_grid_.size();
    std::vector<double> g[2];
    std::size_t fallbacks = 0;
    for (int y = 0; y < 2; ++y) {
        g[y].resize(nu);
        for (std::size_t j = 0; j < nu; ++j) {
            const double prior = side_info_estimate(params_, u_grid_.nodes[j]);
            if (degenerate_) {
                g[y][j] = prior;
            } else if (m.s0[y][j] < kDenominatorFloor) {
                g[y][j] = prior;
                ++fallbacks;
            } else {
                g[y][j] = m.s1[y][j] / m.s0[y][j];
            }
        }
    }
    DecoderTable table(u_grid_, std::move(g[0]), std::move(g[1]));
    table.fallback_count = fallbacks;
    return table;
}

double MseProblem::distortion_from(const Moments& m, const DecoderTable& g) const {
    double d = 0.0;
    for (std::size_t j = 0; j < u_grid_.size(); ++j) {
        double inner = 0.0;
        for (int y = 0; y < 2; ++y) {
            const double gy = g.for_bit(y)[j];
            inner += m.s2[y][j] - 2.0 * gy * m.s1[y][j] + gy * gy * m.s0[y][j];
        }
        d += u_weights_[j] * inner;
    }
    return d;
}

DecoderTable MseProblem::decoder(std::span<const double> f) const { return decoder_from(moments(f)); }

MseEval MseProblem::evaluate(std::span<const double> f, const DecoderTable& g) const {
    if (g.g0.size() != u_grid_.size()) throw ConfigError("decoder table does not match the problem u-grid");
    const Moments m = moments(f);
    MseEval e;
    e.distortion = distortion_from(m, g);
    e.power = power(f);
    e.lagrangian = e.distortion + params_.lambda * e.power;
    e.decoder = g;
    return e;
}

MseEval MseProblem::evaluate(std::span<const double> f) const {
    const Moments m = moments(f);
    MseEval e;
    e.decoder = decoder_from(m);
    e.distortion = distortion_from(m, e.decoder);
    e.power = power(f);
    e.lagrangian = e.distortion + params_.lambda * e.power;
    return e;
}

// a[i] = E[g(0,U) - g(1,U) | V = v_i], b[i] = E[g(0,U)^2 - g(1,U)^2 | V = v_i],
// with the conditional law of U taken from the same discretization as the decoder.
void MseProblem::conditional_gaps(const DecoderTable& g, std::vector<double>& a, std::vector<double>& b) const {
    if (degenerate_) throw DomainError("gradient requires |r| < 1");
    const std::size_t nv = v_grid_.size();
    const std::size_t nu = u_grid_.size();
    a.assign(nv, 0.0);
    b.assign(nv, 0.0);
    for (std::size_t j = 0; j < nu; ++j) {
        const double d = g.g0[j] - g.g1[j];
        const double ca = u_weights_[j] * d;
        const double cb = u_weights_[j] * d * (g.g0[j] + g.g1[j]);
        const double* row = &kernel_[j * nv];
        for (std::size_t i = 0; i < nv; ++i) {
            a[i] += row[i] * ca;
            b[i] += row[i] * cb;
        }
    }
    for (std::size_t i = 0; i < nv; ++i) {
        a[i] /= node_weights_[i];
        b[i] /= node_weights_[i];
    }
}

std::vector<double> MseProblem::gradient(std::span<const double> f, const DecoderTable& g) const {
    check_size(f);
    std::vector<double> a, b;
    conditional_gaps(g, a, b);
    const double sw = params_.sigma_w;
    std::vector<double> grad(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = v_grid_.nodes[i];
        const double noise_density = normal_pdf(f[i] / sw) / sw;
        grad[i] = 2.0 * params_.lambda * f[i] - noise_density * (2.0 * v * a[i] - b[i]);
    }
    return grad;
}

std::vector<double> MseProblem::stationarity_residual(std::span<const double> f, const DecoderTable& g) const {
    check_size(f);
    std::vector<double> a, b;
    conditional_gaps(g, a, b);
    const double sw = params_.sigma_w;
    const double su = params_.sigma_u;
    const double c = 2.0 * std::sqrt(2.0 * std::numbers::pi) * sw * su * params_.lambda;
    std::vector<double> res(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = v_grid_.nodes[i];
        // A(v) and B(v) integrate the unnormalized conditional density Phi(u/su | v/sv) du,
        // which carries a factor su relative to the conditional expectations above.
        res[i] = c * f[i] * std::exp(f[i] * f[i] / (2.0 * sw * sw)) - su * (2.0 * v * a[i] - b[i]);
    }
    return res;
}

DecoderTable mmse_decoder(const EncoderMapping& f, const SystemParams& params, const SourceGrid& u_grid) {
    return MseProblem(params, f.grid, u_grid).decoder(f.values);
}

MseEval mse_distortion(const EncoderMapping& f, const DecoderTable& g, const SystemParams& params) {
    return MseProblem(params, f.grid, g.u_grid).evaluate(f.values, g);
}

std::vector<double> grad_mse(const EncoderMapping& f, const SystemParams& params) {
    return grad_mse(f, params, default_u_grid(params, f.grid));
}

std::vector<double> grad_mse(const EncoderMapping& f, const SystemParams& params, const SourceGrid& u_grid) {
    if (params.perfect_side_info()) throw DomainError("grad_mse requires |r| < 1");
    MseProblem problem(params, f.grid, u_grid);
    return problem.gradient(f.values, problem.decoder(f.values));
}

}  // namespace onebit
