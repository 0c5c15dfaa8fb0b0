#include "onebit/dop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "onebit/error.hpp"
#include "onebit/specfun.hpp"

namespace onebit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieRelTol = 1e-12;
constexpr double kMassFloor = 1e-300;
constexpr int kGoldenIters = 40;

inline double bit_prob(int y, double f, double sigma_w) {
    return y == 0 ? q_func(-f / sigma_w) : q_func(f / sigma_w);
}

// Node visiting order for the grid argmax: increasing |x|, negative before positive.
std::vector<std::size_t> tie_order(std::size_t n) {
    std::vector<std::size_t> order;
    order.reserve(n);
    const std::size_t mid = n / 2;
    order.push_back(mid);
    for (std::size_t k = 1; k <= mid; ++k) {
        order.push_back(mid - k);
        order.push_back(mid + k);
    }
    return order;
}

}  // namespace

SourceGrid default_dop_u_grid(const SystemParams& params, const SourceGrid& v_grid) {
    return make_grid(params.sigma_u, v_grid.halfwidth_sigmas, std::min<std::size_t>(v_grid.size(), 1001));
}

IntervalBounds interval_bounds(double g0, double g1, double d) {
    if (!(d > 0.0)) throw DomainError("interval_bounds: d must be > 0");
    const double s = std::sqrt(d);
    IntervalBounds b;
    if (g0 == g1) {
        b.b0l = b.b1l = g0 + s;
        b.b0r = b.b1r = g0 - s;
    } else if (g0 > g1) {
        b.b0l = std::max(g0 - s, g1 + s);
        b.b0r = g0 + s;
        b.b1l = g1 - s;
        b.b1r = std::min(g1 + s, g0 - s);
    } else {
        b.b0l = g0 - s;
        b.b0r = std::min(g0 + s, g1 - s);
        b.b1l = std::max(g1 - s, g0 + s);
        b.b1r = g1 + s;
    }
    return b;
}

std::vector<IntervalBounds> interval_bounds(const DecoderTable& g, double d) {
    std::vector<IntervalBounds> out(g.g0.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = interval_bounds(g.g0[j], g.g1[j], d);
    return out;
}

DopProblem::DopProblem(const SystemParams& params, SourceGrid v_grid, SourceGrid u_grid)
    : DopProblem(params, v_grid, std::move(u_grid), v_grid) {}

DopProblem::DopProblem(const SystemParams& params, SourceGrid v_grid, SourceGrid u_grid, SourceGrid vhat_grid,
                       DopOptions options)
    : params_(params),
      v_grid_(std::move(v_grid)),
      u_grid_(std::move(u_grid)),
      vhat_grid_(std::move(vhat_grid)),
      options_(options) {
    params_.validate();
    degenerate_ = params_.perfect_side_info();
    radius_ = std::sqrt(params_.d_target);
    if (radius_ > vhat_grid_.hi()) throw ConfigError("sqrt(d_target) exceeds the decoder grid halfwidth");
    sd_ = params_.innovation_sd();

    const std::size_t nv = v_grid_.size();
    const std::size_t nu = u_grid_.size();
    SourceGrid ug = u_grid_;
    ug.sigma = params_.sigma_u;
    ug.halfwidth_sigmas = u_grid_.hi() / params_.sigma_u;
    u_weights_ = ug.probability_weights();
    means_.resize(nu);
    for (std::size_t j = 0; j < nu; ++j) means_[j] = side_info_estimate(params_, u_grid_.nodes[j]);

    cell_weights_.assign(nv, 0.0);
    if (degenerate_) {
        for (std::size_t i = 0; i < nv; ++i) {
            cell_weights_[i] = normal_interval_prob(cell_lo(i) / params_.sigma_v, cell_hi(i) / params_.sigma_v);
        }
        power_weights_ = cell_weights_;
        return;
    }

    cell_mass_.resize(nu * nv);
    for (std::size_t j = 0; j < nu; ++j) {
        double* row = &cell_mass_[j * nv];
        for (std::size_t i = 0; i < nv; ++i) {
            row[i] = normal_interval_prob((cell_lo(i) - means_[j]) / sd_, (cell_hi(i) - means_[j]) / sd_);
            cell_weights_[i] += u_weights_[j] * row[i];
        }
    }
    power_weights_ = cell_weights_;
}

void DopProblem::build_windows(WindowTables& w) const {
    const std::size_t nu = u_grid_.size();
    const std::size_t nk = vhat_grid_.size();
    w.lo.resize(nk);
    w.hi.resize(nk);
    for (std::size_t k = 0; k < nk; ++k) {
        w.lo[k] = cell_of(vhat_grid_.nodes[k] - radius_);
        w.hi[k] = cell_of(vhat_grid_.nodes[k] + radius_);
    }
    w.lo_part.resize(nu * nk);
    w.hi_part.resize(nu * nk);
    for (std::size_t j = 0; j < nu; ++j) {
        for (std::size_t k = 0; k < nk; ++k) {
            const double a = vhat_grid_.nodes[k] - radius_;
            const double b = vhat_grid_.nodes[k] + radius_;
            if (w.lo[k] == w.hi[k]) {
                w.lo_part[j * nk + k] = interval_mass(j, a, b);
                w.hi_part[j * nk + k] = 0.0;
            } else {
                w.lo_part[j * nk + k] = interval_mass(j, a, cell_hi(w.lo[k]));
                w.hi_part[j * nk + k] = interval_mass(j, cell_lo(w.hi[k]), b);
            }
        }
    }
}

double DopProblem::cell_lo(std::size_t i) const {
    return i == 0 ? -kInf : 0.5 * (v_grid_.nodes[i - 1] + v_grid_.nodes[i]);
}

double DopProblem::cell_hi(std::size_t i) const {
    return i + 1 == v_grid_.size() ? kInf : 0.5 * (v_grid_.nodes[i] + v_grid_.nodes[i + 1]);
}

std::size_t DopProblem::cell_of(double x) const {
    const std::size_t n = v_grid_.size();
    const double t = (x - v_grid_.lo()) / v_grid_.spacing() + 0.5;
    std::size_t i = 0;
    if (t > 0.0) i = std::min(static_cast<std::size_t>(std::min(t, 1e15)), n - 1);
    while (i > 0 && x < cell_lo(i)) --i;
    while (i + 1 < n && x >= cell_hi(i)) ++i;
    return i;
}

double DopProblem::interval_mass(std::size_t j, double a, double b) const {
    if (!(a < b)) return 0.0;
    return normal_interval_prob((a - means_[j]) / sd_, (b - means_[j]) / sd_);
}

template <class Visit>
void DopProblem::for_cells(std::size_t j, double a, double b, Visit&& visit) const {
    if (!(a < b)) return;
    const std::size_t ia = cell_of(a);
    const std::size_t ib = cell_of(b);
    if (ia == ib) {
        visit(ia, interval_mass(j, a, b));
        return;
    }
    const double* row = &cell_mass_[j * v_grid_.size()];
    visit(ia, interval_mass(j, a, cell_hi(ia)));
    for (std::size_t i = ia + 1; i < ib; ++i) visit(i, row[i]);
    visit(ib, interval_mass(j, cell_lo(ib), b));
}

double DopProblem::power(std::span<const double> f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += power_weights_[i] * f[i] * f[i];
    return acc;
}

double DopProblem::window_mass(std::span<const double> f, int y, std::size_t j, double x) const {
    if (f.size() != v_grid_.size()) throw ConfigError("mapping size does not match the problem grid");
    if (degenerate_) {
        const double v = means_[j];
        if (!(std::abs(v - x) < radius_)) return 0.0;
        return bit_prob(y, interpolate_clamped(v_grid_, f, v), params_.sigma_w);
    }
    double acc = 0.0;
    for_cells(j, x - radius_, x + radius_,
              [&](std::size_t i, double m) { acc += m * bit_prob(y, f[i], params_.sigma_w); });
    return acc;
}

DecoderTable DopProblem::decoder(std::span<const double> f, const DecoderTable* hint) const {
    if (f.size() != v_grid_.size()) throw ConfigError("mapping size does not match the problem grid");
    if (hint && hint->g0.size() != u_grid_.size()) throw ConfigError("decoder hint does not match the u-grid");
    const std::size_t nv = v_grid_.size();
    const std::size_t nu = u_grid_.size();
    const std::size_t nk = vhat_grid_.size();
    std::vector<double> g[2] = {std::vector<double>(nu), std::vector<double>(nu)};
    if (degenerate_) {
        for (std::size_t j = 0; j < nu; ++j) g[0][j] = g[1][j] = means_[j];
        return DecoderTable(u_grid_, std::move(g[0]), std::move(g[1]));
    }

    WindowTables& tab = *windows_;
    std::call_once(tab.once, [&] { build_windows(tab); });
    const std::vector<std::size_t> order = tie_order(nk);
    std::size_t fallbacks = 0;
    std::vector<double> py(nv), prefix(nv + 1);
    for (int y = 0; y < 2; ++y) {
        for (std::size_t i = 0; i < nv; ++i) py[i] = bit_prob(y, f[i], params_.sigma_w);
        for (std::size_t j = 0; j < nu; ++j) {
            const double* row = &cell_mass_[j * nv];
            prefix[0] = 0.0;
            for (std::size_t i = 0; i < nv; ++i) prefix[i + 1] = prefix[i] + row[i] * py[i];
            auto window = [&](std::size_t k) {
                const std::size_t lo = tab.lo[k], hi = tab.hi[k];
                double m = py[lo] * tab.lo_part[j * nk + k];
                if (hi != lo) m += (prefix[hi] - prefix[lo + 1]) + py[hi] * tab.hi_part[j * nk + k];
                return m;
            };
            std::size_t best_k = order.front();
            double best = window(best_k);
            for (std::size_t t = 1; t < nk; ++t) {
                const std::size_t k = order[t];
                const double w = window(k);
                if (w > best * (1.0 + kTieRelTol) + kMassFloor) {
                    best = w;
                    best_k = k;
                }
            }
            if (best < kMassFloor) {
                g[y][j] = means_[j];
                ++fallbacks;
                continue;
            }
            auto exact = [&](double x) {
                double acc = 0.0;
                for_cells(j, x - radius_, x + radius_, [&](std::size_t i, double m) { acc += m * py[i]; });
                return acc;
            };
            double x_best = vhat_grid_.nodes[best_k];
            if (options_.refine_decoder) {
                const double h = vhat_grid_.spacing();
                double a = std::max(vhat_grid_.lo(), x_best - h);
                double b = std::min(vhat_grid_.hi(), x_best + h);
                const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
                double c = b - phi * (b - a), d = a + phi * (b - a);
                double fc = exact(c), fd = exact(d);
                for (int it = 0; it < kGoldenIters; ++it) {
                    if (fc >= fd) {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - phi * (b - a);
                        fc = exact(c);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + phi * (b - a);
                        fd = exact(d);
                    }
                }
                const double x_ref = 0.5 * (a + b);
                const double w_ref = exact(x_ref);
                if (w_ref > best * (1.0 + kTieRelTol) + kMassFloor) {
                    x_best = x_ref;
                    best = w_ref;
                }
            }
            if (hint) {
                const double x_hint = hint->for_bit(y)[j];
                if (exact(x_hint) > best * (1.0 + kTieRelTol) + kMassFloor) x_best = x_hint;
            }
            g[y][j] = x_best;
        }
    }
    DecoderTable table(u_grid_, std::move(g[0]), std::move(g[1]));
    table.fallback_count = fallbacks;
    return table;
}

double DopProblem::degenerate_outage(std::span<const double> f, const DecoderTable& g, double& source) const {
    double eps = 0.0;
    source = 0.0;
    for (std::size_t j = 0; j < u_grid_.size(); ++j) {
        const double v = means_[j];
        const double fv = interpolate_clamped(v_grid_, f, v);
        const bool in0 = std::abs(v - g.g0[j]) < radius_;
        const bool in1 = std::abs(v - g.g1[j]) < radius_;
        double e = 0.0;
        if (!in0) e += bit_prob(0, fv, params_.sigma_w);
        if (!in1) e += bit_prob(1, fv, params_.sigma_w);
        eps += u_weights_[j] * e;
        if (!in0 && !in1) source += u_weights_[j];
    }
    return eps;
}

DopEval DopProblem::evaluate(std::span<const double> f, const DecoderTable& g) const {
    if (f.size() != v_grid_.size()) throw ConfigError("mapping size does not match the problem grid");
    if (g.g0.size() != u_grid_.size()) throw ConfigError("decoder table does not match the problem u-grid");
    DopEval e;
    e.decoder = g;
    e.power = power(f);
    if (degenerate_) {
        e.outage = degenerate_outage(f, g, e.source_outage);
    } else {
        const double sw = params_.sigma_w;
        std::vector<double> p0(f.size()), p1(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            p0[i] = bit_prob(0, f[i], sw);
            p1[i] = bit_prob(1, f[i], sw);
        }
        double eps = 0.0, src = 0.0;
        for (std::size_t j = 0; j < u_grid_.size(); ++j) {
            const IntervalBounds b = interval_bounds(g.g0[j], g.g1[j], params_.d_target);
            double channel = 0.0;
            for_cells(j, b.b0l, b.b0r, [&](std::size_t i, double m) { channel += m * p1[i]; });
            for_cells(j, b.b1l, b.b1r, [&](std::size_t i, double m) { channel += m * p0[i]; });
            const double lo0 = g.g0[j] - radius_, hi0 = g.g0[j] + radius_;
            const double lo1 = g.g1[j] - radius_, hi1 = g.g1[j] + radius_;
            const double lo = std::min(lo0, lo1), hi = std::max(hi0, hi1);
            double outside = interval_mass(j, -kInf, lo) + interval_mass(j, hi, kInf);
            if (hi0 < lo1) outside += interval_mass(j, hi0, lo1);
            if (hi1 < lo0) outside += interval_mass(j, hi1, lo0);
            eps += u_weights_[j] * (channel + outside);
            src += u_weights_[j] * outside;
        }
        e.outage = std::min(1.0, eps);
        e.source_outage = std::min(e.outage, src);
    }
    e.lagrangian = e.outage + params_.lambda * e.power;
    return e;
}

DopEval DopProblem::evaluate(std::span<const double> f) const { return evaluate(f, decoder(f)); }

void DopProblem::set_probabilities(const DecoderTable& g, std::vector<double>& p01, std::vector<double>& p10) const {
    if (degenerate_) throw DomainError("DOP gradient requires |r| < 1");
    if (g.g0.size() != u_grid_.size()) throw ConfigError("decoder table does not match the problem u-grid");
    const std::size_t nv = v_grid_.size();
    p01.assign(nv, 0.0);
    p10.assign(nv, 0.0);
    for (std::size_t j = 0; j < u_grid_.size(); ++j) {
        const IntervalBounds b = interval_bounds(g.g0[j], g.g1[j], params_.d_target);
        const double w = u_weights_[j];
        for_cells(j, b.b0l, b.b0r, [&](std::size_t i, double m) { p01[i] += w * m; });
        for_cells(j, b.b1l, b.b1r, [&](std::size_t i, double m) { p10[i] += w * m; });
    }
    for (std::size_t i = 0; i < nv; ++i) {
        if (cell_weights_[i] > 0.0) {
            p01[i] /= cell_weights_[i];
            p10[i] /= cell_weights_[i];
        } else {
            p01[i] = p10[i] = 0.0;
        }
    }
}

std::vector<double> DopProblem::gradient(std::span<const double> f, const DecoderTable& g) const {
    if (f.size() != v_grid_.size()) throw ConfigError("mapping size does not match the problem grid");
    std::vector<double> p01, p10;
    set_probabilities(g, p01, p10);
    const double sw = params_.sigma_w;
    std::vector<double> grad(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        grad[i] = 2.0 * params_.lambda * f[i] - normal_pdf(f[i] / sw) / sw * (p01[i] - p10[i]);
    }
    return grad;
}

std::vector<double> DopProblem::stationarity_residual(std::span<const double> f, const DecoderTable& g) const {
    if (!(params_.lambda > 0.0)) throw DomainError("stationarity residual requires lambda > 0");
    if (f.size() != v_grid_.size()) throw ConfigError("mapping size does not match the problem grid");
    std::vector<double> p01, p10;
    set_probabilities(g, p01, p10);
    const double sw = params_.sigma_w;
    std::vector<double> res(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        res[i] = f[i] - normal_pdf(f[i] / sw) / (2.0 * params_.lambda * sw) * (p01[i] - p10[i]);
    }
    return res;
}

DecoderTable dop_decoder(const EncoderMapping& f, const SystemParams& params, const SourceGrid& u_grid,
                         const SourceGrid& vhat_grid) {
    return DopProblem(params, f.grid, u_grid, vhat_grid).decoder(f.values);
}

DopEval dop_evaluate(const EncoderMapping& f, const DecoderTable& g, const SystemParams& params) {
    return DopProblem(params, f.grid, g.u_grid, f.grid).evaluate(f.values, g);
}

std::vector<double> grad_dop(const EncoderMapping& f, const DecoderTable& g, const SystemParams& params) {
    return DopProblem(params, f.grid, g.u_grid, f.grid).gradient(f.values, g);
}

double dop_low_snr_limit(const SystemParams& params) {
    params.validate();
    if (params.perfect_side_info()) return 0.0;
    return 2.0 * q_func(std::sqrt(params.d_target) / params.innovation_sd());
}

}  // namespace onebit
