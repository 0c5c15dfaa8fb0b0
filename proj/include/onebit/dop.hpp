#pragma once

// Distortion-outage-probability criterion.
//
// The source axis is treated as a set of cells, one per grid node, bounded by the
// midpoints between nodes (the end cells extend to infinity). The mapping is constant
// on each cell and the Gaussian law of V | U is integrated exactly over any interval,
// so decoder windows and outage intervals keep their exact real endpoints.

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "onebit/model.hpp"

namespace onebit {

/// I0 \ I1 = (b0l, b0r) and I1 \ I0 = (b1l, b1r) for one side-information value.
/// An interval with l >= r is empty.
struct IntervalBounds {
    double b0l = 0.0, b0r = 0.0, b1l = 0.0, b1r = 0.0;

    bool zero_only_empty() const { return !(b0l < b0r); }
    bool one_only_empty() const { return !(b1l < b1r); }
    bool in_zero_only(double v) const { return b0l < v && v < b0r; }
    bool in_one_only(double v) const { return b1l < v && v < b1r; }
};

/// Difference intervals of the windows {v : (v - g_y)^2 < d} around two reconstruction points.
IntervalBounds interval_bounds(double g0, double g1, double d);

/// `interval_bounds` at every node of the decoder's u-grid.
std::vector<IntervalBounds> interval_bounds(const DecoderTable& g, double d);

struct DopEval {
    double outage = 0.0;         // Pr((V - V^)^2 >= D)
    double power = 0.0;
    double lagrangian = 0.0;
    DecoderTable decoder;
    double source_outage = 0.0;  // Pr(V outside both reconstruction windows)
};

struct DopOptions {
    /// Golden-section polish of each grid argmax within one v^-grid cell.
    bool refine_decoder = true;
};

class DopProblem {
public:
    DopProblem(const SystemParams& params, SourceGrid v_grid, SourceGrid u_grid, SourceGrid vhat_grid,
               DopOptions options = {});
    /// Decoder search over the source grid.
    DopProblem(const SystemParams& params, SourceGrid v_grid, SourceGrid u_grid);

    const SystemParams& params() const { return params_; }
    void set_lambda(double lambda) { params_.lambda = lambda; }
    const SourceGrid& v_grid() const { return v_grid_; }
    const SourceGrid& u_grid() const { return u_grid_; }
    const std::vector<double>& power_weights() const { return power_weights_; }
    /// Probability of each source cell under the discretized joint law.
    const std::vector<double>& cell_weights() const { return cell_weights_; }

    /// Maximizer over v^ of Pr(|V - v^| < sqrt(D), Y = y | U = u) at every u node.
    /// Entries of `hint` that score higher than the search result are kept.
    DecoderTable decoder(std::span<const double> f, const DecoderTable* hint = nullptr) const;

    /// Window objective Pr(|V - x| < sqrt(D), Y = y | U = u_j) for an arbitrary centre x.
    double window_mass(std::span<const double> f, int y, std::size_t j, double x) const;

    DopEval evaluate(std::span<const double> f, const DecoderTable& g) const;
    DopEval evaluate(std::span<const double> f) const;

    /// Pointwise gradient of the Lagrangian in f for a fixed decoder.
    std::vector<double> gradient(std::span<const double> f, const DecoderTable& g) const;

    /// Pr(U in S_{0\1}(v_i)) and Pr(U in S_{1\0}(v_i)) for every source cell.
    void set_probabilities(const DecoderTable& g, std::vector<double>& p01, std::vector<double>& p10) const;

    /// Residual f - phi(f / sigma_w) / (2 lambda sigma_w) * (Pr(S_{0\1}) - Pr(S_{1\0})).
    std::vector<double> stationarity_residual(std::span<const double> f, const DecoderTable& g) const;

private:
    struct WindowTables {
        std::once_flag once;
        std::vector<std::size_t> lo, hi;
        std::vector<double> lo_part, hi_part;
    };

    std::size_t cell_of(double x) const;
    double cell_lo(std::size_t i) const;
    double cell_hi(std::size_t i) const;
    double interval_mass(std::size_t j, double a, double b) const;
    template <class Visit>
    void for_cells(std::size_t j, double a, double b, Visit&& visit) const;
    void build_windows(WindowTables& w) const;
    double power(std::span<const double> f) const;
    double degenerate_outage(std::span<const double> f, const DecoderTable& g, double& source) const;

    SystemParams params_;
    SourceGrid v_grid_, u_grid_, vhat_grid_;
    DopOptions options_;
    bool degenerate_ = false;
    double radius_ = 0.0;  // sqrt(D)
    double sd_ = 0.0;      // std of V | U
    std::vector<double> means_;          // E[V | U = u_j]
    std::vector<double> cell_mass_;      // [j * nv + i]
    // Decoder search tables, built on the first decoder() call: the cells holding each
    // window's ends and the window's mass inside those end cells, [j * nk + k].
    std::shared_ptr<WindowTables> windows_ = std::make_shared<WindowTables>();
    std::vector<double> u_weights_, power_weights_, cell_weights_;
};

/// Default side-information grid for DOP: the source grid's halfwidth with at most 1001 nodes.
SourceGrid default_dop_u_grid(const SystemParams& params, const SourceGrid& v_grid);

DecoderTable dop_decoder(const EncoderMapping& f, const SystemParams& params, const SourceGrid& u_grid,
                         const SourceGrid& vhat_grid);
DopEval dop_evaluate(const EncoderMapping& f, const DecoderTable& g, const SystemParams& params);
std::vector<double> grad_dop(const EncoderMapping& f, const DecoderTable& g, const SystemParams& params);

/// Outage of the all-zero encoder with the side-information-only decoder:
/// 2 Q(sqrt(D) / (sigma_v sqrt(1 - r^2))); 0 for r = +-1.
double dop_low_snr_limit(const SystemParams& params);

}  // namespace onebit
