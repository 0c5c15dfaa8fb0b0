#pragma once

// MSE criterion: MMSE decoder, distortion, Lagrangian and its gradient in the encoder.
//
// Integrals over the source use trapezoidal quadrature on the mapping's grid plus the
// analytic Gaussian tails of the clamped mapping; integrals over the side information
// use the u-grid probability weights. The gradient returned by `gradient` is the
// pointwise (density-free) form; for interior node i,
//     d L_h / d f_i = w_i * p_V(v_i) * gradient[i]
// holds exactly for the discretized Lagrangian L_h with the decoder re-optimized.

#include <span>
#include <vector>

#include "onebit/model.hpp"

namespace onebit {

struct MseEval {
    double distortion = 0.0;
    double power = 0.0;
    double lagrangian = 0.0;
    DecoderTable decoder;
};

class MseProblem {
public:
    MseProblem(const SystemParams& params, SourceGrid v_grid, SourceGrid u_grid);

    const SystemParams& params() const { return params_; }
    void set_lambda(double lambda) { params_.lambda = lambda; }
    const SourceGrid& v_grid() const { return v_grid_; }
    const SourceGrid& u_grid() const { return u_grid_; }

    /// Weights of E[h(V)] used by the power term (trapezoid times density, tails on the edges).
    const std::vector<double>& power_weights() const { return power_weights_; }
    /// w_i * p_V(v_i) without tail mass; the factor linking `gradient` to d L_h / d f_i.
    const std::vector<double>& node_weights() const { return node_weights_; }

    /// g(y, u) = E[V | Y = y, U = u] on the u-grid.
    DecoderTable decoder(std::span<const double> f) const;

    /// Distortion, power and Lagrangian of (f, g) by direct double quadrature.
    MseEval evaluate(std::span<const double> f, const DecoderTable& g) const;

    /// `evaluate` with the MMSE decoder of f.
    MseEval evaluate(std::span<const double> f) const;

    /// Pointwise gradient of the Lagrangian in f for the given (optimal) decoder.
    std::vector<double> gradient(std::span<const double> f, const DecoderTable& g) const;

    /// Residual of the necessary condition
    ///   2 sqrt(2 pi) sigma_w sigma_u lambda f e^{f^2 / 2 sigma_w^2} - (2 v A(v) - B(v))
    /// at every v node.
    std::vector<double> stationarity_residual(std::span<const double> f, const DecoderTable& g) const;

private:
    struct Moments {
        // [y][j]: E[1], E[V], E[V^2] restricted to Y = y, conditioned on U = u_j.
        std::vector<double> s0[2], s1[2], s2[2];
    };
    Moments moments(std::span<const double> f) const;
    DecoderTable decoder_from(const Moments& m) const;
    double distortion_from(const Moments& m, const DecoderTable& g) const;
    void conditional_gaps(const DecoderTable& g, std::vector<double>& a, std::vector<double>& b) const;
    double power(std::span<const double> f) const;
    void check_size(std::span<const double> f) const;

    SystemParams params_;
    SourceGrid v_grid_;
    SourceGrid u_grid_;
    bool degenerate_ = false;

    std::vector<double> kernel_;  // [j * nv + i] = w_i p(v_i | u_j)
    // Gaussian tails of V | U = u_j beyond each edge of the v-grid.
    std::vector<double> left0_, left1_, left2_, right0_, right1_, right2_;
    std::vector<double> u_weights_;
    std::vector<double> power_weights_;
    std::vector<double> node_weights_;
};

/// Default side-information grid: same node count and halfwidth as the source grid.
SourceGrid default_u_grid(const SystemParams& params, const SourceGrid& v_grid);

DecoderTable mmse_decoder(const EncoderMapping& f, const SystemParams& params, const SourceGrid& u_grid);
MseEval mse_distortion(const EncoderMapping& f, const DecoderTable& g, const SystemParams& params);
std::vector<double> grad_mse(const EncoderMapping& f, const SystemParams& params);
std::vector<double> grad_mse(const EncoderMapping& f, const SystemParams& params, const SourceGrid& u_grid);

}  // namespace onebit
