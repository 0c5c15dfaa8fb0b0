#include "onebit/elb.hpp"

#include <cmath>

namespace onebit {

namespace {

ElbResult run(const SystemParams& params, double power, OptimizerConfig cfg, const SourceGrid& grid_like,
              Criterion criterion, BoundScheme scheme) {
    params.validate();
    cfg.criterion = criterion;
    ElbResult out;
    out.bound.scheme = scheme;
    out.bound.params_used = params;
    const std::size_t nu = grid_like.size();
    const SourceGrid u_grid = make_grid(params.sigma_u, grid_like.halfwidth_sigmas, nu);
    if (params.perfect_side_info()) {
        std::vector<double> g(nu);
        for (std::size_t j = 0; j < nu; ++j) g[j] = side_info_estimate(params, u_grid.nodes[j]);
        out.composite_decoder = DecoderTable(u_grid, g, g);
        out.bound.value = 0.0;
        return out;
    }
    const SystemParams tp = innovation_params(params);
    const SourceGrid t_grid = make_grid(tp.sigma_v, grid_like.halfwidth_sigmas, grid_like.size());
    out.innovation = solve_for_power(power, tp, cfg, t_grid);
    out.bound.value = out.innovation.criterion_value;

    // With r = 0 the reduced decoder does not depend on u; read t_y at u = 0.
    const std::size_t mid = out.innovation.decoder.g0.size() / 2;
    const double t0 = out.innovation.decoder.g0[mid];
    const double t1 = out.innovation.decoder.g1[mid];
    std::vector<double> g0(nu), g1(nu);
    for (std::size_t j = 0; j < nu; ++j) {
        const double base = side_info_estimate(params, u_grid.nodes[j]);
        g0[j] = base + t0;
        g1[j] = base + t1;
    }
    out.composite_decoder = DecoderTable(u_grid, std::move(g0), std::move(g1));
    return out;
}

}  // namespace

SystemParams innovation_params(const SystemParams& params) {
    SystemParams tp = params;
    tp.sigma_v = params.innovation_sd();
    tp.r = 0.0;
    return tp;
}

ElbResult elb_mse(const SystemParams& params, double power, const OptimizerConfig& cfg, const SourceGrid& grid_like) {
    return run(params, power, cfg, grid_like, Criterion::Mse, BoundScheme::ElbMse);
}

ElbResult elb_dop(const SystemParams& params, double power, const OptimizerConfig& cfg, const SourceGrid& grid_like) {
    return run(params, power, cfg, grid_like, Criterion::Dop, BoundScheme::ElbDop);
}

}  // namespace onebit
