#pragma once

// Encoder lower bounds: side information at the encoder as well, so the encoder maps the
// innovation T = V - E[V | U] and the problem reduces to one without side information on
// a source of std sigma_v sqrt(1 - r^2).

#include "onebit/baselines.hpp"
#include "onebit/optimizer.hpp"

namespace onebit {

struct ElbResult {
    BoundReport bound;
    /// Optimized mapping of the innovation and its decoder (r = 0 problem).
    OptimizerReport innovation;
    /// Composite decoder on the original u-grid: E[V | U = u] + t_y.
    DecoderTable composite_decoder;
};

/// Parameters of the reduced problem: sigma_v -> sigma_v sqrt(1 - r^2), r -> 0.
SystemParams innovation_params(const SystemParams& params);

/// MSE with the encoder informed; 0 for r = +-1. Grid node count and halfwidth follow `grid_like`.
ElbResult elb_mse(const SystemParams& params, double power, const OptimizerConfig& cfg, const SourceGrid& grid_like);

/// DOP with the encoder informed. The composite scheme's outage equals the outage of the
/// reduced problem with reconstruction points t_0, t_1; 0 for r = +-1.
ElbResult elb_dop(const SystemParams& params, double power, const OptimizerConfig& cfg, const SourceGrid& grid_like);

}  // namespace onebit
