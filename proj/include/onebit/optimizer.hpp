#pragma once

// Gradient descent on the encoder mapping with the decoder re-optimized every step,
// multi-start selection, and the search over the Lagrange weight that meets a power target.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "onebit/baselines.hpp"
#include "onebit/error.hpp"
#include "onebit/model.hpp"
#include "onebit/objective.hpp"

namespace onebit {

/// Initial mapping for a descent.
struct StartSpec {
    enum class Kind { Linear, Plt, Pbt, Mapping };
    Kind kind = Kind::Linear;
    double slope = 0.01;               // Linear
    PltParams plt;                     // Plt
    PbtParams pbt;                     // Pbt
    std::vector<double> values;        // Mapping, sampled on the objective's grid
    std::string label;                 // free-form, reported back in OptimizerReport
    double sign = 1.0;                 // multiplies the materialized mapping

    static StartSpec linear(double slope = 0.01);
    static StartSpec from_plt(const PltParams& p);
    static StartSpec from_pbt(const PbtParams& p);
    static StartSpec from_mapping(std::vector<double> values, std::string label);

    std::vector<double> materialize(const SourceGrid& grid) const;
    std::string describe() const;

private:
    std::vector<double> shape(const SourceGrid& grid) const;
};

struct OptimizerConfig {
    Criterion criterion = Criterion::Mse;
    double step_size = 0.1;
    /// Cap on the step size, which grows by `step_growth` after each accepted step.
    double max_step = 10.0;
    double step_growth = 1.2;
    std::size_t max_iters = 20000;
    /// <= 0 selects the criterion default (1e-5 for MSE, 1e-4 for DOP).
    double grad_tol = 0.0;
    /// Empty: near-zero linear plus, when a power target is known, the best PLT and PBT shapes.
    std::vector<StartSpec> starts;

    double tolerance() const;
    void validate() const;
};

struct LambdaProbe {
    double lambda = 0.0;
    double power = 0.0;
    double lagrangian = 0.0;
};

struct OptimizerReport {
    EncoderMapping mapping;
    DecoderTable decoder;
    double criterion_value = 0.0;
    double power = 0.0;
    double lambda = 0.0;
    double lagrangian = 0.0;
    std::size_t iterations = 0;
    double final_grad_norm = 0.0;
    bool converged = false;
    std::string start_used;
    double source_outage = 0.0;
    /// Set by solve_for_power when the target could not be met within tolerance.
    bool power_warning = false;
    std::vector<LambdaProbe> lambda_trace;
    /// Accepted Lagrangian values, one per accepted step (first entry is the start).
    std::vector<double> lagrangian_trace;
};

/// Raised when the Lagrangian of the starting mapping is not finite.
class DivergedError : public Error {
public:
    DivergedError(const std::string& what, EncoderMapping last) : Error(what), last_(std::move(last)) {}
    const EncoderMapping& last_finite() const { return last_; }

private:
    EncoderMapping last_;
};

/// Single descent from f0 at the objective's lambda.
OptimizerReport descend(const Objective& obj, std::vector<double> f0, const OptimizerConfig& cfg,
                        std::string start_label = "custom");

/// Convenience overload building the objective from the mapping's grid.
OptimizerReport descend(const EncoderMapping& init, const SystemParams& params, const OptimizerConfig& cfg);

/// Descent from every start at fixed lambda; returns the lowest Lagrangian.
/// Without explicit starts, PLT and PBT shapes are fitted to the power reached from the linear start.
OptimizerReport optimize(const Objective& obj, const OptimizerConfig& cfg);

/// Search over log lambda in [1e-6, 1e3] for the mapping whose power is within 1e-3 relative of p_target.
OptimizerReport solve_for_power(double p_target, const Objective& obj, const OptimizerConfig& cfg);
OptimizerReport solve_for_power(double p_target, const SystemParams& params, const OptimizerConfig& cfg,
                                const SourceGrid& v_grid);

/// Twice the median spacing of zero crossings of f within +-3 sigma_v; none with fewer than 3 crossings.
std::optional<double> measure_period(const EncoderMapping& f, double sigma_v);

/// Default source grid for a criterion: 1001 nodes (MSE) or 2001 nodes (DOP) over +-5 sigma_v.
SourceGrid default_grid(Criterion c, double sigma_v);

/// One-line summary record `criterion,lambda,power,value,iters,grad_norm,converged`.
std::string summary_header();
std::string summary_record(const OptimizerReport& rep, Criterion c);

}  // namespace onebit
