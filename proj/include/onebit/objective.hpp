#pragma once

// One interface over the two criteria, used by the descent loop, the parametric
// baseline searches and the sweeps.

#include <memory>
#include <span>
#include <vector>

#include "onebit/dop.hpp"
#include "onebit/model.hpp"
#include "onebit/mse.hpp"

namespace onebit {

struct Evaluation {
    double value = 0.0;  // distortion or outage
    double power = 0.0;
    double lagrangian = 0.0;
    DecoderTable decoder;
    double source_outage = 0.0;  // DOP only
};

class Objective {
public:
    /// Uses the criterion's default u-grid.
    Objective(const SystemParams& params, Criterion criterion, const SourceGrid& v_grid);
    Objective(const SystemParams& params, Criterion criterion, const SourceGrid& v_grid, const SourceGrid& u_grid);

    Criterion criterion() const { return criterion_; }
    const SystemParams& params() const { return params_; }
    const SourceGrid& v_grid() const { return v_grid_; }
    const SourceGrid& u_grid() const;
    void set_lambda(double lambda);

    /// Evaluation with the optimal decoder of f.
    Evaluation evaluate(std::span<const double> f) const;
    Evaluation evaluate(std::span<const double> f, const DecoderTable& g) const;
    /// `evaluate` whose DOP decoder keeps any entry of `hint` that beats the grid search.
    Evaluation evaluate_near(std::span<const double> f, const DecoderTable& hint) const;
    DecoderTable decoder(std::span<const double> f) const;
    std::vector<double> gradient(std::span<const double> f, const DecoderTable& g) const;
    /// Residual of the criterion's necessary condition for optimality.
    std::vector<double> stationarity_residual(std::span<const double> f, const DecoderTable& g) const;

    /// Nodes where the source density exceeds 1e-8; stopping rules and residual checks use these.
    const std::vector<bool>& active_nodes() const { return active_; }
    double active_sup(std::span<const double> x) const;

    const MseProblem* mse() const { return mse_.get(); }
    const DopProblem* dop() const { return dop_.get(); }

private:
    SystemParams params_;
    Criterion criterion_;
    SourceGrid v_grid_;
    std::shared_ptr<MseProblem> mse_;
    std::shared_ptr<DopProblem> dop_;
    std::vector<bool> active_;
};

}  // namespace onebit
