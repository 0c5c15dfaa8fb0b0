#include "onebit/objective.hpp"

#include <algorithm>
#include <cmath>

#include "onebit/specfun.hpp"

namespace onebit {

namespace {

constexpr double kActiveDensity = 1e-8;

SourceGrid default_u(const SystemParams& params, Criterion c, const SourceGrid& v_grid) {
    return c == Criterion::Mse ? default_u_grid(params, v_grid) : default_dop_u_grid(params, v_grid);
}

}  // namespace

Objective::Objective(const SystemParams& params, Criterion criterion, const SourceGrid& v_grid)
    : Objective(params, criterion, v_grid, default_u(params, criterion, v_grid)) {}

Objective::Objective(const SystemParams& params, Criterion criterion, const SourceGrid& v_grid,
                     const SourceGrid& u_grid)
    : params_(params), criterion_(criterion), v_grid_(v_grid) {
    if (criterion == Criterion::Mse) {
        mse_ = std::make_shared<MseProblem>(params, v_grid, u_grid);
    } else {
        dop_ = std::make_shared<DopProblem>(params, v_grid, u_grid);
    }
    active_.resize(v_grid.size());
    for (std::size_t i = 0; i < v_grid.size(); ++i) {
        active_[i] = normal_pdf(v_grid.nodes[i] / params.sigma_v) / params.sigma_v > kActiveDensity;
    }
}

const SourceGrid& Objective::u_grid() const { return mse_ ? mse_->u_grid() : dop_->u_grid(); }

void Objective::set_lambda(double lambda) {
    params_.lambda = lambda;
    // Problems are shared between copies; give this copy its own before mutating.
    if (mse_) {
        mse_ = std::make_shared<MseProblem>(*mse_);
        mse_->set_lambda(lambda);
    } else {
        dop_ = std::make_shared<DopProblem>(*dop_);
        dop_->set_lambda(lambda);
    }
}

Evaluation Objective::evaluate(std::span<const double> f) const {
    Evaluation out;
    if (mse_) {
        MseEval e = mse_->evaluate(f);
        out.value = e.distortion;
        out.power = e.power;
        out.lagrangian = e.lagrangian;
        out.decoder = std::move(e.decoder);
    } else {
        DopEval e = dop_->evaluate(f);
        out.value = e.outage;
        out.power = e.power;
        out.lagrangian = e.lagrangian;
        out.decoder = std::move(e.decoder);
        out.source_outage = e.source_outage;
    }
    return out;
}

Evaluation Objective::evaluate(std::span<const double> f, const DecoderTable& g) const {
    Evaluation out;
    if (mse_) {
        MseEval e = mse_->evaluate(f, g);
        out.value = e.distortion;
        out.power = e.power;
        out.lagrangian = e.lagrangian;
        out.decoder = std::move(e.decoder);
    } else {
        DopEval e = dop_->evaluate(f, g);
        out.value = e.outage;
        out.power = e.power;
        out.lagrangian = e.lagrangian;
        out.decoder = std::move(e.decoder);
        out.source_outage = e.source_outage;
    }
    return out;
}

Evaluation Objective::evaluate_near(std::span<const double> f, const DecoderTable& hint) const {
    if (mse_) return evaluate(f);
    return evaluate(f, dop_->decoder(f, &hint));
}

DecoderTable Objective::decoder(std::span<const double> f) const {
    return mse_ ? mse_->decoder(f) : dop_->decoder(f);
}

std::vector<double> Objective::gradient(std::span<const double> f, const DecoderTable& g) const {
    return mse_ ? mse_->gradient(f, g) : dop_->gradient(f, g);
}

std::vector<double> Objective::stationarity_residual(std::span<const double> f, const DecoderTable& g) const {
    return mse_ ? mse_->stationarity_residual(f, g) : dop_->stationarity_residual(f, g);
}

double Objective::active_sup(std::span<const double> x) const {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (active_[i]) m = std::max(m, std::abs(x[i]));
    }
    return m;
}

}  // namespace onebit
