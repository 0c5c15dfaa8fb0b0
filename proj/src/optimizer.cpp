#include "onebit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace onebit {

namespace {

constexpr double kLambdaMin = 1e-6;
constexpr double kLambdaMax = 1e3;
constexpr double kPowerRelTol = 1e-3;
constexpr int kMaxProbes = 40;
constexpr int kMaxRounds = 3;
// Descent gives up when the Lagrangian drops by less than kStallDecrease over kStallWindow iterations.
constexpr std::size_t kStallWindow = 200;
constexpr double kStallDecrease = 1e-12;
constexpr double kMinStep = 1e-14;
// Steps whose Lagrangian rises by less than this are accepted: improvements at tail nodes are
// below the rounding error of the Lagrangian itself.
constexpr double kAcceptSlack = 1e-13;
constexpr double kZeroFraction = 1e-9;

bool better(const OptimizerReport& a, const OptimizerReport& b) { return a.lagrangian < b.lagrangian; }

}  // namespace

StartSpec StartSpec::linear(double slope) {
    StartSpec s;
    s.kind = Kind::Linear;
    s.slope = slope;
    return s;
}

StartSpec StartSpec::from_plt(const PltParams& p) {
    StartSpec s;
    s.kind = Kind::Plt;
    s.plt = p;
    return s;
}

StartSpec StartSpec::from_pbt(const PbtParams& p) {
    StartSpec s;
    s.kind = Kind::Pbt;
    s.pbt = p;
    return s;
}

StartSpec StartSpec::from_mapping(std::vector<double> values, std::string label) {
    StartSpec s;
    s.kind = Kind::Mapping;
    s.values = std::move(values);
    s.label = std::move(label);
    return s;
}

std::vector<double> StartSpec::materialize(const SourceGrid& grid) const {
    std::vector<double> f = shape(grid);
    if (sign != 1.0) {
        for (double& x : f) x *= sign;
    }
    return f;
}

std::vector<double> StartSpec::shape(const SourceGrid& grid) const {
    switch (kind) {
        case Kind::Linear: {
            std::vector<double> f(grid.size());
            for (std::size_t i = 0; i < f.size(); ++i) f[i] = slope * grid.nodes[i];
            return f;
        }
        case Kind::Plt: return plt_mapping(plt, grid).values;
        case Kind::Pbt: return pbt_mapping(pbt, grid).values;
        case Kind::Mapping:
            if (values.size() != grid.size()) throw ConfigError("start mapping does not match the grid");
            return values;
    }
    return {};
}

std::string StartSpec::describe() const {
    if (!label.empty()) return label;
    std::ostringstream os;
    os.precision(6);
    if (sign < 0.0) os << '-';
    switch (kind) {
        case Kind::Linear: os << "linear(slope=" << slope << ")"; break;
        case Kind::Plt: os << "plt(alpha=" << plt.alpha << ",beta=" << plt.beta << ")"; break;
        case Kind::Pbt: os << "pbt(gamma=" << pbt.level << ",delta=" << pbt.delta << ")"; break;
        case Kind::Mapping: os << "mapping"; break;
    }
    return os.str();
}

double OptimizerConfig::tolerance() const {
    if (grad_tol > 0.0) return grad_tol;
    return criterion == Criterion::Mse ? 1e-5 : 1e-4;
}

void OptimizerConfig::validate() const {
    if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("step size must be > 0");
    if (!(max_step >= step_size)) throw ConfigError("max step must be >= step size");
    if (!(step_growth >= 1.0)) throw ConfigError("step growth must be >= 1");
    if (max_iters < 1) throw ConfigError("max iterations must be >= 1");
    if (!(grad_tol >= 0.0) || !std::isfinite(grad_tol)) throw ConfigError("gradient tolerance must be >= 0");
}

SourceGrid default_grid(Criterion c, double sigma_v) {
    return make_grid(sigma_v, 5.0, c == Criterion::Mse ? 1001 : 2001);
}

OptimizerReport descend(const Objective& obj, std::vector<double> f, const OptimizerConfig& cfg,
                        std::string start_label) {
    cfg.validate();
    const SourceGrid& grid = obj.v_grid();
    if (f.size() != grid.size()) throw ConfigError("initial mapping does not match the objective grid");
    const double tol = cfg.tolerance();

    OptimizerReport rep;
    rep.lambda = obj.params().lambda;
    rep.start_used = std::move(start_label);

    if (obj.params().perfect_side_info()) {
        // The side information determines the source; spending power cannot help.
        std::fill(f.begin(), f.end(), 0.0);
        Evaluation e = obj.evaluate(f);
        rep.mapping = EncoderMapping(grid, std::move(f));
        rep.decoder = std::move(e.decoder);
        rep.criterion_value = e.value;
        rep.power = e.power;
        rep.lagrangian = e.lagrangian;
        rep.source_outage = e.source_outage;
        rep.converged = true;
        rep.lagrangian_trace.push_back(e.lagrangian);
        return rep;
    }

    Evaluation cur = obj.evaluate(f);
    if (!std::isfinite(cur.lagrangian)) {
        throw DivergedError("Lagrangian of the initial mapping is not finite", EncoderMapping(grid, f));
    }
    std::vector<double> grad = obj.gradient(f, cur.decoder);
    double gnorm = obj.active_sup(grad);
    double mu = cfg.step_size;
    rep.lagrangian_trace.push_back(cur.lagrangian);

    std::vector<double> trial(f.size());
    std::size_t it = 0;
    std::size_t stall_it = 0;
    double stall_l = cur.lagrangian;
    while (gnorm > tol && it < cfg.max_iters) {
        ++it;
        if (it - stall_it >= kStallWindow) {
            if (stall_l - cur.lagrangian < kStallDecrease) break;
            stall_it = it;
            stall_l = cur.lagrangian;
        }
        for (std::size_t i = 0; i < f.size(); ++i) trial[i] = f[i] - mu * grad[i];
        Evaluation next = obj.evaluate_near(trial, cur.decoder);
        if (std::isfinite(next.lagrangian) && next.lagrangian <= cur.lagrangian + kAcceptSlack) {
            f.swap(trial);
            cur = std::move(next);
            grad = obj.gradient(f, cur.decoder);
            gnorm = obj.active_sup(grad);
            mu = std::min(mu * cfg.step_growth, cfg.max_step);
            rep.lagrangian_trace.push_back(cur.lagrangian);
        } else {
            mu *= 0.5;
            if (mu < kMinStep) break;
        }
    }

    rep.iterations = it;
    rep.final_grad_norm = gnorm;
    rep.converged = gnorm <= tol;
    rep.criterion_value = cur.value;
    rep.power = cur.power;
    rep.lagrangian = cur.lagrangian;
    rep.source_outage = cur.source_outage;
    rep.decoder = std::move(cur.decoder);
    rep.mapping = EncoderMapping(grid, std::move(f));
    return rep;
}

OptimizerReport descend(const EncoderMapping& init, const SystemParams& params, const OptimizerConfig& cfg) {
    Objective obj(params, cfg.criterion, init.grid);
    return descend(obj, init.values, cfg, "custom");
}

namespace {

OptimizerReport run_starts(const Objective& obj, const OptimizerConfig& cfg, const std::vector<StartSpec>& starts,
                           const OptimizerReport* incumbent) {
    std::optional<OptimizerReport> best;
    if (incumbent) {
        best = descend(obj, incumbent->mapping.values, cfg, incumbent->start_used);
    }
    for (const StartSpec& s : starts) {
        OptimizerReport r = descend(obj, s.materialize(obj.v_grid()), cfg, s.describe());
        if (!best || better(r, *best)) best = std::move(r);
    }
    return std::move(*best);
}

std::vector<StartSpec> shape_starts(const Objective& obj, double power) {
    std::vector<StartSpec> out;
    if (!(power > 0.0)) return out;
    const SchemeResult plt = best_plt(obj, power);
    const SchemeResult pbt = best_pbt(obj, power);
    // The sawtooth falls through the origin; mirror it so every start rises there.
    out.push_back(StartSpec::from_plt(PltParams{plt.scale, plt.shape}));
    out.back().sign = -1.0;
    out.push_back(StartSpec::from_pbt(PbtParams{pbt.scale, pbt.shape}));
    return out;
}

}  // namespace

OptimizerReport optimize(const Objective& obj, const OptimizerConfig& cfg) {
    if (!cfg.starts.empty()) return run_starts(obj, cfg, cfg.starts, nullptr);
    const StartSpec lin = StartSpec::linear();
    OptimizerReport best = descend(obj, lin.materialize(obj.v_grid()), cfg, lin.describe());
    if (obj.params().perfect_side_info()) return best;
    for (const StartSpec& s : shape_starts(obj, best.power)) {
        OptimizerReport r = descend(obj, s.materialize(obj.v_grid()), cfg, s.describe());
        if (better(r, best)) best = std::move(r);
    }
    return best;
}

OptimizerReport solve_for_power(double p_target, const Objective& base, const OptimizerConfig& cfg) {
    if (!(p_target > 0.0) || !std::isfinite(p_target)) throw ConfigError("power target must be > 0");
    cfg.validate();
    if (base.params().perfect_side_info()) {
        Objective obj = base;
        obj.set_lambda(kLambdaMin);
        OptimizerReport r = descend(obj, std::vector<double>(obj.v_grid().size(), 0.0), cfg, "zero");
        r.power_warning = true;
        return r;
    }

    std::vector<StartSpec> cold = cfg.starts;
    if (cold.empty()) {
        cold.push_back(StartSpec::linear());
        for (StartSpec& s : shape_starts(base, p_target)) cold.push_back(std::move(s));
    }

    const double log_lo = std::log(kLambdaMin), log_hi = std::log(kLambdaMax);
    const double log_target = std::log(p_target);
    auto within = [&](double p) { return std::abs(p - p_target) <= kPowerRelTol * p_target; };
    auto log_power = [&](double p) { return std::log(std::max(p, 1e-300)); };

    std::vector<LambdaProbe> trace;
    std::optional<OptimizerReport> nearest;  // closest power to the target seen so far
    std::optional<OptimizerReport> best;     // lowest criterion value among probes meeting the target
    auto record = [&](const OptimizerReport& r) {
        trace.push_back({r.lambda, r.power, r.lagrangian});
        if (!nearest || std::abs(r.power - p_target) < std::abs(nearest->power - p_target)) nearest = r;
        if (within(r.power) && (!best || r.criterion_value < best->criterion_value)) best = r;
    };
    auto probe = [&](double log_lambda, const OptimizerReport* warm, bool with_cold) {
        Objective obj = base;
        obj.set_lambda(std::exp(log_lambda));
        static const std::vector<StartSpec> none;
        OptimizerReport r = run_starts(obj, cfg, with_cold ? cold : none, warm);
        record(r);
        return r;
    };

    // First guess: power roughly inversely proportional to lambda around the operating point.
    double x = std::clamp(std::log(0.05 / p_target), log_lo, log_hi);
    OptimizerReport incumbent = probe(x, nullptr, true);
    int probes = 1;
    for (int round = 0; round < kMaxRounds; ++round) {
        x = std::log(incumbent.lambda);
        // Safeguarded secant on log power versus log lambda. `a` keeps the power above
        // the target and `b` below it once both sides have been seen.
        std::optional<double> a, b;
        std::optional<double> px, pf;
        double last_width = std::numeric_limits<double>::infinity();
        while (!within(incumbent.power) && probes < kMaxProbes) {
            const double fx = incumbent.power > 0.0 ? log_power(incumbent.power) - log_target : -1e3;
            if (fx > 0.0) {
                a = x;
            } else {
                b = x;
            }
            // Without a usable slope assume power ~ 1/lambda.
            double slope = -1.0;
            if (px && *px != x) {
                const double s = (fx - *pf) / (x - *px);
                if (std::isfinite(s) && s < 0.0) slope = s;
            }
            double nx = x + std::clamp(-fx / slope, -3.0, 3.0);
            if (a && b) {
                const double lo = std::min(*a, *b), hi = std::max(*a, *b);
                const double width = hi - lo;
                if (width < 1e-10) break;
                const double margin = 0.01 * width;
                const bool stalled = width > 0.5 * last_width;
                if (stalled || !(nx > lo + margin && nx < hi - margin)) nx = 0.5 * (lo + hi);
                last_width = width;
            }
            nx = std::clamp(nx, log_lo, log_hi);
            if (nx == x) break;  // target unreachable inside the lambda range
            px = x;
            pf = fx;
            OptimizerReport r = probe(nx, &incumbent, false);
            ++probes;
            x = nx;
            const bool frozen = std::abs(r.power - incumbent.power) <= 1e-9 * p_target;
            incumbent = std::move(r);
            // A warm start that is already stationary at the new lambda carries no slope information.
            if (frozen) break;
        }
        if (!within(incumbent.power)) break;
        // Verify against cold starts at the accepted lambda.
        Objective obj = base;
        obj.set_lambda(incumbent.lambda);
        OptimizerReport challenger = run_starts(obj, cfg, cold, nullptr);
        ++probes;
        record(challenger);
        if (!(challenger.lagrangian < incumbent.lagrangian - 1e-12)) break;
        incumbent = std::move(challenger);
        if (within(incumbent.power)) break;
    }

    OptimizerReport out = best ? std::move(*best) : std::move(*nearest);
    out.power_warning = !within(out.power);
    out.lambda_trace = std::move(trace);
    return out;
}

OptimizerReport solve_for_power(double p_target, const SystemParams& params, const OptimizerConfig& cfg,
                                const SourceGrid& v_grid) {
    return solve_for_power(p_target, Objective(params, cfg.criterion, v_grid), cfg);
}

std::optional<double> measure_period(const EncoderMapping& f, double sigma_v) {
    const auto& v = f.grid.nodes;
    const auto& y = f.values;
    double peak = 0.0;
    for (double a : y) peak = std::max(peak, std::abs(a));
    if (!(peak > 0.0)) return std::nullopt;
    const double zero = kZeroFraction * peak;
    const double window = 3.0 * sigma_v;

    std::vector<double> crossings;
    std::optional<std::size_t> last;  // last node inside the window with a clearly nonzero value
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > window || std::abs(y[i]) <= zero) continue;
        if (last && (y[*last] > 0.0) != (y[i] > 0.0)) {
            const double t = y[*last] / (y[*last] - y[i]);
            crossings.push_back(v[*last] + t * (v[i] - v[*last]));
        }
        last = i;
    }
    if (crossings.size() < 3) return std::nullopt;
    std::vector<double> gaps(crossings.size() - 1);
    for (std::size_t k = 0; k + 1 < crossings.size(); ++k) gaps[k] = crossings[k + 1] - crossings[k];
    std::sort(gaps.begin(), gaps.end());
    const std::size_t m = gaps.size();
    const double median = m % 2 == 1 ? gaps[m / 2] : 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]);
    return 2.0 * median;
}

std::string summary_header() { return "criterion,lambda,power,value,iters,grad_norm,converged"; }

std::string summary_record(const OptimizerReport& rep, Criterion c) {
    std::ostringstream os;
    os.precision(17);
    os << to_string(c) << ',' << rep.lambda << ',' << rep.power << ',' << rep.criterion_value << ','
       << rep.iterations << ',' << rep.final_grad_norm << ',' << (rep.converged ? 1 : 0);
    return os.str();
}

}  // namespace onebit
