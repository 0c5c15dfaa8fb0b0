#include "onebit/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "onebit/baselines.hpp"
#include "onebit/elb.hpp"
#include "onebit/error.hpp"

namespace onebit {

namespace {

std::string format(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

struct Task {
    double axis_value;
    std::string scheme;
};

SweepRow run_point(const SweepSpec& spec, const Task& task) {
    SystemParams p = spec.base;
    double power = spec.power;
    if (spec.axis == SweepAxis::Snr) {
        power = p.sigma_w * p.sigma_w * std::pow(10.0, task.axis_value / 10.0);
    } else {
        p.r = task.axis_value;
    }
    p.validate();
    const std::size_t n = spec.grid_n ? spec.grid_n : default_grid(spec.criterion, p.sigma_v).size();
    const SourceGrid grid = make_grid(p.sigma_v, spec.grid_halfwidth, n);
    OptimizerConfig cfg = spec.optimizer;
    cfg.criterion = spec.criterion;

    SweepRow row;
    row.axis_value = task.axis_value;
    row.scheme = task.scheme;
    row.power = power;
    const std::string& s = task.scheme;
    if (s == "slb") {
        row.raw = slb(p, power / (p.sigma_w * p.sigma_w)).value;
    } else if (s == "elb") {
        row.raw = spec.criterion == Criterion::Mse ? elb_mse(p, power, cfg, grid).bound.value
                                                    : elb_dop(p, power, cfg, grid).bound.value;
    } else if (s == "noe") {
        const OptimizerReport rep = solve_for_power(power, p, cfg, grid);
        row.raw = rep.criterion_value;
        row.power = rep.power;
    } else {
        const Objective obj(p, spec.criterion, grid);
        row.raw = (s == "plt" ? best_plt(obj, power) : best_pbt(obj, power)).eval.value;
    }
    row.value = 1.0 - row.raw;
    return row;
}

}  // namespace

SweepAxis parse_axis(const std::string& name) {
    if (name == "snr") return SweepAxis::Snr;
    if (name == "r") return SweepAxis::R;
    throw ConfigError("unknown sweep axis '" + name + "' (expected snr or r)");
}

std::string to_string(SweepAxis axis) { return axis == SweepAxis::Snr ? "snr" : "r"; }

const std::vector<std::string>& known_schemes() {
    static const std::vector<std::string> s{"elb", "noe", "pbt", "plt", "slb"};
    return s;
}

std::vector<double> default_snr_axis() {
    std::vector<double> x(20);
    for (int i = 0; i < 20; ++i) x[i] = -10.0 + 30.0 * i / 19.0;
    return x;
}

std::vector<double> default_r_axis() {
    std::vector<double> x(11);
    for (int i = 0; i < 11; ++i) x[i] = 0.95 * i / 10.0;
    return x;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    if (spec.schemes.empty()) throw ConfigError("no schemes requested");
    for (const std::string& s : spec.schemes) {
        if (std::find(known_schemes().begin(), known_schemes().end(), s) == known_schemes().end()) {
            throw ConfigError("unknown scheme '" + s + "' (expected noe, plt, pbt, slb or elb)");
        }
        if (s == "slb" && spec.criterion != Criterion::Mse) {
            throw ConfigError("scheme 'slb' is a distortion bound and needs --criterion mse");
        }
    }
    if (spec.axis_values.empty()) throw ConfigError("sweep axis has no points");

    std::vector<Task> tasks;
    for (double x : spec.axis_values) {
        for (const std::string& s : spec.schemes) tasks.push_back({x, s});
    }
    std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
        return a.axis_value != b.axis_value ? a.axis_value < b.axis_value : a.scheme < b.scheme;
    });
    tasks.erase(std::unique(tasks.begin(), tasks.end(),
                            [](const Task& a, const Task& b) {
                                return a.axis_value == b.axis_value && a.scheme == b.scheme;
                            }),
                tasks.end());

    std::vector<SweepRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k; (k = next++) < tasks.size();) {
            try {
                rows[k] = run_point(spec, tasks[k]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(tasks.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "axis_value,scheme,value\n";
    for (const SweepRow& r : rows) os << format(r.axis_value) << ',' << r.scheme << ',' << format(r.value) << '\n';
}

}  // namespace onebit
