#pragma once

// Parameter sweeps over SNR or correlation, reported in the complementary convention
// (1 - distortion or 1 - outage).

#include <iosfwd>
#include <string>
#include <vector>

#include "onebit/model.hpp"
#include "onebit/optimizer.hpp"

namespace onebit {

enum class SweepAxis { Snr, R };

SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis axis);

/// Schemes accepted by `run_sweep`, in output order.
const std::vector<std::string>& known_schemes();

struct SweepSpec {
    Criterion criterion = Criterion::Mse;
    SystemParams base;
    SweepAxis axis = SweepAxis::Snr;
    /// SNR points in dB, or r values.
    std::vector<double> axis_values;
    /// Power used on the r axis.
    double power = 5.0;
    std::vector<std::string> schemes;
    OptimizerConfig optimizer;
    std::size_t grid_n = 0;  // 0: criterion default
    double grid_halfwidth = 5.0;
    unsigned jobs = 1;
};

struct SweepRow {
    double axis_value = 0.0;
    std::string scheme;
    double value = 0.0;  // complementary
    double raw = 0.0;    // distortion or outage
    double power = 0.0;
};

/// 20 points evenly spaced in dB over [-10, 20].
std::vector<double> default_snr_axis();
/// 11 points evenly spaced over [0, 0.95].
std::vector<double> default_r_axis();

/// Validates the scheme list and runs every (point, scheme) pair; rows sorted by axis value then scheme.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace onebit
