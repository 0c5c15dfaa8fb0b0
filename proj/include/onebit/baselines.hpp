#pragma once

// Parametric reference encoders (periodic linear and periodic binary), their
// parameter searches under a power constraint, and the Shannon lower bound.

#include <string>
#include <vector>

#include "onebit/model.hpp"
#include "onebit/objective.hpp"

namespace onebit {

/// Sawtooth with slope magnitude alpha and segment width beta.
struct PltParams {
    double alpha = 1.0;
    double beta = 1.0;
};

/// Square wave of level +-gamma that flips sign every delta / 2.
struct PbtParams {
    double level = 1.0;
    double delta = 1.0;
};

EncoderMapping plt_mapping(const PltParams& p, const SourceGrid& grid);
double plt_value(const PltParams& p, double v);

/// E[f_PLT(V)^2] for V ~ N(0, sigma_v^2) by the segment series, |i| <= ceil(10 sigma_v / beta) + 2.
double plt_power(const PltParams& p, double sigma_v);

EncoderMapping pbt_mapping(const PbtParams& p, const SourceGrid& grid);
double pbt_value(const PbtParams& p, double v);

enum class BoundScheme { Slb, ElbMse, ElbDop };

struct BoundReport {
    double value = 0.0;
    BoundScheme scheme = BoundScheme::Slb;
    SystemParams params_used;
};

/// Capacity of the AWGN channel with a one-bit ADC, 1 - h(Q(sqrt(snr))) bits per use.
double one_bit_capacity(double snr);

/// (1 - r^2) sigma_v^2 2^{-2C}: Wyner-Ziv rate-distortion evaluated at the one-bit capacity.
BoundReport slb(const SystemParams& params, double snr);

/// Best member of a parametric family at a fixed average power.
struct SchemeResult {
    EncoderMapping mapping;
    Evaluation eval;
    double shape = 0.0;  // beta for PLT, delta for PBT
    double scale = 0.0;  // alpha for PLT, gamma for PBT
};

/// Minimizes the objective's criterion over beta with alpha scaled so that plt_power = power.
SchemeResult best_plt(const Objective& obj, double power);

/// Minimizes the objective's criterion over delta with gamma = sqrt(power).
SchemeResult best_pbt(const Objective& obj, double power);

}  // namespace onebit
