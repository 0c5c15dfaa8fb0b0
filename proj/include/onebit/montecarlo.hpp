#pragma once

// Sampling oracle: draws (V, U, W), pushes V through the encoder, the channel and the
// one-bit ADC, decodes with the table, and averages the criterion.

#include <cstddef>
#include <cstdint>
#include <string>

#include "onebit/model.hpp"

namespace onebit {

struct SimResult {
    std::size_t n_samples = 0;
    double empirical_value = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
    Criterion criterion = Criterion::Mse;
};

struct SimOptions {
    /// Worker threads. Results depend on `shards`, never on `jobs`.
    unsigned jobs = 1;
    /// Shard k draws its samples from a generator seeded with seed + k.
    unsigned shards = 16;
    /// Encode the innovation V - E[V | U] instead of V (side information at the encoder too).
    bool encoder_side_info = false;
};

/// Throws ConfigError for n == 0.
SimResult simulate(const EncoderMapping& f, const DecoderTable& g, const SystemParams& params, Criterion criterion,
                   std::size_t n, std::uint64_t seed, const SimOptions& options = {});

/// `seed,n,criterion,empirical,std_error`
std::string sim_header();
std::string sim_record(const SimResult& r);

}  // namespace onebit
