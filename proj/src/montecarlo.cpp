#include "onebit/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "onebit/error.hpp"

namespace onebit {

namespace {

struct ShardSums {
    double sum = 0.0;
    double sum_sq = 0.0;
};

ShardSums run_shard(const EncoderMapping& f, const DecoderTable& g, const SystemParams& p, Criterion criterion,
                    std::size_t count, std::uint64_t seed, bool encoder_side_info) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double rho = p.r;
    const double innov = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    ShardSums s;
    for (std::size_t k = 0; k < count; ++k) {
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        const double z3 = normal(rng);
        const double v = p.sigma_v * (rho * z1 + innov * z2);
        const double u = p.sigma_u * z1;
        const double w = p.sigma_w * z3;
        const double x = encoder_side_info ? v - side_info_estimate(p, u) : v;
        const int y = quantize(f.at(x) + w);
        const double vhat = g.at(y, u);
        const double e2 = (v - vhat) * (v - vhat);
        const double val = criterion == Criterion::Mse ? e2 : (e2 >= p.d_target ? 1.0 : 0.0);
        s.sum += val;
        s.sum_sq += val * val;
    }
    return s;
}

}  // namespace

SimResult simulate(const EncoderMapping& f, const DecoderTable& g, const SystemParams& params, Criterion criterion,
                   std::size_t n, std::uint64_t seed, const SimOptions& options) {
    params.validate();
    if (n == 0) throw ConfigError("sample count must be >= 1");
    const unsigned shards = std::max(1u, options.shards);
    std::vector<ShardSums> sums(shards);
    auto shard_size = [&](unsigned k) { return n / shards + (k < n % shards ? 1 : 0); };
    auto work = [&](unsigned k) {
        sums[k] = run_shard(f, g, params, criterion, shard_size(k), seed + k, options.encoder_side_info);
    };
    const unsigned jobs = std::clamp(options.jobs, 1u, shards);
    if (jobs == 1) {
        for (unsigned k = 0; k < shards; ++k) work(k);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) {
            pool.emplace_back([&, t] {
                for (unsigned k = t; k < shards; k += jobs) work(k);
            });
        }
        for (auto& th : pool) th.join();
    }
    double sum = 0.0, sum_sq = 0.0;
    for (const ShardSums& s : sums) {
        sum += s.sum;
        sum_sq += s.sum_sq;
    }
    const double dn = static_cast<double>(n);
    const double mean = sum / dn;
    SimResult r;
    r.n_samples = n;
    r.seed = seed;
    r.criterion = criterion;
    r.empirical_value = mean;
    if (criterion == Criterion::Dop) {
        r.std_error = std::sqrt(mean * (1.0 - mean) / dn);
    } else if (n > 1) {
        const double var = std::max(0.0, (sum_sq - dn * mean * mean) / (dn - 1.0));
        r.std_error = std::sqrt(var / dn);
    }
    return r;
}

std::string sim_header() { return "seed,n,criterion,empirical,std_error"; }

std::string sim_record(const SimResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << r.seed << ',' << r.n_samples << ',' << to_string(r.criterion) << ',' << r.empirical_value << ','
       << r.std_error;
    return os.str();
}

}  // namespace onebit
