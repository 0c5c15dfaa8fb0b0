#pragma once

// System parameters, discretization grids, encoder mappings, decoder tables and the
// average-power functional shared by the MSE and DOP criteria.
//
// Mappings are sampled on a uniform grid. Outside the grid a mapping is extended by
// its edge value, and every quadrature in the library integrates the Gaussian tails of
// that clamped extension analytically, so the probability weights of a grid sum to one.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace onebit {

enum class Criterion { Mse, Dop };

std::string to_string(Criterion c);
/// Accepts "mse" or "dop"; throws ConfigError otherwise.
Criterion parse_criterion(std::string_view name);

struct SystemParams {
    double sigma_v = 1.0;   // source std
    double sigma_u = 1.0;   // side-information std
    double sigma_w = 1.0;   // channel noise std
    double r = 0.0;         // source/side-information correlation
    double lambda = 0.0;    // Lagrange weight on average power
    double d_target = 0.09; // DOP distortion target D (unused by MSE)

    /// Throws ConfigError if any field violates its range.
    void validate() const;

    /// r = +-1: the side information determines the source.
    bool perfect_side_info() const;

    /// Std of the innovation V - E[V|U], sigma_v * sqrt(1 - r^2).
    double innovation_sd() const;
};

/// Uniform grid on [-h*sigma, h*sigma] with trapezoidal weights. The node count is
/// odd so that 0 is a node.
struct SourceGrid {
    double sigma = 1.0;
    double halfwidth_sigmas = 5.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double spacing() const { return nodes[1] - nodes[0]; }
    double lo() const { return nodes.front(); }
    double hi() const { return nodes.back(); }

    /// Normal probability mass beyond one edge of the grid, Q(halfwidth).
    double tail_mass() const;

    /// w_i * density(v_i), with the tail mass beyond each edge added to the edge node.
    /// These are the weights of E[h(V)] for h clamped outside the grid.
    std::vector<double> probability_weights() const;

    /// Index of the node closest to x, clamped to the grid.
    std::size_t nearest(double x) const;
};

/// Throws ConfigError unless n >= 3 is odd, sigma > 0 and halfwidth >= 4.
SourceGrid make_grid(double sigma, double halfwidth_sigmas, std::size_t n);

struct EncoderMapping {
    SourceGrid grid;
    std::vector<double> values;

    EncoderMapping() = default;
    EncoderMapping(SourceGrid g, std::vector<double> f);

    /// f(x) by linear interpolation between nodes, clamped outside the grid.
    double at(double x) const;
};

/// f == 0 on the grid.
EncoderMapping zero_mapping(const SourceGrid& grid);

struct DecoderTable {
    SourceGrid u_grid;
    std::vector<double> g0;  // reconstruction for Y = 0
    std::vector<double> g1;  // reconstruction for Y = 1
    /// Entries that fell back to the side-information-only estimate (diagnostics).
    std::size_t fallback_count = 0;

    DecoderTable() = default;
    DecoderTable(SourceGrid g, std::vector<double> y0, std::vector<double> y1);

    const std::vector<double>& for_bit(int y) const { return y == 0 ? g0 : g1; }

    /// g(y, u) by linear interpolation in u, clamped outside the grid.
    double at(int y, double u) const;
};

/// E[f(V)^2] for V ~ N(0, sigma_v^2), by quadrature over the mapping's grid.
double average_power(const EncoderMapping& f, const SystemParams& params);

/// One-bit ADC: 0 for z >= 0, 1 otherwise.
inline int quantize(double z) { return z >= 0.0 ? 0 : 1; }

/// Linear interpolation of samples on a uniform grid, clamped at both ends.
double interpolate_clamped(const SourceGrid& grid, std::span<const double> values, double x);

/// Side-information-only estimate (r sigma_v / sigma_u) u.
double side_info_estimate(const SystemParams& params, double u);

}  // namespace onebit
