#pragma once

// Reference computations for the tests. Everything here is written independently of
// the library: plain Simpson integration, brute-force scans and long double arithmetic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using ld = long double;

inline ld pdf(ld x) { return std::exp(-0.5L * x * x) / std::sqrt(2.0L * std::numbers::pi_v<ld>); }

// Composite Simpson rule with n (even) panels.
inline ld simpson(const std::function<ld(ld)>& h, ld a, ld b, int n = 2000) {
    if (n % 2) ++n;
    const ld step = (b - a) / n;
    ld acc = h(a) + h(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0L : 2.0L) * h(a + i * step);
    return acc * step / 3.0L;
}

// Q(z) by integrating the density over [z, z + 40] in unit-width Simpson blocks.
inline ld q(ld z) {
    if (z < 0) return 1.0L - q(-z);
    ld acc = 0;
    for (int k = 0; k < 40; ++k) acc += simpson(pdf, z + k, z + k + 1, 4000);
    return acc;
}

inline ld entropy_bits(ld p) {
    auto t = [](ld x) { return x > 0 ? -x * std::log2(x) : 0.0L; };
    return t(p) + t(1 - p);
}

// Pr(a < N(mean, sd^2) < b) in long double.
inline ld interval(ld a, ld b, ld mean, ld sd) {
    if (!(a < b)) return 0;
    const ld s2 = std::sqrt(2.0L);
    return 0.5L * (std::erfc((a - mean) / (sd * s2)) - std::erfc((b - mean) / (sd * s2)));
}

// Uniform grid on [-h sigma, h sigma] with n nodes, as plain numbers.
inline std::vector<ld> nodes(ld sigma, ld h, std::size_t n) {
    std::vector<ld> v(n);
    const ld half = h * sigma;
    for (std::size_t i = 0; i < n; ++i) v[i] = -half + 2.0L * half * i / (n - 1);
    return v;
}

// Probability weights of a grid under N(0, sigma^2): trapezoid times density, tails on the ends.
inline std::vector<ld> prob_weights(const std::vector<ld>& v, ld sigma) {
    const std::size_t n = v.size();
    const ld step = v[1] - v[0];
    std::vector<ld> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = (i == 0 || i + 1 == n ? 0.5L : 1.0L) * step * pdf(v[i] / sigma) / sigma;
    const ld tail = interval(v.back(), INFINITY, 0, sigma);
    w.front() += tail;
    w.back() += tail;
    return w;
}

struct Params {
    ld sv = 1, su = 1, sw = 1, r = 0, lambda = 0, d = 0.09;
};

inline ld bit_prob(int y, ld f, ld sw) {
    const ld z = f / (sw * std::sqrt(2.0L));
    return y == 0 ? 0.5L * std::erfc(-z) : 0.5L * std::erfc(z);
}

// Quadrature MSE Lagrangian with the decoder re-optimized, in long double. The source
// integral is a trapezoid over the nodes plus the exact Gaussian tails of the mapping
// held at its edge values; the side-information integral uses `prob_weights`.
inline ld mse_lagrangian(const std::vector<ld>& v, const std::vector<ld>& f, const std::vector<ld>& u, const Params& p) {
    const std::size_t nv = v.size();
    const ld step = v[1] - v[0];
    const ld sd = p.sv * std::sqrt(1 - p.r * p.r);
    const std::vector<ld> wu = prob_weights(u, p.su);
    std::vector<ld> py[2];
    for (int y = 0; y < 2; ++y) {
        py[y].resize(nv);
        for (std::size_t i = 0; i < nv; ++i) py[y][i] = bit_prob(y, f[i], p.sw);
    }
    ld dist = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const ld m = p.r * p.sv / p.su * u[j];
        ld s0[2] = {0, 0}, s1[2] = {0, 0}, s2[2] = {0, 0};
        for (std::size_t i = 0; i < nv; ++i) {
            const ld k = (i == 0 || i + 1 == nv ? 0.5L : 1.0L) * step * pdf((v[i] - m) / sd) / sd;
            for (int y = 0; y < 2; ++y) {
                s0[y] += k * py[y][i];
                s1[y] += k * py[y][i] * v[i];
                s2[y] += k * py[y][i] * v[i] * v[i];
            }
        }
        // Tails: moments of N(m, sd^2) beyond each edge.
        auto tail = [&](ld a, ld b, ld& t0, ld& t1, ld& t2) {
            const ld za = (a - m) / sd, zb = (b - m) / sd;
            const ld pa = std::isinf(za) ? 0 : pdf(za), pb = std::isinf(zb) ? 0 : pdf(zb);
            const ld za_pa = std::isinf(za) ? 0 : za * pa, zb_pb = std::isinf(zb) ? 0 : zb * pb;
            t0 = interval(a, b, m, sd);
            const ld ez = pa - pb, ez2 = t0 + za_pa - zb_pb;
            t1 = m * t0 + sd * ez;
            t2 = m * m * t0 + 2 * m * sd * ez + sd * sd * ez2;
        };
        ld l0, l1, l2, r0, r1, r2;
        tail(-INFINITY, v.front(), l0, l1, l2);
        tail(v.back(), INFINITY, r0, r1, r2);
        ld inner = 0;
        for (int y = 0; y < 2; ++y) {
            s0[y] += py[y].front() * l0 + py[y].back() * r0;
            s1[y] += py[y].front() * l1 + py[y].back() * r1;
            s2[y] += py[y].front() * l2 + py[y].back() * r2;
            inner += s2[y] - (s0[y] > 0 ? s1[y] * s1[y] / s0[y] : 0);
        }
        dist += wu[j] * inner;
    }
    const std::vector<ld> wv = prob_weights(v, p.sv);
    ld power = 0;
    for (std::size_t i = 0; i < nv; ++i) power += wv[i] * f[i] * f[i];
    return dist + p.lambda * power;
}

// Conditional-mean decoder by Simpson integration of a continuous mapping over v.
inline std::pair<ld, ld> mmse_point(const std::function<ld(ld)>& f, ld u, const Params& p) {
    const ld m = p.r * p.sv / p.su * u;
    const ld sd = p.sv * std::sqrt(1 - p.r * p.r);
    ld out[2];
    for (int y = 0; y < 2; ++y) {
        auto num = [&](ld v) { return v * pdf((v - m) / sd) * bit_prob(y, f(v), p.sw); };
        auto den = [&](ld v) { return pdf((v - m) / sd) * bit_prob(y, f(v), p.sw); };
        const ld a = m - 12 * sd, b = m + 12 * sd;
        out[y] = simpson(num, a, b, 20000) / simpson(den, a, b, 20000);
    }
    return {out[0], out[1]};
}

// DOP outage for a cell-constant mapping (value f[i] on the cell around node v[i], end
// cells unbounded) and a fixed decoder, by exhaustive cell-by-cell integration of the
// raw event (v - g_y)^2 >= D.
inline ld dop_outage(const std::vector<ld>& v, const std::vector<ld>& f, const std::vector<ld>& u,
                     const std::vector<ld>& g0, const std::vector<ld>& g1, const Params& p) {
    const std::size_t nv = v.size();
    const ld sd = p.sv * std::sqrt(1 - p.r * p.r);
    const ld rad = std::sqrt(p.d);
    const std::vector<ld> wu = prob_weights(u, p.su);
    ld eps = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const ld m = p.r * p.sv / p.su * u[j];
        // Outside a window means outage for that bit. Per bit, Pr(V in cell, V outside window).
        ld acc = 0;
        for (std::size_t i = 0; i < nv; ++i) {
            const ld lo = i == 0 ? -INFINITY : 0.5L * (v[i - 1] + v[i]);
            const ld hi = i + 1 == nv ? INFINITY : 0.5L * (v[i] + v[i + 1]);
            const ld cell = interval(lo, hi, m, sd);
            if (cell == 0) continue;
            const ld g[2] = {g0[j], g1[j]};
            for (int y = 0; y < 2; ++y) {
                const ld inside = interval(std::max(lo, g[y] - rad), std::min(hi, g[y] + rad), m, sd);
                acc += bit_prob(y, f[i], p.sw) * (cell - inside);
            }
        }
        eps += wu[j] * acc;
    }
    return eps;
}

// Window objective of the DOP decoder for a piecewise-constant mapping given by a function.
inline ld window(const std::function<ld(ld)>& f, int y, ld u, ld x, const Params& p, int panels = 4000) {
    const ld m = p.r * p.sv / p.su * u;
    const ld sd = p.sv * std::sqrt(1 - p.r * p.r);
    const ld rad = std::sqrt(p.d);
    auto h = [&](ld v) { return pdf((v - m) / sd) / sd * bit_prob(y, f(v), p.sw); };
    // Split at 0 where sign mappings jump.
    if (x - rad < 0 && 0 < x + rad) return simpson(h, x - rad, 0, panels) + simpson(h, 0, x + rad, panels);
    return simpson(h, x - rad, x + rad, panels);
}

}  // namespace oracle
