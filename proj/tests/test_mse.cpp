#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "onebit/error.hpp"
#include "onebit/model.hpp"
#include "onebit/mse.hpp"
#include "oracles.hpp"

using namespace onebit;
using Catch::Approx;

namespace {

std::vector<double> sample(const SourceGrid& g, double (*fn)(double)) {
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(g.nodes[i]);
    return f;
}

}  // namespace

TEST_CASE("zero encoder leaves only the side information") {
    for (double r : {0.0, 0.3, 0.8, -0.6}) {
        SystemParams p;
        p.r = r;
        const SourceGrid g = make_grid(1.0, 5.0, 1001);
        MseProblem prob(p, g, default_u_grid(p, g));
        const MseEval e = prob.evaluate(std::vector<double>(g.size(), 0.0));
        CHECK(e.distortion == Approx(1.0 - r * r).margin(1e-6));
        CHECK(e.power == 0.0);
        for (std::size_t j = 0; j < e.decoder.u_grid.size(); ++j) {
            const double u = e.decoder.u_grid.nodes[j];
            if (std::abs(u) > 3.0) continue;
            CHECK(e.decoder.g0[j] == Approx(side_info_estimate(p, u)).margin(1e-8));
            CHECK(e.decoder.g1[j] == Approx(side_info_estimate(p, u)).margin(1e-8));
        }
    }
}

TEST_CASE("MMSE decoder matches direct conditional means") {
    oracle::Params op;
    op.r = 0.6;
    SystemParams p;
    p.r = 0.6;
    const SourceGrid g = make_grid(1.0, 6.0, 1201);
    const auto f = sample(g, [](double v) { return std::tanh(2.0 * v) + 0.3 * std::sin(v); });
    MseProblem prob(p, g, g);
    const DecoderTable d = prob.decoder(f);
    auto fc = [](oracle::ld v) { return std::tanh(2.0L * v) + 0.3L * std::sin(v); };
    for (std::size_t j : {300u, 550u, 600u, 700u, 900u}) {
        const auto [m0, m1] = oracle::mmse_point(fc, g.nodes[j], op);
        CHECK(d.g0[j] == Approx(static_cast<double>(m0)).margin(1e-6));
        CHECK(d.g1[j] == Approx(static_cast<double>(m1)).margin(1e-6));
    }
}

TEST_CASE("estimation error is orthogonal to decoder perturbations") {
    SystemParams p;
    p.r = 0.5;
    const SourceGrid g = make_grid(1.0, 5.0, 401);
    MseProblem prob(p, g, g);
    const auto f = sample(g, [](double v) { return std::sin(3.0 * v); });
    const MseEval base = prob.evaluate(f);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 5; ++trial) {
        DecoderTable plus = base.decoder, minus = base.decoder;
        const double t = 0.05;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double h0 = n01(rng), h1 = n01(rng);
            plus.g0[j] += t * h0;
            plus.g1[j] += t * h1;
            minus.g0[j] -= t * h0;
            minus.g1[j] -= t * h1;
        }
        const double dp = prob.evaluate(f, plus).distortion;
        const double dm = prob.evaluate(f, minus).distortion;
        // Any perturbation increases the distortion, and the first-order term vanishes.
        CHECK(dp > base.distortion);
        CHECK(dm > base.distortion);
        const double quad = dp + dm - 2.0 * base.distortion;
        CHECK(std::abs(dp - dm) <= 1e-8 * quad + 1e-12);
    }
}

TEST_CASE("distortion decreases with r for a fixed encoder") {
    const SourceGrid g = make_grid(1.0, 5.0, 401);
    const auto f = sample(g, [](double v) { return v; });
    double prev = 2.0;
    for (double r : {0.0, 0.2, 0.4, 0.6, 0.8, 0.95}) {
        SystemParams p;
        p.r = r;
        MseProblem prob(p, g, g);
        const double d = prob.evaluate(f).distortion;
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("MSE gradient agrees with finite differences of an independent Lagrangian") {
    const SourceGrid g = make_grid(1.0, 6.0, 241);
    std::vector<oracle::ld> vl(g.nodes.begin(), g.nodes.end());
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> amp(0.3, 2.0), freq(0.3, 2.5), phase(0.0, 3.0);
    std::uniform_int_distribution<std::size_t> pick(30, 210);
    for (double r : {0.0, 0.6}) {
        for (int trial = 0; trial < 5; ++trial) {
            SystemParams p;
            p.r = r;
            p.lambda = 0.05;
            oracle::Params op;
            op.r = r;
            op.lambda = p.lambda;
            const double a = amp(rng), w = freq(rng), ph = phase(rng);
            std::vector<double> f(g.size());
            for (std::size_t i = 0; i < f.size(); ++i) f[i] = a * std::sin(w * g.nodes[i] + ph);
            MseProblem prob(p, g, g);
            const DecoderTable d = prob.decoder(f);
            const auto grad = prob.gradient(f, d);
            const auto& nw = prob.node_weights();
            // Check the library's own quadrature agrees with the oracle's.
            std::vector<oracle::ld> fl(f.begin(), f.end());
            CHECK(prob.evaluate(f).lagrangian ==
                  Approx(static_cast<double>(oracle::mse_lagrangian(vl, fl, vl, op))).epsilon(1e-10));
            for (int k = 0; k < 4; ++k) {
                const std::size_t i = pick(rng);
                const oracle::ld step = 1e-4L;
                auto fp = fl, fm = fl;
                fp[i] += step;
                fm[i] -= step;
                const oracle::ld fd =
                    (oracle::mse_lagrangian(vl, fp, vl, op) - oracle::mse_lagrangian(vl, fm, vl, op)) / (2 * step);
                const double analytic = nw[i] * grad[i];
                CHECK(analytic == Approx(static_cast<double>(fd)).epsilon(1e-3).margin(1e-9));
            }
        }
    }
}

TEST_CASE("MSE stationarity residual vanishes where the gradient does") {
    SystemParams p;
    p.lambda = 0.1;
    const SourceGrid g = make_grid(1.0, 5.0, 201);
    MseProblem prob(p, g, g);
    const std::vector<double> f(g.size(), 0.0);
    const DecoderTable d = prob.decoder(f);
    // For f = 0 and r = 0 every bit is equally likely and the decoder is constant, so the
    // gradient vanishes identically.
    for (double x : prob.gradient(f, d)) CHECK(std::abs(x) < 1e-12);
    for (double x : prob.stationarity_residual(f, d)) CHECK(std::abs(x) < 1e-12);
}

TEST_CASE("MSE rejects mismatched inputs") {
    SystemParams p;
    const SourceGrid g = make_grid(1.0, 5.0, 101);
    MseProblem prob(p, g, g);
    CHECK_THROWS_AS(prob.evaluate(std::vector<double>(10, 0.0)), ConfigError);
}

TEST_CASE("perfect side information gives zero distortion") {
    SystemParams p;
    p.r = 1.0;
    const SourceGrid g = make_grid(1.0, 5.0, 101);
    MseProblem prob(p, g, g);
    const MseEval e = prob.evaluate(std::vector<double>(g.size(), 0.0));
    CHECK(e.distortion == Approx(0.0).margin(1e-12));
}

TEST_CASE("MSE evaluation bookkeeping") {
    SystemParams p;
    p.r = 0.4;
    p.lambda = 0.3;
    p.sigma_v = 1.7;
    const SourceGrid g = make_grid(p.sigma_v, 5.0, 401);
    MseProblem prob(p, g, default_u_grid(p, g));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> a(-3.0, 3.0);
    for (int trial = 0; trial < 5; ++trial) {
        const double c1 = a(rng), c2 = a(rng);
        std::vector<double> f(g.size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = c1 * std::sin(c2 * g.nodes[i]) + c2;
        const MseEval e = prob.evaluate(f);
        CHECK(e.distortion <= p.sigma_v * p.sigma_v + 1e-9);
        CHECK(std::abs(e.lagrangian - (e.distortion + p.lambda * e.power)) <= 1e-12);
    }
}

TEST_CASE("gradient of an odd mapping is odd when r = 0") {
    SystemParams p;
    p.lambda = 0.1;
    const SourceGrid g = make_grid(1.0, 5.0, 301);
    MseProblem prob(p, g, g);
    const auto f = sample(g, [](double v) { return std::sin(1.7 * v) + 0.4 * v; });
    const auto grad = prob.gradient(f, prob.decoder(f));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(grad[i] + grad[g.size() - 1 - i]) < 1e-8);
}

TEST_CASE("small decoder perturbations never help") {
    SystemParams p;
    p.r = 0.7;
    const SourceGrid g = make_grid(1.0, 5.0, 301);
    MseProblem prob(p, g, g);
    const auto f = sample(g, [](double v) { return 1.5 * std::sin(2.0 * v); });
    const MseEval base = prob.evaluate(f);
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::size_t> node(0, g.size() - 1);
    for (int k = 0; k < 20; ++k) {
        const std::size_t j = node(rng);
        const int y = static_cast<int>(rng() % 2);
        for (double delta : {-0.01, 0.01}) {
            DecoderTable d = base.decoder;
            (y == 0 ? d.g0 : d.g1)[j] += delta;
            CHECK(prob.evaluate(f, d).distortion >= base.distortion - 1e-12);
        }
    }
}

TEST_CASE("distortion equals sigma_v^2 - E[V V^] for the MMSE decoder") {
    // D(c g) = E[V^2] - 2c E[V g] + c^2 E[g^2] is quadratic in c; three values recover E[V g].
    SystemParams p;
    p.r = 0.5;
    const SourceGrid g = make_grid(1.0, 5.0, 401);
    MseProblem prob(p, g, g);
    const auto f = sample(g, [](double v) { return std::tanh(3.0 * v) - 0.5 * std::cos(v); });
    const MseEval e = prob.evaluate(f);
    auto scaled = [&](double c) {
        DecoderTable d = e.decoder;
        for (auto& x : d.g0) x *= c;
        for (auto& x : d.g1) x *= c;
        return prob.evaluate(f, d).distortion;
    };
    const double d0 = scaled(0.0), d1 = e.distortion, d2 = scaled(2.0);
    const double cross = (3.0 * d0 - 4.0 * d1 + d2) / 4.0;
    CHECK(std::abs(d0 - 1.0) <= 1e-6);
    CHECK(std::abs(d1 - (d0 - cross)) <= 1e-12);
}
