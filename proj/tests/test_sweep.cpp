#include <catch_amalgamated.hpp>

#include <sstream>

#include "onebit/error.hpp"
#include "onebit/sweep.hpp"

using namespace onebit;
using Catch::Approx;

TEST_CASE("axis names and defaults") {
    CHECK(parse_axis("snr") == SweepAxis::Snr);
    CHECK(parse_axis("r") == SweepAxis::R);
    CHECK_THROWS_AS(parse_axis("rho"), ConfigError);
    CHECK(to_string(SweepAxis::R) == "r");
    const auto snr = default_snr_axis();
    REQUIRE(snr.size() == 20);
    CHECK(snr.front() == -10.0);
    CHECK(snr.back() == Approx(20.0));
    const auto r = default_r_axis();
    REQUIRE(r.size() == 11);
    CHECK(r.back() == Approx(0.95));
}

TEST_CASE("scheme validation") {
    SweepSpec spec;
    spec.axis_values = {0.0};
    spec.schemes = {"noe", "magic"};
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);
    spec.schemes = {};
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);
    spec.criterion = Criterion::Dop;
    spec.schemes = {"slb"};
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);
    spec.criterion = Criterion::Mse;
    spec.axis_values = {};
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);
}

TEST_CASE("sweep rows are sorted and complementary") {
    SweepSpec spec;
    spec.base.r = 0.5;
    spec.axis = SweepAxis::Snr;
    spec.axis_values = {5.0, 0.0};
    spec.schemes = {"slb", "pbt"};
    spec.grid_n = 201;
    spec.jobs = 2;
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].axis_value == 0.0);
    CHECK(rows[0].scheme == "pbt");
    CHECK(rows[1].scheme == "slb");
    CHECK(rows[2].axis_value == 5.0);
    for (const auto& row : rows) CHECK(row.value == Approx(1.0 - row.raw));
    // The bound is never worse than a realizable scheme.
    CHECK(rows[1].value >= rows[0].value);
    CHECK(rows[3].value >= rows[2].value);
    CHECK(rows[2].power == Approx(std::pow(10.0, 0.5)).epsilon(1e-12));

    std::ostringstream os;
    write_sweep_csv(os, rows);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "axis_value,scheme,value");
    std::size_t n = 0;
    while (std::getline(is, line)) ++n;
    CHECK(n == 4);
}
