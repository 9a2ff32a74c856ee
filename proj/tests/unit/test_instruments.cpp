#include <doctest.h>

#include "deam/error.hpp"
#include "deam/instruments.hpp"

using namespace deam;

TEST_CASE("intrinsic value") {
    CHECK(intrinsic_value({OptionType::put, Exercise::european, 1.2, 1.0}, 1.0) == doctest::Approx(0.2));
    CHECK(intrinsic_value({OptionType::call, Exercise::european, 1.2, 1.0}, 1.0) == 0.0);
    CHECK(intrinsic_value({OptionType::put, Exercise::american, 120.0, 1.0}, 100.0) == 20.0);
    CHECK_THROWS_AS(intrinsic_value({OptionType::put, Exercise::american, 1.0, 1.0}, 0.0), DomainError);
}

TEST_CASE("intrinsic value is convex in spot") {
    const OptionSpec put{OptionType::put, Exercise::european, 1.0, 1.0};
    const OptionSpec call{OptionType::call, Exercise::european, 1.0, 1.0};
    for (double s = 0.5; s < 1.5; s += 0.01) {
        for (const auto& spec : {put, call}) {
            const double mid = intrinsic_value(spec, s);
            CHECK(mid >= 0.0);
            CHECK(2.0 * mid <= intrinsic_value(spec, s - 0.005) + intrinsic_value(spec, s + 0.005) + 1e-15);
        }
    }
}

TEST_CASE("contract validation") {
    CHECK_THROWS_AS(OptionSpec(OptionType::put, Exercise::american, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(OptionSpec(OptionType::put, Exercise::american, 1.0, -1.0), ConfigError);
    CHECK_THROWS_AS(Quote(OptionSpec{}, -0.1), ConfigError);
    CHECK_THROWS_AS(Quote::from_bid_ask(OptionSpec{}, 2.0, 1.0), ConfigError);

    const auto q = Quote::from_bid_ask(OptionSpec{}, 1.0, 1.5);
    CHECK(q.price == 1.25);
    CHECK(*q.bid == 1.0);
    CHECK(*q.ask == 1.5);
}

TEST_CASE("rate interpolation") {
    CHECK(interp_rate(YieldCurve::flat(0.07), 0.5) == 0.07);

    const YieldCurve google({{0.38, 0.00046087}, {0.62, 0.000955435}});
    CHECK(interp_rate(google, 0.5) == doctest::Approx(0.000708153).epsilon(1e-6));
    CHECK(interp_rate(google, 0.38) == 0.00046087);
    CHECK(interp_rate(google, 0.62) == 0.000955435);
    CHECK(interp_rate(google, 0.01) == 0.00046087);
    CHECK(interp_rate(google, 5.0) == 0.000955435);

    CHECK_THROWS_AS(YieldCurve({}), ConfigError);
    CHECK_THROWS_AS(YieldCurve({{1.0, 0.01}, {1.0, 0.02}}), ConfigError);
    CHECK_THROWS_AS(YieldCurve({{2.0, 0.01}, {1.0, 0.02}}), ConfigError);
}

TEST_CASE("interpolated curve is continuous and piecewise linear") {
    const YieldCurve c({{0.1, 0.01}, {0.5, 0.03}, {2.0, 0.02}});
    for (double t = 0.1; t < 2.0; t += 0.013) {
        CHECK(std::abs(interp_rate(c, t + 1e-9) - interp_rate(c, t)) < 1e-9);
    }
    // linear inside a segment: midpoint value is the mean of the ends
    CHECK(interp_rate(c, 0.3) == doctest::Approx(0.5 * (interp_rate(c, 0.2) + interp_rate(c, 0.4))));
}
