#include <doctest.h>

#include <cmath>

#include "deam/calibration.hpp"
#include "deam/data.hpp"
#include "deam/error.hpp"
#include "deam/reference_pricing.hpp"

using namespace deam;

namespace {

Quote am(OptionType type, double k, double t, double price) { return Quote({type, Exercise::american, k, t}, price); }

}  // namespace

TEST_CASE("aase") {
    const std::vector<double> a = {1.0, 2.0}, b = {1.1, 2.2};
    CHECK(aase(a, a) == 0.0);
    CHECK(aase(a, b) == doctest::Approx(0.025));
    CHECK(aase(std::vector<double>{3.0}, std::vector<double>{3.5}) == doctest::Approx(0.25));
    CHECK_THROWS_AS(aase(a, std::vector<double>{1.0}), UsageError);
    CHECK_THROWS_AS(aase(std::vector<double>{}, std::vector<double>{}), UsageError);

    // permutation invariant, quadratic under scaling
    const std::vector<double> m = {0.3, 0.1, 0.7}, f = {0.25, 0.12, 0.71};
    const std::vector<double> mp = {0.7, 0.3, 0.1}, fp = {0.71, 0.25, 0.12};
    CHECK(aase(m, f) == doctest::Approx(aase(mp, fp)));
    const std::vector<double> m3 = {0.9, 0.3, 2.1}, f3 = {0.75, 0.36, 2.13};
    CHECK(aase(m3, f3) == doctest::Approx(9.0 * aase(m, f)));
}

TEST_CASE("exclusion of immediately exercisable puts") {
    const std::vector<Quote> quotes = {am(OptionType::put, 1.2, 1.0, 0.2), am(OptionType::put, 1.2, 1.0, 0.2021),
                                       am(OptionType::put, 0.8, 1.0, 1e-4), am(OptionType::call, 0.8, 1.0, 0.2)};
    const auto res = filter_deam_unique(quotes, 1.0);
    REQUIRE(res.quotes.size() == 3);
    CHECK(res.index == std::vector<std::size_t>{1, 2, 3});
    REQUIRE(res.excluded.size() == 1);
    CHECK(res.excluded[0].index == 0);
}

TEST_CASE("quote selection") {
    const std::vector<Quote> mixed = {am(OptionType::put, 0.95, 1.0, 0.05), am(OptionType::call, 0.95, 1.0, 0.1),
                                      am(OptionType::put, 1.0, 1.0, 0.07), am(OptionType::call, 1.0, 1.0, 0.08),
                                      am(OptionType::put, 1.05, 1.0, 0.1), am(OptionType::call, 1.05, 1.0, 0.05)};
    const auto otm = select_quotes(mixed, 1.0, Selection::otm_calls_and_puts);
    CHECK(otm.index == std::vector<std::size_t>{0, 5});
    const auto puts = select_quotes(mixed, 1.0, Selection::puts_only);
    CHECK(puts.index == std::vector<std::size_t>{0, 2, 4});
    const std::vector<Quote> itm = {am(OptionType::put, 1.2, 1.0, 0.2), am(OptionType::call, 0.8, 1.0, 0.2)};
    CHECK_THROWS_AS(select_quotes(itm, 1.0, Selection::otm_calls_and_puts), SelectionError);

    CHECK(parse_selection("otm") == Selection::otm_calls_and_puts);
    CHECK(parse_route("deam") == Route::deamericanized);
    CHECK(to_string(Route::american_direct) == "american_direct");
    CHECK_THROWS_AS(parse_route("bogus"), ConfigError);
}

TEST_CASE("bounds") {
    const auto b = Bounds::defaults(ModelKind::heston);
    CHECK(b.lo == std::vector<double>{0.01, -0.99, 1e-4, 0.01, 1e-4});
    CHECK(b.hi == std::vector<double>{2.0, 0.99, 1.0, 10.0, 1.0});
    CHECK(Bounds::defaults(ModelKind::merton).hi[3] == 15.0);
    CHECK_THROWS_AS(b.validate(4), ConfigError);
    Bounds bad{{0.1, 0.1}, {0.1, 0.2}};
    CHECK_THROWS_AS(bad.validate(2), ConfigError);
}

TEST_CASE("Nelder-Mead finds the minimum of a shifted quadratic") {
    auto f = [](const std::vector<double>& x) {
        return (x[0] - 0.3) * (x[0] - 0.3) + 4.0 * (x[1] - 0.7) * (x[1] - 0.7) + 0.1;
    };
    const auto res = nelder_mead(f, {0.9, 0.1}, 0.2, 2000, 1e-14, 1e-9);
    CHECK(res.x[0] == doctest::Approx(0.3).epsilon(1e-4));
    CHECK(res.x[1] == doctest::Approx(0.7).epsilon(1e-4));
    CHECK(res.value == doctest::Approx(0.1).epsilon(1e-8));
    CHECK(res.evaluations <= 2000);

    // the minimum outside the cube is projected onto its face
    auto g = [](const std::vector<double>& x) { return (x[0] - 1.5) * (x[0] - 1.5) + x[1] * x[1]; };
    const auto edge = nelder_mead(g, {0.5, 0.5}, 0.2, 2000, 1e-14, 1e-9);
    CHECK(edge.x[0] == doctest::Approx(1.0));
    CHECK(edge.x[1] == doctest::Approx(0.0).epsilon(1e-4));
}

namespace {

CalibrationProblem closed_form_problem(ModelKind model, const ModelParams& truth, double r) {
    auto problem = CalibrationProblem::defaults(model);
    problem.curve = YieldCurve::flat(r);
    problem.pricer.european = EuropeanMethod::closed_form;
    for (const auto& spec : gen_calibration_grid()) {
        const auto eu = spec.with_exercise(Exercise::european);
        problem.quotes.emplace_back(eu, reference_price(truth, eu, 1.0, r));
    }
    problem.starts = 4;
    problem.seed = 7;
    return problem;
}

}  // namespace

TEST_CASE("calibration recovers CEV parameters from European prices") {
    const CevParams truth{0.275, 0.6};
    const auto problem = closed_form_problem(ModelKind::cev, truth, 0.07);
    const auto res = calibrate(problem);
    const auto fit = std::get<CevParams>(res.params);
    CHECK(fit.sigma == doctest::Approx(truth.sigma).epsilon(1e-3));
    CHECK(fit.zeta == doctest::Approx(truth.zeta).epsilon(1e-3));
    CHECK(res.aase < 1e-10);
    CHECK(res.used.size() == 65);
    CHECK(res.fitted.size() == res.targets.size());

    // same seed, same answer
    const auto again = calibrate(problem);
    CHECK(to_vector(again.params) == to_vector(res.params));
    CHECK(again.aase == res.aase);
}

TEST_CASE("least-squares polish finishes a truncated simplex") {
    const CevParams truth{0.35, 0.7};
    auto problem = closed_form_problem(ModelKind::cev, truth, 0.07);
    problem.starts = 1;
    problem.max_evaluations = 25;
    problem.polish_iterations = 0;
    const auto rough = calibrate(problem);
    problem.polish_iterations = 40;
    const auto polished = calibrate(problem);
    CHECK(polished.aase < 1e-3 * rough.aase);
    const auto fit = std::get<CevParams>(polished.params);
    CHECK(fit.sigma == doctest::Approx(truth.sigma).epsilon(1e-4));
    CHECK(fit.zeta == doctest::Approx(truth.zeta).epsilon(1e-4));
}

TEST_CASE("de-Americanized targets") {
    auto problem = CalibrationProblem::defaults(ModelKind::cev);
    problem.curve = YieldCurve::flat(0.07);
    problem.route = Route::deamericanized;
    problem.tree.dt = 0.005;
    problem.quotes = {am(OptionType::put, 1.2, 1.0, 0.2), am(OptionType::put, 1.0, 1.0, 0.06),
                      am(OptionType::put, 0.9, 0.5, 0.02), am(OptionType::call, 1.1, 0.5, 0.03)};
    const auto targets = prepare_targets(problem);
    REQUIRE(targets.index == std::vector<std::size_t>{1, 2});
    REQUIRE(targets.excluded.size() == 1);
    CHECK(targets.excluded[0].index == 0);
    for (const auto& q : targets.quotes) CHECK_FALSE(q.spec.is_american());
    CHECK(targets.quotes[0].price < 0.06);

    // out-of-the-money selection keeps the call, which passes through unchanged
    problem.selection = Selection::otm_calls_and_puts;
    const auto otm = prepare_targets(problem);
    REQUIRE(otm.index == std::vector<std::size_t>{2, 3});
    CHECK(otm.quotes[1].price == 0.03);
    CHECK(otm.excluded.empty());

    problem.route = Route::american_direct;
    problem.selection = Selection::puts_only;
    const auto direct = prepare_targets(problem);
    CHECK(direct.quotes.size() == 3);
    CHECK(direct.quotes[0].spec.is_american());
}

TEST_CASE("calibration failures") {
    auto problem = CalibrationProblem::defaults(ModelKind::cev);
    CHECK_THROWS_AS(calibrate(problem), SelectionError);
    problem.quotes = {am(OptionType::put, 1.0, 1.0, 0.06)};
    problem.starts = 0;
    CHECK_THROWS_AS(calibrate(problem), ConfigError);
}
