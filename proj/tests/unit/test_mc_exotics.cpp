#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../oracles.hpp"
#include "deam/error.hpp"
#include "deam/mc_exotics.hpp"

using namespace deam;

namespace {

McConfig small(std::size_t paths, std::uint64_t seed = 9) {
    McConfig c;
    c.n_paths = paths;
    c.seed = seed;
    return c;
}

const MertonParams gbm{0.2, 0.0, 0.1, 0.0};

}  // namespace

TEST_CASE("discounted spot is a martingale") {
    for (auto m : {ModelKind::cev, ModelKind::heston, ModelKind::merton}) {
        const auto p = scenario_params(m, 4);
        const auto paths = simulate_paths(p, 1.0, 0.05, 1.0, small(100'000));
        const auto est = estimate(paths, [&](std::size_t i) { return paths.terminal[i]; });
        CHECK(std::abs(est.price - 1.0) < 3.0 * est.std_err + 1e-3);
    }
}

TEST_CASE("jump-free paths have lognormal moments") {
    const double r = 0.03, t = 1.0, s = 0.2;
    const auto paths = simulate_paths(gbm, 1.0, r, t, small(200'000));
    const std::size_t n = paths.size();
    double m1 = 0.0, m2 = 0.0;
    for (double x : paths.terminal) {
        m1 += std::log(x);
        m2 += std::log(x) * std::log(x);
    }
    m1 /= static_cast<double>(n);
    m2 /= static_cast<double>(n);
    const double mean = (r - 0.5 * s * s) * t;
    // antithetic pairing makes the sample log-mean exact up to rounding
    CHECK(m1 == doctest::Approx(mean).epsilon(1e-8));
    const double var = m2 - m1 * m1;
    // variance of the sample variance of a normal: 2 sigma^4 / n
    CHECK(std::abs(var - s * s * t) < 3.0 * std::sqrt(2.0 / static_cast<double>(n)) * s * s * t);
}

TEST_CASE("antithetic sampling lowers the vanilla variance") {
    auto anti = small(100'000);
    auto plain = anti;
    plain.antithetic = false;
    const auto a = price_vanilla_call(simulate_paths(gbm, 1.0, 0.05, 1.0, anti), 1.0);
    const auto b = price_vanilla_call(simulate_paths(gbm, 1.0, 0.05, 1.0, plain), 1.0);
    CHECK(a.std_err < b.std_err);
}

TEST_CASE("down-and-out call limits") {
    const auto paths = simulate_paths(scenario_params(ModelKind::merton, 3), 1.0, 0.05, 1.0, small(20'000));
    ExoticSpec doc = ExoticSpec::standard(ExoticKind::down_and_out_call);
    doc.barrier = 1e-9;
    CHECK(price_down_and_out_call(paths, doc).price == price_vanilla_call(paths, doc.strike).price);
    // the spot itself is monitored: touching at inception knocks the option out
    auto spec = doc;
    spec.barrier = 1.0 + 1e-12;
    CHECK(price_down_and_out_call(paths, spec).price == 0.0);
}

TEST_CASE("down-and-out call under GBM against the continuous barrier formula") {
    const double r = 0.05, sigma = 0.2, t = 1.0;
    McConfig cfg = small(400'000);
    const auto paths = simulate_paths(gbm, 100.0, r, t, cfg);
    const auto spec = ExoticSpec::standard(ExoticKind::down_and_out_call, 100.0, t);
    CHECK(spec.barrier == 90.0);
    CHECK(spec.strike == 105.0);
    const auto est = price_down_and_out_call(paths, spec);
    const double dt = t / static_cast<double>(paths.steps);
    const double shifted = spec.barrier * std::exp(-oracle::bgk_beta * sigma * std::sqrt(dt));
    const double exact = oracle::down_and_out_call(100.0, 105.0, 90.0, r, sigma, t);
    const double bias = std::abs(oracle::down_and_out_call(100.0, 105.0, shifted, r, sigma, t) - exact);
    CHECK(std::abs(est.price - exact) <= 3.0 * est.std_err + bias);
}

TEST_CASE("lookback call under GBM against the continuous formula") {
    const double r = 0.05, sigma = 0.2, t = 1.0;
    const auto paths = simulate_paths(gbm, 100.0, r, t, small(400'000));
    const auto spec = ExoticSpec::standard(ExoticKind::lookback_call, 100.0, t);
    const auto est = price_lookback_call(paths, spec);
    const double exact = oracle::lookback_call(100.0, 105.0, r, sigma, t);
    // discrete maximum falls short by about exp(-beta sigma sqrt(dt)); the payoff is 1-Lipschitz in it
    const double dt = t / static_cast<double>(paths.steps);
    const double mean_max = std::exp(r * t) * oracle::lookback_call(100.0, 100.0, r, sigma, t) + 100.0;
    const double bias = std::exp(-r * t) * mean_max * (1.0 - std::exp(-oracle::bgk_beta * sigma * std::sqrt(dt)));
    CHECK(est.price < exact);
    CHECK(std::abs(est.price - exact) <= 3.0 * est.std_err + bias);
}

TEST_CASE("lookback dominates the vanilla call path by path") {
    const auto paths = simulate_paths(scenario_params(ModelKind::heston, 2), 1.0, 0.05, 1.0, small(20'000));
    for (std::size_t i = 0; i < paths.size(); ++i) CHECK(paths.running_max[i] >= paths.terminal[i]);
    const auto spec = ExoticSpec::standard(ExoticKind::lookback_call);
    CHECK(price_lookback_call(paths, spec).price >= price_vanilla_call(paths, spec.strike).price);
    auto far = spec;
    far.strike = 1e6;
    CHECK(price_lookback_call(paths, far).price == 0.0);
}

TEST_CASE("exotic prices are monotone on common random numbers") {
    const auto paths = simulate_paths(scenario_params(ModelKind::cev, 3), 1.0, 0.05, 1.0, small(20'000));
    double prev = std::numeric_limits<double>::infinity();
    for (double b : {0.5, 0.8, 0.9, 0.95}) {
        auto spec = ExoticSpec::standard(ExoticKind::down_and_out_call);
        spec.barrier = b;
        const double p = price_exotic(paths, spec).price;
        CHECK(p <= prev);
        prev = p;
    }
    prev = std::numeric_limits<double>::infinity();
    for (double k : {1.0, 1.05, 1.2, 1.5}) {
        auto spec = ExoticSpec::standard(ExoticKind::lookback_call);
        spec.strike = k;
        const double p = price_exotic(paths, spec).price;
        CHECK(p <= prev);
        prev = p;
    }
}

TEST_CASE("table parameters give positive finite exotic prices") {
    for (auto m : {ModelKind::cev, ModelKind::heston, ModelKind::merton}) {
        for (const auto& s : benchmark_scenarios(m)) {
            const auto paths = simulate_paths(s.params, 1.0, 0.07, 1.0, small(4'000));
            for (auto kind : {ExoticKind::down_and_out_call, ExoticKind::lookback_call}) {
                const double p = price_exotic(paths, ExoticSpec::standard(kind)).price;
                CHECK(std::isfinite(p));
                CHECK(p > 0.0);
            }
        }
    }
}

TEST_CASE("identical seeds reproduce identical estimates") {
    const auto p = scenario_params(ModelKind::merton, 5);
    auto one = small(30'000, 77);
    one.workers = 1;
    auto many = one;
    many.workers = 4;
    const auto a = simulate_paths(p, 1.0, 0.07, 1.0, one);
    const auto b = simulate_paths(p, 1.0, 0.07, 1.0, many);
    CHECK(a.terminal == b.terminal);
    CHECK(a.running_min == b.running_min);
    const auto spec = ExoticSpec::standard(ExoticKind::down_and_out_call);
    CHECK(price_exotic(a, spec).price == price_exotic(b, spec).price);

    auto other = one;
    other.seed = 78;
    CHECK(simulate_paths(p, 1.0, 0.07, 1.0, other).terminal != a.terminal);
}

TEST_CASE("configuration checks") {
    McConfig c;
    c.n_paths = 3;
    CHECK_THROWS_AS(c.validate(), UsageError);
    c.n_paths = 1;
    c.antithetic = false;
    CHECK_THROWS_AS(c.validate(), UsageError);
    c = McConfig{};
    c.steps_per_year = 0;
    CHECK_THROWS_AS(c.validate(), UsageError);
    auto spec = ExoticSpec::standard(ExoticKind::down_and_out_call);
    spec.maturity = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("pairwise summation") {
    std::vector<double> x(10'001);
    std::iota(x.begin(), x.end(), 0.0);
    CHECK(pairwise_sum(x.data(), x.size()) == 10'000.0 * 10'001.0 / 2.0);
    CHECK(pairwise_sum(x.data(), 0) == 0.0);
}
