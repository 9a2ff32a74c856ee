#include "deam/model_pricer.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "deam/error.hpp"
#include "deam/pde/solver.hpp"
#include "deam/reference_pricing.hpp"

namespace deam {

PricerConfig PricerConfig::defaults(ModelKind model) {
    PricerConfig cfg;
    cfg.grid = pde::GridSpec::defaults(model);
    cfg.lcp = pde::default_lcp(model);
    return cfg;
}

namespace {

bool needs_lcp(const OptionSpec& spec, double r) { return spec.is_american() && (spec.is_put() || r < 0.0); }

double price_one(const ModelParams& p, const OptionSpec& spec, double s0, double r,
                 const PricerConfig& cfg) {
    const pde::Anchor anchor{s0};
    if (needs_lcp(spec, r)) {
        return pde::solve_american(p, spec, r, cfg.grid, cfg.lcp, anchor).price_at(s0);
    }
    const OptionSpec eu = spec.with_exercise(Exercise::european);
    if (cfg.european == EuropeanMethod::closed_form) return reference_price(p, eu, s0, r);
    return pde::solve_european(p, eu, r, cfg.grid, anchor).price_at(s0);
}

}  // namespace

double model_price(const ModelParams& p, const OptionSpec& spec, double s0, double r,
                   const PricerConfig& cfg) {
    return price_one(p, spec, s0, r, cfg);
}

std::vector<double> model_prices(const ModelParams& p, std::span<const OptionSpec> specs,
                                 double s0, const YieldCurve& curve, const PricerConfig& cfg) {
    validate(p);
    std::vector<double> out(specs.size(), 0.0);
    const bool share = cfg.share_maturity_solves && kind_of(p) != ModelKind::cev;

    if (!share) {
        parallel_for(
            specs.size(),
            [&](std::size_t i) {
                out[i] = price_one(p, specs[i], s0, curve.rate(specs[i].maturity), cfg);
            },
            cfg.workers);
        return out;
    }

    // group by (maturity, type, needs early exercise); one unit-strike solve per group
    using Key = std::tuple<double, OptionType, bool>;
    std::map<Key, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const double r = curve.rate(specs[i].maturity);
        groups[{specs[i].maturity, specs[i].type, needs_lcp(specs[i], r)}].push_back(i);
    }
    std::vector<std::pair<Key, std::vector<std::size_t>>> work(groups.begin(), groups.end());
    parallel_for(
        work.size(),
        [&](std::size_t w) {
            const auto& [key, members] = work[w];
            const auto [maturity, type, american] = key;
            const double r = curve.rate(maturity);
            const OptionSpec unit(type, american ? Exercise::american : Exercise::european, 1.0, maturity);
            if (!american && cfg.european == EuropeanMethod::closed_form) {
                for (auto i : members) out[i] = reference_price(p, specs[i].with_exercise(Exercise::european), s0, r);
                return;
            }
            const auto sol = american ? pde::solve_american(p, unit, r, cfg.grid, cfg.lcp)
                                      : pde::solve_european(p, unit, r, cfg.grid);
            for (auto i : members) {
                const double k = specs[i].strike;
                out[i] = k * sol.evaluate(std::log(s0 / k));
            }
        },
        cfg.workers);
    return out;
}

}  // namespace deam
