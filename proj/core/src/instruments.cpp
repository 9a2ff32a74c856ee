#include "deam/instruments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deam/error.hpp"

namespace deam {

std::string_view to_string(OptionType t) { return t == OptionType::call ? "call" : "put"; }

std::string_view to_string(Exercise e) {
    return e == Exercise::american ? "american" : "european";
}

OptionSpec::OptionSpec(OptionType type_, Exercise exercise_, double strike_, double maturity_)
    : type(type_), exercise(exercise_), strike(strike_), maturity(maturity_) {
    if (!(strike > 0.0) || !std::isfinite(strike))
        throw ConfigError("option strike must be positive, got " + std::to_string(strike));
    if (!(maturity > 0.0) || !std::isfinite(maturity))
        throw ConfigError("option maturity must be positive, got " + std::to_string(maturity));
}

Quote::Quote(const OptionSpec& spec_, double price_) : spec(spec_), price(price_) {
    if (!(price >= 0.0) || !std::isfinite(price))
        throw ConfigError("quote price must be nonnegative, got " + std::to_string(price));
}

Quote Quote::from_bid_ask(const OptionSpec& spec, double bid, double ask) {
    if (!(bid >= 0.0) || !(ask >= 0.0)) throw ConfigError("bid and ask must be nonnegative");
    if (bid > ask) throw ConfigError("bid exceeds ask");
    Quote q(spec, 0.5 * (bid + ask));
    q.bid = bid;
    q.ask = ask;
    return q;
}

YieldCurve::YieldCurve(std::vector<Pillar> pillars) : pillars_(std::move(pillars)) {
    if (pillars_.empty()) throw ConfigError("yield curve needs at least one pillar");
    for (std::size_t i = 0; i < pillars_.size(); ++i) {
        if (!std::isfinite(pillars_[i].tenor) || !std::isfinite(pillars_[i].rate))
            throw ConfigError("yield curve pillar is not finite");
        if (i > 0 && !(pillars_[i].tenor > pillars_[i - 1].tenor))
            throw ConfigError("yield curve tenors must be strictly increasing");
    }
}

double YieldCurve::rate(double t) const {
    if (t <= pillars_.front().tenor) return pillars_.front().rate;
    if (t >= pillars_.back().tenor) return pillars_.back().rate;
    auto hi = std::upper_bound(pillars_.begin(), pillars_.end(), t,
                               [](double v, const Pillar& p) { return v < p.tenor; });
    auto lo = hi - 1;
    if (t == lo->tenor) return lo->rate;
    const double w = (t - lo->tenor) / (hi->tenor - lo->tenor);
    return lo->rate + w * (hi->rate - lo->rate);
}

double intrinsic_value(const OptionSpec& spec, double spot) {
    if (!(spot > 0.0)) throw DomainError("spot must be positive");
    return spec.is_put() ? std::max(spec.strike - spot, 0.0) : std::max(spot - spec.strike, 0.0);
}

double interp_rate(const YieldCurve& curve, double t) {
    if (!(t > 0.0)) throw DomainError("rate query needs t > 0");
    return curve.rate(t);
}

}  // namespace deam
