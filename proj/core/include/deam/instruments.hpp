#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace deam {

enum class OptionType { call, put };
enum class Exercise { american, european };

std::string_view to_string(OptionType t);
std::string_view to_string(Exercise e);

/// Contract terms. Strike and maturity (year fraction) are strictly positive.
struct OptionSpec {
    OptionType type = OptionType::put;
    Exercise exercise = Exercise::european;
    double strike = 1.0;
    double maturity = 1.0;

    OptionSpec() = default;
    OptionSpec(OptionType type, Exercise exercise, double strike, double maturity);

    OptionSpec with_exercise(Exercise e) const { return {type, e, strike, maturity}; }
    OptionSpec with_type(OptionType t) const { return {t, exercise, strike, maturity}; }

    bool is_put() const { return type == OptionType::put; }
    bool is_american() const { return exercise == Exercise::american; }

    friend bool operator==(const OptionSpec&, const OptionSpec&) = default;
};

/// An observed price for a contract. When both sides of the market are
/// known the price is their midpoint.
struct Quote {
    OptionSpec spec;
    double price = 0.0;
    std::optional<double> bid;
    std::optional<double> ask;

    Quote() = default;
    Quote(const OptionSpec& spec, double price);

    static Quote from_bid_ask(const OptionSpec& spec, double bid, double ask);
};

struct Pillar {
    double tenor;
    double rate;  // continuously compounded, per annum
};

/// Continuously-compounded zero curve, linear between pillars and flat
/// outside them.
class YieldCurve {
public:
    explicit YieldCurve(std::vector<Pillar> pillars);

    static YieldCurve flat(double rate) { return YieldCurve({{1.0, rate}}); }

    double rate(double t) const;
    const std::vector<Pillar>& pillars() const { return pillars_; }

private:
    std::vector<Pillar> pillars_;
};

/// (spot - K)^+ for calls, (K - spot)^+ for puts.
double intrinsic_value(const OptionSpec& spec, double spot);

double interp_rate(const YieldCurve& curve, double t);

}  // namespace deam
