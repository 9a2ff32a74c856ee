#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "deam/instruments.hpp"

namespace deam {

/// A put on the pricing grid together with the rate it is priced at.
struct PricingCell {
    OptionSpec spec;
    double rate;
};

/// 9 strikes x 8 maturities x 5 rates of American puts on S0 = 1, sorted
/// by maturity, then strike, then rate.
std::vector<PricingCell> gen_pricing_grid();

const std::vector<double>& pricing_strikes();
const std::vector<double>& pricing_maturities();
const std::vector<double>& pricing_rates();

/// 65 American puts on S0 = 1 with nested strike sets per maturity
/// (5, 9, 13, 17, 21 strikes), sorted by maturity then strike.
std::vector<OptionSpec> gen_calibration_grid();

/// Calendar date in ISO-8601 form, as days since 1970-01-01.
int parse_iso_date(std::string_view text);

/// Loads `type,strike,expiry,bid,ask` rows and applies the selection rules:
/// out-of-the-money only (strike strictly away from spot), positive bids,
/// mid prices, and a strike ladder that stops after two consecutive zero
/// bids moving away from the spot. Maturities are calendar days / 365.
std::vector<Quote> load_option_chain(const std::string& path, std::string_view valuation_date,
                                     double s0);
std::vector<Quote> parse_option_chain(std::string_view csv, std::string_view valuation_date,
                                      double s0);

/// `tenor,rate` rows. Throws ValidationError for empty, unsorted or duplicate tenors.
YieldCurve load_yield_curve(const std::string& path);
YieldCurve parse_yield_curve(std::string_view csv);

}  // namespace deam
