#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "deam/instruments.hpp"
#include "deam/models.hpp"
#include "deam/parallel.hpp"
#include "deam/pde/grid.hpp"
#include "deam/pde/lcp.hpp"

namespace deam {

enum class EuropeanMethod { pde, closed_form };

struct PricerConfig {
    pde::GridSpec grid;
    pde::LcpConfig lcp;
    EuropeanMethod european = EuropeanMethod::pde;
    /// Heston and Merton prices scale with the strike in log-moneyness, so
    /// one solve per maturity can serve all strikes (by interpolation).
    /// When false every contract gets its own grid anchored at the spot.
    bool share_maturity_solves = false;
    std::size_t workers = default_workers();

    static PricerConfig defaults(ModelKind model);
};

/// Model prices for a list of contracts. American calls are priced as
/// European (no dividends, r >= 0). Rates come from the curve at each maturity.
std::vector<double> model_prices(const ModelParams& p, std::span<const OptionSpec> specs,
                                 double s0, const YieldCurve& curve, const PricerConfig& cfg);

/// Single contract convenience.
double model_price(const ModelParams& p, const OptionSpec& spec, double s0, double r,
                   const PricerConfig& cfg);

}  // namespace deam
