#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deam/binomial.hpp"
#include "deam/instruments.hpp"
#include "deam/model_pricer.hpp"
#include "deam/models.hpp"

namespace deam {

enum class Selection { puts_only, otm_calls_and_puts };
enum class Route { american_direct, deamericanized };

std::string_view to_string(Selection s);
std::string_view to_string(Route r);
Selection parse_selection(std::string_view s);
Route parse_route(std::string_view s);

/// Box constraints in the order of param_names(model).
struct Bounds {
    std::vector<double> lo;
    std::vector<double> hi;

    static Bounds defaults(ModelKind model);
    void validate(std::size_t dim) const;
};

/// Mean of squared price differences.
double aase(std::span<const double> market, std::span<const double> model);

struct Exclusion {
    std::size_t index;  ///< position in the input quote list
    std::string reason;
};

struct QuoteSubset {
    std::vector<Quote> quotes;
    std::vector<std::size_t> index;  ///< position of each kept quote in the input
    std::vector<Exclusion> excluded;
};

/// Drops American puts with price <= (K - S0)^+ (1 + delta); calls are kept.
QuoteSubset filter_deam_unique(std::span<const Quote> quotes, double s0, double delta = 0.01);

/// puts_only keeps every put; otm keeps calls with K > S0 and puts with
/// K < S0. Throws SelectionError when nothing is left.
QuoteSubset select_quotes(std::span<const Quote> quotes, double s0, Selection mode);

struct CalibrationProblem {
    ModelKind model = ModelKind::cev;
    std::vector<Quote> quotes;
    double s0 = 1.0;
    YieldCurve curve = YieldCurve::flat(0.0);
    Selection selection = Selection::puts_only;
    Route route = Route::american_direct;
    Bounds bounds = Bounds::defaults(ModelKind::cev);

    std::size_t starts = 8;
    std::uint64_t seed = 1;
    std::size_t max_evaluations = 400;  ///< per start
    double ftol = 1e-10;                ///< relative spread of simplex values
    double xtol = 1e-6;                 ///< simplex size in the unit cube
    /// Levenberg-Marquardt iterations on the residuals after each simplex
    /// run; 0 keeps the simplex result.
    std::size_t polish_iterations = 40;

    PricerConfig pricer = PricerConfig::defaults(ModelKind::cev);
    TreeConfig tree;

    /// Default bounds and pricer settings for the model.
    static CalibrationProblem defaults(ModelKind model);
};

struct CalibrationResult {
    ModelParams params;
    double aase = 0.0;
    std::size_t evaluations = 0;
    std::vector<Exclusion> excluded;
    std::vector<std::size_t> used;  ///< indices of the quotes in the objective
    std::vector<double> targets;    ///< prices the model was fitted to
    std::vector<double> fitted;     ///< model prices at the optimum
};

/// Targets of the objective: American quotes for the direct route, the
/// tree's pseudo-European prices otherwise.
QuoteSubset prepare_targets(const CalibrationProblem& problem);

CalibrationResult calibrate(const CalibrationProblem& problem);

/// Nelder-Mead on the unit cube with clamping. Exposed for testing.
struct SimplexResult {
    std::vector<double> x;
    double value;
    std::size_t evaluations;
};
template <class F>
SimplexResult nelder_mead(F&& f, std::vector<double> start, double step, std::size_t max_evals,
                          double ftol, double xtol);

}  // namespace deam

#include "deam/detail/nelder_mead.hpp"
