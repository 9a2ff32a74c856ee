#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deam/binomial.hpp"
#include "deam/calibration.hpp"
#include "deam/instruments.hpp"
#include "deam/mc_exotics.hpp"
#include "deam/model_pricer.hpp"
#include "deam/models.hpp"

namespace deam::cli {

enum class Study { pricing, calibrate_synthetic, calibrate_market, exotics };

std::string_view to_string(Study s);

struct RunConfig {
    Study study = Study::pricing;
    std::vector<ModelKind> models{ModelKind::cev, ModelKind::heston, ModelKind::merton};
    std::vector<int> scenarios{1, 2, 3, 4, 5};
    std::vector<double> rates;       ///< empty: the study's own rates
    std::vector<double> strikes;     ///< pricing grid filter, empty: all
    std::vector<double> maturities;  ///< pricing grid filter, empty: all
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 42;
    bool fast = false;
    std::size_t workers = default_workers();
    std::string scenario_file;  ///< JSON parameter sets replacing the benchmark ones

    // tolerance overrides
    std::optional<double> tree_dt;
    std::optional<double> tree_tol;
    std::optional<double> grid_scale;  ///< multiplies PDE node intervals and time steps
    std::optional<std::size_t> mc_paths;
    std::optional<std::size_t> starts;
    std::optional<std::size_t> max_evaluations;

    // market data
    std::string chain_path;
    std::string curve_path;
    std::string valuation_date = "2015-02-02";
    double s0 = 523.76;

    // exotics
    double exotic_maturity = 1.0;
    std::string calibration_dir;  ///< read calibration reports from here; empty: calibrate inline

    /// Checks the filters and creates the output directory.
    void validate() const;

    std::vector<Scenario> resolve_scenarios(ModelKind model) const;
    std::vector<double> resolve_rates(const std::vector<double>& defaults) const;

    pde::GridSpec grid(ModelKind model) const;
    PricerConfig pricer(ModelKind model) const;
    TreeConfig tree() const;
    McConfig mc() const;
    std::size_t calibration_starts() const;
};

/// Fractional gap that marks a fitted parameter as divergent.
inline constexpr double divergence_threshold = 0.10;

// ---- pricing -------------------------------------------------------------

struct PricingCell {
    ModelKind model = ModelKind::cev;
    int scenario = 1;
    double rate = 0.0;
    double strike = 1.0;
    double maturity = 1.0;
    double american = 0.0;
    double european = 0.0;
    double deamericanized = 0.0;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
    double error() const { return deamericanized - european; }
};

struct PricingReport {
    std::vector<PricingCell> cells;
};

/// Prices American and European puts by PDE and de-Americanizes the
/// American ones. A cell that fails keeps its message in `status`.
PricingReport run_pricing_study(const RunConfig& cfg);

struct ErrorStats {
    std::size_t count = 0;
    std::size_t failed = 0;
    double avg_error = 0.0;     ///< signed mean of deAm - EU
    double max_error = 0.0;     ///< largest |deAm - EU|
    double max_european = 0.0;
};

struct GroupRow {
    ModelKind model;
    int scenario;
    double rate;
    double key;  ///< maturity or strike
    ErrorStats stats;
};

std::vector<GroupRow> group_by_maturity(const PricingReport& report);
std::vector<GroupRow> group_by_strike(const PricingReport& report);
/// One row per (model, scenario, rate) over every cell.
std::vector<GroupRow> group_by_scenario(const PricingReport& report);

struct AtmRow {
    ModelKind model;
    int scenario;
    double rate;
    double european;
    double deamericanized;
    double rel_error;  ///< |EU - deAm| / EU
};

/// The K = 1, T = 1 cells.
std::vector<AtmRow> atm_one_year(const PricingReport& report);

struct AtmSummary {
    ModelKind model;
    std::size_t count;
    double mean_rel_error;
    double peak_rel_error;
};

std::vector<AtmSummary> summarize_atm(const std::vector<AtmRow>& rows);

std::vector<std::filesystem::path> write_pricing_report(const PricingReport& report,
                                                        const std::filesystem::path& dir);

// ---- calibration ---------------------------------------------------------

struct CalibrationCase {
    ModelKind model = ModelKind::cev;
    std::string scenario;  ///< "p1".."p5" or "market"
    double rate = 0.07;
    Route route = Route::american_direct;
    Selection selection = Selection::puts_only;
    std::optional<ModelParams> truth;
    std::optional<ModelParams> fitted;
    double aase = 0.0;
    std::size_t quotes_used = 0;
    std::size_t quotes_excluded = 0;
    std::size_t evaluations = 0;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct CalibrationReport {
    std::vector<CalibrationCase> cases;
};

/// American puts and calls on the calibration grid priced under `p`. Calls
/// carry the European value (no early exercise).
std::vector<Quote> synthetic_quotes(const ModelParams& p, double r, const PricerConfig& pricer);

/// Synthetic round trips: both routes and both selections per scenario.
CalibrationReport run_calibration_study(const RunConfig& cfg);

/// Both routes on a market chain. Strikes and prices are divided by s0 so
/// the fit runs on a unit spot.
CalibrationReport run_market_calibration(const RunConfig& cfg, const std::vector<Quote>& chain,
                                         const YieldCurve& curve);

/// calibration_<selection>.csv per selection present in the report (or
/// calibration_market.csv for market cases), plus a route comparison.
std::vector<std::filesystem::path> write_calibration_report(const CalibrationReport& report,
                                                            const std::filesystem::path& dir);

/// Reads the files written by write_calibration_report back into cases
/// (parameters and aase only).
CalibrationReport read_calibration_reports(const std::filesystem::path& dir);

// ---- exotics -------------------------------------------------------------

struct ExoticRow {
    ModelKind model;
    std::string scenario;
    std::string route;  ///< "generative" or a calibration route
    Selection selection;
    double rate;
    ExoticKind kind;
    double price;  ///< per 100 of spot
    double std_err;
};

struct ExoticsReport {
    std::vector<ExoticRow> rows;
};

/// Prices both exotics under the generative parameters and under each
/// calibrated set, on common random numbers. Calibrations come from
/// `calibrations` when given, else from cfg.calibration_dir, else inline.
ExoticsReport run_exotics_study(const RunConfig& cfg,
                                const CalibrationReport* calibrations = nullptr);

struct ExoticGap {
    ModelKind model;
    std::string scenario;
    Selection selection;
    ExoticKind kind;
    double generative;
    double american_direct;
    double deamericanized;
    double rel_gap;  ///< (deAm route - American route) / American route
};

std::vector<ExoticGap> exotic_gaps(const ExoticsReport& report);

std::vector<std::filesystem::path> write_exotics_report(const ExoticsReport& report,
                                                        const std::filesystem::path& dir);

// ---- output --------------------------------------------------------------

/// Shortest round-trip decimal form, so re-runs produce identical bytes.
std::string format_number(double x);

/// run_manifest.json: config echo, versions, seed and the files written.
std::filesystem::path write_manifest(const RunConfig& cfg,
                                     const std::vector<std::filesystem::path>& files,
                                     const std::filesystem::path& dir);

}  // namespace deam::cli
