#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <tuple>

#include "csv.hpp"
#include "deam/cli/studies.hpp"

namespace deam::cli {

namespace {

constexpr double spot_scale = 100.0;

struct Priced {
    McEstimate doc, lookback;
};

// Paths on a unit spot; prices are reported per 100 of spot.
Priced price_both(const ModelParams& p, double r, const RunConfig& cfg) {
    const auto paths = simulate_paths(p, 1.0, r, cfg.exotic_maturity, cfg.mc());
    auto scaled = [](McEstimate e) {
        e.price *= spot_scale;
        e.std_err *= spot_scale;
        return e;
    };
    return {scaled(price_exotic(paths, ExoticSpec::standard(ExoticKind::down_and_out_call, 1.0, cfg.exotic_maturity))),
            scaled(price_exotic(paths, ExoticSpec::standard(ExoticKind::lookback_call, 1.0, cfg.exotic_maturity)))};
}

}  // namespace

ExoticsReport run_exotics_study(const RunConfig& cfg, const CalibrationReport* calibrations) {
    CalibrationReport owned;
    if (!calibrations) {
        owned = cfg.calibration_dir.empty() ? run_calibration_study(cfg) : read_calibration_reports(cfg.calibration_dir);
        calibrations = &owned;
    }

    ExoticsReport report;
    auto push = [&](ModelKind m, const std::string& scenario, const std::string& route, Selection sel, double r,
                    const Priced& px) {
        report.rows.push_back({m, scenario, route, sel, r, ExoticKind::down_and_out_call, px.doc.price, px.doc.std_err});
        report.rows.push_back({m, scenario, route, sel, r, ExoticKind::lookback_call, px.lookback.price, px.lookback.std_err});
    };

    // generative parameters once per (model, scenario, rate), listed under every selection
    using Key = std::tuple<int, std::string, double>;
    std::map<Key, std::set<Selection>> wanted;
    std::map<Key, ModelParams> truth;
    for (const auto& c : calibrations->cases) {
        const bool model_ok = std::find(cfg.models.begin(), cfg.models.end(), c.model) != cfg.models.end();
        if (!model_ok || !c.truth) continue;
        const Key k{static_cast<int>(c.model), c.scenario, c.rate};
        wanted[k].insert(c.selection);
        truth.emplace(k, *c.truth);
    }
    for (const auto& [k, sels] : wanted) {
        const auto px = price_both(truth.at(k), std::get<2>(k), cfg);
        for (auto sel : sels) push(static_cast<ModelKind>(std::get<0>(k)), std::get<1>(k), "generative", sel, std::get<2>(k), px);
    }

    for (const auto& c : calibrations->cases) {
        const bool model_ok = std::find(cfg.models.begin(), cfg.models.end(), c.model) != cfg.models.end();
        if (!model_ok || !c.ok() || !c.fitted) continue;
        const double r = std::isfinite(c.rate) ? c.rate : cfg.resolve_rates({0.07}).front();
        push(c.model, c.scenario, std::string(to_string(c.route)), c.selection, r, price_both(*c.fitted, r, cfg));
    }
    return report;
}

std::vector<ExoticGap> exotic_gaps(const ExoticsReport& report) {
    using Key = std::tuple<int, std::string, int, int>;
    std::map<Key, std::map<std::string, double>> prices;
    for (const auto& r : report.rows) {
        prices[{static_cast<int>(r.model), r.scenario, static_cast<int>(r.selection), static_cast<int>(r.kind)}][r.route] =
            r.price;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<ExoticGap> out;
    for (const auto& [k, by_route] : prices) {
        auto get = [&](const char* route) {
            auto it = by_route.find(route);
            return it == by_route.end() ? nan : it->second;
        };
        ExoticGap g{static_cast<ModelKind>(std::get<0>(k)), std::get<1>(k), static_cast<Selection>(std::get<2>(k)),
                    static_cast<ExoticKind>(std::get<3>(k)), get("generative"), get("american_direct"),
                    get("deamericanized"), nan};
        if (std::isfinite(g.american_direct) && std::isfinite(g.deamericanized) && g.american_direct != 0.0) {
            g.rel_gap = (g.deamericanized - g.american_direct) / g.american_direct;
        }
        out.push_back(g);
    }
    return out;
}

std::vector<std::filesystem::path> write_exotics_report(const ExoticsReport& report,
                                                        const std::filesystem::path& dir) {
    using detail::CsvFile;
    auto f = [](double x) { return std::isfinite(x) ? format_number(x) : std::string(); };
    std::vector<std::filesystem::path> written;

    std::map<Selection, std::unique_ptr<CsvFile>> files;
    for (const auto& r : report.rows) {
        auto& csv = files[r.selection];
        if (!csv) {
            csv = std::make_unique<CsvFile>(dir / ("exotics_" + std::string(to_string(r.selection)) + ".csv"),
                                            std::initializer_list<const char*>{"model", "scenario", "route", "kind",
                                                                               "price", "std_err", "rate"});
            written.push_back(csv->path());
        }
        csv->row({std::string(to_string(r.model)), r.scenario, r.route, std::string(to_string(r.kind)), f(r.price),
                  f(r.std_err), f(r.rate)});
    }

    CsvFile gaps(dir / "exotics_gaps.csv", {"model", "scenario", "selection", "kind", "generative", "american_direct",
                                            "deamericanized", "rel_gap"});
    for (const auto& g : exotic_gaps(report)) {
        gaps.row({std::string(to_string(g.model)), g.scenario, std::string(to_string(g.selection)),
                  std::string(to_string(g.kind)), f(g.generative), f(g.american_direct), f(g.deamericanized),
                  f(g.rel_gap)});
    }
    written.push_back(gaps.path());
    return written;
}

}  // namespace deam::cli
