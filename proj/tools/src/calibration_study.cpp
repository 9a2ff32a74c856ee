#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <tuple>

#include "csv.hpp"
#include "deam/cli/studies.hpp"
#include "deam/data.hpp"

namespace deam::cli {

namespace detail {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace detail

namespace {

constexpr Selection all_selections[] = {Selection::puts_only, Selection::otm_calls_and_puts};
constexpr Route all_routes[] = {Route::american_direct, Route::deamericanized};

PricerConfig calibration_pricer(const RunConfig& cfg, ModelKind model) {
    PricerConfig p = cfg.pricer(model);
    // log-moneyness models: one solve per maturity serves every strike
    p.share_maturity_solves = model != ModelKind::cev;
    p.workers = cfg.workers;
    return p;
}

CalibrationCase run_case(const RunConfig& cfg, ModelKind model, const std::vector<Quote>& quotes,
                         const YieldCurve& curve, Selection selection, Route route) {
    CalibrationCase c;
    c.model = model;
    c.route = route;
    c.selection = selection;

    CalibrationProblem problem = CalibrationProblem::defaults(model);
    problem.quotes = quotes;
    problem.s0 = 1.0;
    problem.curve = curve;
    problem.selection = selection;
    problem.route = route;
    problem.starts = cfg.calibration_starts();
    problem.seed = cfg.seed;
    if (cfg.max_evaluations) problem.max_evaluations = *cfg.max_evaluations;
    problem.pricer = calibration_pricer(cfg, model);
    problem.tree = cfg.tree();
    try {
        const CalibrationResult r = calibrate(problem);
        c.fitted = r.params;
        c.aase = r.aase;
        c.quotes_used = r.used.size();
        c.quotes_excluded = r.excluded.size();
        c.evaluations = r.evaluations;
    } catch (const Error& e) {
        c.status = e.what();
    }
    return c;
}

}  // namespace

std::vector<Quote> synthetic_quotes(const ModelParams& p, double r, const PricerConfig& pricer) {
    std::vector<OptionSpec> specs;
    for (const auto& put : gen_calibration_grid()) {
        specs.push_back(put);
        specs.push_back(put.with_type(OptionType::call));
    }
    const auto prices = model_prices(p, specs, 1.0, YieldCurve::flat(r), pricer);
    std::vector<Quote> out;
    for (std::size_t i = 0; i < specs.size(); ++i) out.emplace_back(specs[i], prices[i]);
    return out;
}

CalibrationReport run_calibration_study(const RunConfig& cfg) {
    CalibrationReport report;
    for (auto model : cfg.models) {
        for (const auto& sc : cfg.resolve_scenarios(model)) {
            for (double r : cfg.resolve_rates({0.07})) {
                const auto curve = YieldCurve::flat(r);
                std::vector<Quote> quotes;
                std::string failure;
                try {
                    quotes = synthetic_quotes(sc.params, r, calibration_pricer(cfg, model));
                } catch (const Error& e) {
                    failure = std::string("synthetic data: ") + e.what();
                }
                for (auto sel : all_selections) {
                    for (auto route : all_routes) {
                        CalibrationCase c;
                        if (failure.empty()) {
                            c = run_case(cfg, model, quotes, curve, sel, route);
                        } else {
                            c.model = model, c.selection = sel, c.route = route, c.status = failure;
                        }
                        c.scenario = sc.label();
                        c.rate = r;
                        c.truth = sc.params;
                        report.cases.push_back(std::move(c));
                    }
                }
            }
        }
    }
    return report;
}

CalibrationReport run_market_calibration(const RunConfig& cfg, const std::vector<Quote>& chain,
                                         const YieldCurve& curve) {
    if (chain.empty()) throw SelectionError("the option chain holds no usable quote");
    std::vector<Quote> unit;
    for (const auto& q : chain) {
        OptionSpec s = q.spec;
        s.strike /= cfg.s0;
        unit.emplace_back(s, q.price / cfg.s0);
    }
    CalibrationReport report;
    for (auto model : cfg.models) {
        for (auto route : all_routes) {
            CalibrationCase c = run_case(cfg, model, unit, curve, Selection::otm_calls_and_puts, route);
            c.scenario = "market";
            c.rate = curve.rate(cfg.exotic_maturity);
            report.cases.push_back(std::move(c));
        }
    }
    return report;
}

namespace {

std::string file_for(const CalibrationCase& c) {
    if (c.scenario == "market") return "calibration_market.csv";
    return "calibration_" + std::string(to_string(c.selection)) + ".csv";
}

double rel_diff(double fitted, double truth) {
    return truth != 0.0 ? std::abs(fitted - truth) / std::abs(truth) : std::abs(fitted - truth);
}

}  // namespace

std::vector<std::filesystem::path> write_calibration_report(const CalibrationReport& report,
                                                            const std::filesystem::path& dir) {
    using detail::CsvFile;
    const auto f = format_number;
    std::map<std::string, std::unique_ptr<CsvFile>> files;
    std::vector<std::filesystem::path> written;

    for (const auto& c : report.cases) {
        auto& csv = files[file_for(c)];
        if (!csv) {
            csv = std::make_unique<CsvFile>(
                dir / file_for(c), std::initializer_list<const char*>{"route", "model", "scenario", "param_name",
                                                                      "true_value", "fitted_value", "aase", "rate",
                                                                      "rel_error", "divergent", "status"});
            written.push_back(csv->path());
        }
        const auto names = param_names(c.model);
        const auto truth = c.truth ? to_vector(*c.truth) : std::vector<double>{};
        const auto fitted = c.fitted ? to_vector(*c.fitted) : std::vector<double>{};
        for (std::size_t i = 0; i < names.size(); ++i) {
            const bool has_truth = !truth.empty(), has_fit = !fitted.empty();
            const double rel = has_truth && has_fit ? rel_diff(fitted[i], truth[i]) : 0.0;
            csv->row({std::string(to_string(c.route)), std::string(to_string(c.model)), c.scenario,
                      std::string(names[i]), has_truth ? f(truth[i]) : "", has_fit ? f(fitted[i]) : "",
                      c.ok() ? f(c.aase) : "", std::isfinite(c.rate) ? f(c.rate) : "",
                      has_truth && has_fit ? f(rel) : "", has_truth && has_fit && rel > divergence_threshold ? "1" : "0",
                      c.ok() ? "ok" : c.status});
        }
    }

    // fitted values of both routes side by side
    using Key = std::tuple<std::string, std::string, double, std::string>;
    std::map<Key, std::map<Route, const CalibrationCase*>> pairs;
    for (const auto& c : report.cases) {
        if (c.ok()) pairs[{std::string(to_string(c.model)), c.scenario, c.rate, std::string(to_string(c.selection))}][c.route] = &c;
    }
    if (!pairs.empty()) {
        CsvFile csv(dir / "calibration_routes.csv", {"model", "scenario", "rate", "selection", "param_name",
                                                     "true_value", "american_direct", "deamericanized", "rel_diff"});
        for (const auto& [key, routes] : pairs) {
            if (routes.size() != 2) continue;
            const auto* am = routes.at(Route::american_direct);
            const auto* de = routes.at(Route::deamericanized);
            const auto names = param_names(am->model);
            const auto a = to_vector(*am->fitted), d = to_vector(*de->fitted);
            const auto t = am->truth ? to_vector(*am->truth) : std::vector<double>{};
            for (std::size_t i = 0; i < names.size(); ++i) {
                csv.row({std::get<0>(key), std::get<1>(key), f(std::get<2>(key)), std::get<3>(key), std::string(names[i]),
                         t.empty() ? "" : f(t[i]), f(a[i]), f(d[i]), f(rel_diff(d[i], a[i]))});
            }
        }
        written.push_back(csv.path());
    }
    return written;
}

CalibrationReport read_calibration_reports(const std::filesystem::path& dir) {
    CalibrationReport report;
    const std::pair<const char*, Selection> sources[] = {
        {"calibration_puts_only.csv", Selection::puts_only},
        {"calibration_otm_calls_and_puts.csv", Selection::otm_calls_and_puts},
        {"calibration_market.csv", Selection::otm_calls_and_puts},
    };
    for (const auto& [name, selection] : sources) {
        std::ifstream in(dir / name);
        if (!in) continue;
        std::string line;
        std::getline(in, line);
        using Key = std::tuple<std::string, std::string, std::string, std::string>;
        std::map<Key, std::size_t> index;
        std::vector<CalibrationCase> local;
        std::vector<std::vector<double>> truth, fitted;
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto f = detail::split_csv(line);
            if (f.size() < 11) throw ParseError("calibration report row has too few fields", line_no);
            const auto [it, fresh] = index.try_emplace(Key{f[0], f[1], f[2], f[7]}, local.size());
            if (fresh) {
                CalibrationCase c;
                c.route = parse_route(f[0]);
                c.model = parse_model_kind(f[1]);
                c.scenario = f[2];
                c.selection = selection;
                c.rate = f[7].empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(f[7]);
                c.aase = f[6].empty() ? 0.0 : std::stod(f[6]);
                c.status = f[10];
                local.push_back(std::move(c));
                truth.emplace_back();
                fitted.emplace_back();
            }
            // parameter rows follow param_names order
            if (!f[4].empty()) truth[it->second].push_back(std::stod(f[4]));
            if (!f[5].empty()) fitted[it->second].push_back(std::stod(f[5]));
        }
        for (std::size_t i = 0; i < local.size(); ++i) {
            auto& c = local[i];
            const auto dim = param_names(c.model).size();
            if (truth[i].size() == dim) c.truth = from_vector(c.model, truth[i]);
            if (fitted[i].size() == dim) c.fitted = from_vector(c.model, fitted[i]);
            else if (c.ok()) c.status = "incomplete parameter rows";
            report.cases.push_back(std::move(c));
        }
    }
    return report;
}

}  // namespace deam::cli
