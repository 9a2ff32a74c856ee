#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "csv.hpp"
#include "deam/cli/studies.hpp"
#include "deam/data.hpp"
#include "deam/parallel.hpp"

namespace deam::cli {

namespace {

bool selected(const std::vector<double>& filter, double value) {
    if (filter.empty()) return true;
    return std::any_of(filter.begin(), filter.end(), [&](double f) { return std::abs(f - value) < 1e-9; });
}

std::string label(int scenario) { return "p" + std::to_string(scenario); }

}  // namespace

PricingReport run_pricing_study(const RunConfig& cfg) {
    const auto rates = cfg.resolve_rates(pricing_rates());
    const TreeConfig tree = cfg.tree();

    PricingReport report;
    struct Job {
        ModelParams params;
        std::size_t cell;
    };
    std::vector<Job> jobs;
    for (auto model : cfg.models) {
        for (const auto& sc : cfg.resolve_scenarios(model)) {
            // same order as the pricing grid: maturity, strike, rate
            for (double t : pricing_maturities()) {
                if (!selected(cfg.maturities, t)) continue;
                for (double k : pricing_strikes()) {
                    if (!selected(cfg.strikes, k)) continue;
                    for (double r : rates) {
                        PricingCell cell;
                        cell.model = model;
                        cell.scenario = sc.index;
                        cell.rate = r;
                        cell.strike = k;
                        cell.maturity = t;
                        jobs.push_back({sc.params, report.cells.size()});
                        report.cells.push_back(cell);
                    }
                }
            }
        }
    }

    std::map<ModelKind, PricerConfig> pricers;
    for (auto m : cfg.models) pricers.emplace(m, cfg.pricer(m));

    parallel_for(
        jobs.size(),
        [&](std::size_t j) {
            PricingCell& cell = report.cells[jobs[j].cell];
            const auto& p = jobs[j].params;
            const PricerConfig& pc = pricers.at(cell.model);
            const OptionSpec am(OptionType::put, Exercise::american, cell.strike, cell.maturity);
            try {
                cell.american = model_price(p, am, 1.0, cell.rate, pc);
                cell.european = model_price(p, am.with_exercise(Exercise::european), 1.0, cell.rate, pc);
            } catch (const Error& e) {
                cell.status = std::string("pde: ") + e.what();
                return;
            }
            try {
                cell.deamericanized = deamericanize(Quote(am, cell.american), 1.0, cell.rate, tree);
            } catch (const ImmediateExerciseError&) {
                cell.status = "excluded: within the immediate-exercise margin";
            } catch (const Error& e) {
                cell.status = std::string("tree: ") + e.what();
            }
        },
        cfg.workers);
    return report;
}

namespace {

template <class KeyOf>
std::vector<GroupRow> group(const PricingReport& report, KeyOf key_of) {
    using Key = std::tuple<int, int, double, double>;
    std::map<Key, ErrorStats> acc;
    std::map<Key, double> sums;
    for (const auto& c : report.cells) {
        const Key k{static_cast<int>(c.model), c.scenario, c.rate, key_of(c)};
        auto& s = acc[k];
        if (!c.ok()) {
            ++s.failed;
            continue;
        }
        ++s.count;
        sums[k] += c.error();
        s.max_error = std::max(s.max_error, std::abs(c.error()));
        s.max_european = std::max(s.max_european, c.european);
    }
    std::vector<GroupRow> out;
    for (auto& [k, s] : acc) {
        if (s.count > 0) s.avg_error = sums[k] / static_cast<double>(s.count);
        out.push_back({static_cast<ModelKind>(std::get<0>(k)), std::get<1>(k), std::get<2>(k), std::get<3>(k), s});
    }
    return out;
}

}  // namespace

std::vector<GroupRow> group_by_maturity(const PricingReport& report) {
    return group(report, [](const PricingCell& c) { return c.maturity; });
}

std::vector<GroupRow> group_by_strike(const PricingReport& report) {
    return group(report, [](const PricingCell& c) { return c.strike; });
}

std::vector<GroupRow> group_by_scenario(const PricingReport& report) {
    return group(report, [](const PricingCell&) { return 0.0; });
}

std::vector<AtmRow> atm_one_year(const PricingReport& report) {
    std::vector<AtmRow> out;
    for (const auto& c : report.cells) {
        if (!c.ok() || std::abs(c.strike - 1.0) > 1e-9 || std::abs(c.maturity - 1.0) > 1e-9) continue;
        out.push_back({c.model, c.scenario, c.rate, c.european, c.deamericanized,
                       std::abs(c.european - c.deamericanized) / c.european});
    }
    return out;
}

std::vector<AtmSummary> summarize_atm(const std::vector<AtmRow>& rows) {
    std::map<ModelKind, AtmSummary> acc;
    for (const auto& r : rows) {
        auto [it, fresh] = acc.try_emplace(r.model, AtmSummary{r.model, 0, 0.0, 0.0});
        auto& s = it->second;
        ++s.count;
        s.mean_rel_error += r.rel_error;
        s.peak_rel_error = std::max(s.peak_rel_error, r.rel_error);
    }
    std::vector<AtmSummary> out;
    for (auto& [m, s] : acc) {
        s.mean_rel_error /= static_cast<double>(s.count);
        out.push_back(s);
    }
    return out;
}

std::vector<std::filesystem::path> write_pricing_report(const PricingReport& report,
                                                        const std::filesystem::path& dir) {
    using detail::CsvFile;
    const auto f = format_number;
    std::vector<std::filesystem::path> files;

    {
        CsvFile csv(dir / "pricing_cells.csv", {"model", "scenario", "rate", "strike", "maturity", "american",
                                                "european", "deamericanized", "error", "status"});
        for (const auto& c : report.cells) {
            const bool ok = c.ok();
            csv.row({std::string(to_string(c.model)), label(c.scenario), f(c.rate), f(c.strike), f(c.maturity),
                     c.status.rfind("pde", 0) == 0 ? "" : f(c.american),
                     c.status.rfind("pde", 0) == 0 ? "" : f(c.european), ok ? f(c.deamericanized) : "",
                     ok ? f(c.error()) : "", ok ? "ok" : c.status});
        }
        files.push_back(csv.path());
    }
    auto write_groups = [&](const char* name, const char* key, const std::vector<GroupRow>& rows) {
        CsvFile csv(dir / name, {"model", "scenario", "rate", key, "count", "failed", "avg_error", "max_error",
                                 "max_european"});
        for (const auto& g : rows) {
            csv.row({std::string(to_string(g.model)), label(g.scenario), f(g.rate), f(g.key),
                     std::to_string(g.stats.count), std::to_string(g.stats.failed), f(g.stats.avg_error),
                     f(g.stats.max_error), f(g.stats.max_european)});
        }
        files.push_back(csv.path());
    };
    write_groups("pricing_by_maturity.csv", "maturity", group_by_maturity(report));
    write_groups("pricing_by_strike.csv", "strike", group_by_strike(report));

    const auto atm = atm_one_year(report);
    {
        CsvFile csv(dir / "pricing_atm1y.csv", {"model", "scenario", "rate", "european", "deamericanized", "rel_error"});
        for (const auto& a : atm) {
            csv.row({std::string(to_string(a.model)), label(a.scenario), f(a.rate), f(a.european),
                     f(a.deamericanized), f(a.rel_error)});
        }
        files.push_back(csv.path());
    }
    {
        CsvFile csv(dir / "pricing_atm1y_summary.csv", {"model", "count", "mean_rel_error", "peak_rel_error"});
        for (const auto& s : summarize_atm(atm)) {
            csv.row({std::string(to_string(s.model)), std::to_string(s.count), f(s.mean_rel_error),
                     f(s.peak_rel_error)});
        }
        files.push_back(csv.path());
    }
    return files;
}

}  // namespace deam::cli
