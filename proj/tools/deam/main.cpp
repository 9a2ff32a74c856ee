#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "deam/cli/studies.hpp"
#include "deam/data.hpp"
#include "deam/error.hpp"

using namespace deam;
using namespace deam::cli;

namespace {

struct Flags {
    std::vector<std::string> models;
    double tree_dt = 0.0, tree_tol = 0.0, grid_scale = 0.0;
    std::size_t paths = 0, starts = 0, max_evals = 0;
};

void add_common(CLI::App* cmd, RunConfig& cfg, Flags& flags) {
    cmd->add_option("--model", flags.models, "cev, heston, merton (repeat or comma separate)")->delimiter(',');
    cmd->add_option("--scenario", cfg.scenarios, "scenario indices 1..5")->delimiter(',');
    cmd->add_option("--rate", cfg.rates, "risk-free rates; default depends on the study")->delimiter(',');
    cmd->add_option("--out", cfg.out_dir, "output directory (default $DEAM_OUT_DIR or ./deam_out)");
    cmd->add_option("--seed", cfg.seed, "seed for multistart designs and Monte Carlo");
    cmd->add_flag("--fast", cfg.fast, "halved grids, 1e5 paths, 4 calibration starts");
    cmd->add_option("--workers", cfg.workers, "worker threads");
    cmd->add_option("--scenario-file", cfg.scenario_file, "JSON parameter sets");
    cmd->add_option("--tree-dt", flags.tree_dt, "binomial step");
    cmd->add_option("--tree-tol", flags.tree_tol, "tolerance of the up-factor search");
    cmd->add_option("--grid-scale", flags.grid_scale, "PDE resolution factor (0.5 halves)");
    cmd->add_option("--paths", flags.paths, "Monte Carlo paths");
    cmd->add_option("--starts", flags.starts, "calibration starts");
    cmd->add_option("--max-evals", flags.max_evals, "objective evaluations per start");
}

void finish(RunConfig& cfg, const Flags& flags) {
    if (!flags.models.empty()) {
        cfg.models.clear();
        for (const auto& m : flags.models) cfg.models.push_back(parse_model_kind(m));
    }
    if (flags.tree_dt > 0.0) cfg.tree_dt = flags.tree_dt;
    if (flags.tree_tol > 0.0) cfg.tree_tol = flags.tree_tol;
    if (flags.grid_scale > 0.0) cfg.grid_scale = flags.grid_scale;
    if (flags.paths > 0) cfg.mc_paths = flags.paths;
    if (flags.starts > 0) cfg.starts = flags.starts;
    if (flags.max_evals > 0) cfg.max_evaluations = flags.max_evals;
}

std::vector<std::filesystem::path> run(const RunConfig& cfg) {
    switch (cfg.study) {
        case Study::pricing: {
            const auto report = run_pricing_study(cfg);
            std::size_t failed = 0;
            for (const auto& c : report.cells) failed += !c.ok();
            if (failed) std::cerr << failed << " of " << report.cells.size() << " cells not de-Americanized\n";
            return write_pricing_report(report, cfg.out_dir);
        }
        case Study::calibrate_synthetic: return write_calibration_report(run_calibration_study(cfg), cfg.out_dir);
        case Study::calibrate_market: {
            const auto chain = load_option_chain(cfg.chain_path, cfg.valuation_date, cfg.s0);
            const auto curve = load_yield_curve(cfg.curve_path);
            return write_calibration_report(run_market_calibration(cfg, chain, curve), cfg.out_dir);
        }
        case Study::exotics: return write_exotics_report(run_exotics_study(cfg), cfg.out_dir);
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    Flags flags;
    if (const char* env = std::getenv("DEAM_OUT_DIR"); env && *env) {
        cfg.out_dir = env;
    } else {
        cfg.out_dir = "deam_out";
    }

    CLI::App app{"De-Americanization studies: pricing errors, calibration round trips, exotics"};
    app.require_subcommand(1);

    auto* pricing = app.add_subcommand("pricing", "de-Americanization errors on the pricing grid");
    add_common(pricing, cfg, flags);
    pricing->add_option("--strike", cfg.strikes, "restrict the grid to these strikes")->delimiter(',');
    pricing->add_option("--maturity", cfg.maturities, "restrict the grid to these maturities")->delimiter(',');
    pricing->callback([&] { cfg.study = Study::pricing; });

    auto* syn = app.add_subcommand("calib-syn", "calibration round trips on synthetic American data");
    add_common(syn, cfg, flags);
    syn->callback([&] { cfg.study = Study::calibrate_synthetic; });

    auto* mkt = app.add_subcommand("calib-mkt", "calibration to a market option chain");
    add_common(mkt, cfg, flags);
    mkt->add_option("--chain", cfg.chain_path, "CSV with type,strike,expiry,bid,ask")->required();
    mkt->add_option("--curve", cfg.curve_path, "CSV with tenor,rate")->required();
    mkt->add_option("--date", cfg.valuation_date, "valuation date (ISO)");
    mkt->add_option("--spot", cfg.s0, "spot price on the valuation date");
    mkt->callback([&] { cfg.study = Study::calibrate_market; });

    auto* exo = app.add_subcommand("exotics", "down-and-out and lookback calls under calibrated parameters");
    add_common(exo, cfg, flags);
    exo->add_option("--maturity", cfg.exotic_maturity, "maturity of both exotics");
    exo->add_option("--from", cfg.calibration_dir, "directory with calibration reports (default: calibrate inline)");
    exo->callback([&] { cfg.study = Study::exotics; });

    CLI11_PARSE(app, argc, argv);

    try {
        finish(cfg, flags);
        cfg.validate();
        auto files = run(cfg);
        files.push_back(write_manifest(cfg, files, cfg.out_dir));
        for (const auto& f : files) std::cout << f.string() << '\n';
    } catch (const Error& e) {
        std::cerr << "deam: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
