#include <algorithm>
#include <fstream>

#include "deam/cli/studies.hpp"
#include "deam/error.hpp"
#include "deam/pde/grid.hpp"

namespace deam::cli {

std::string_view to_string(Study s) {
    switch (s) {
        case Study::pricing: return "pricing";
        case Study::calibrate_synthetic: return "calib-syn";
        case Study::calibrate_market: return "calib-mkt";
        case Study::exotics: return "exotics";
    }
    return "unknown";
}

void RunConfig::validate() const {
    if (models.empty()) throw ConfigError("no model selected");
    if (scenarios.empty()) throw ConfigError("no scenario selected");
    for (double r : rates)
        if (!(r >= 0.0)) throw ConfigError("rates must be non-negative");
    if (tree_dt && !(*tree_dt > 0.0)) throw ConfigError("tree step must be positive");
    if (grid_scale && !(*grid_scale > 0.0)) throw ConfigError("grid scale must be positive");
    if (!(exotic_maturity > 0.0)) throw ConfigError("exotic maturity must be positive");
    if (!(s0 > 0.0)) throw ConfigError("spot must be positive");
    if (workers == 0) throw ConfigError("at least one worker is needed");
    for (auto m : models) (void)resolve_scenarios(m);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const auto probe = out_dir / ".deam_write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw ConfigError("output directory '" + out_dir.string() + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
}

std::vector<Scenario> RunConfig::resolve_scenarios(ModelKind model) const {
    std::vector<Scenario> all = scenario_file.empty() ? benchmark_scenarios(model) : load_scenarios(scenario_file);
    std::vector<Scenario> out;
    for (auto& s : all) {
        if (s.model != model) continue;
        if (std::find(scenarios.begin(), scenarios.end(), s.index) == scenarios.end()) continue;
        out.push_back(std::move(s));
    }
    if (out.empty()) throw ConfigError("no scenario left for model " + std::string(deam::to_string(model)));
    return out;
}

std::vector<double> RunConfig::resolve_rates(const std::vector<double>& defaults) const {
    return rates.empty() ? defaults : rates;
}

pde::GridSpec RunConfig::grid(ModelKind model) const {
    const double scale = grid_scale.value_or(fast ? 0.5 : 1.0);
    const auto g = pde::GridSpec::defaults(model);
    return scale == 1.0 ? g : g.refined(scale);
}

PricerConfig RunConfig::pricer(ModelKind model) const {
    PricerConfig p = PricerConfig::defaults(model);
    p.grid = grid(model);
    p.workers = 1;
    return p;
}

TreeConfig RunConfig::tree() const {
    TreeConfig t;
    t.dt = tree_dt.value_or(fast ? 2.0 * t.dt : t.dt);
    if (tree_tol) t.bisection_tol = *tree_tol;
    return t;
}

McConfig RunConfig::mc() const {
    McConfig m;
    m.n_paths = mc_paths.value_or(fast ? 100'000 : m.n_paths);
    m.seed = seed;
    m.workers = workers;
    return m;
}

std::size_t RunConfig::calibration_starts() const { return starts.value_or(fast ? 4 : 8); }

}  // namespace deam::cli
