#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include "deam/cli/studies.hpp"
#include "deam/error.hpp"

#ifndef DEAM_VERSION
#define DEAM_VERSION "unknown"
#endif

namespace deam::cli {

std::string format_number(double x) {
    if (x == 0.0) return "0";  // no "-0"
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), end);
}

std::filesystem::path write_manifest(const RunConfig& cfg, const std::vector<std::filesystem::path>& files,
                                     const std::filesystem::path& dir) {
    using nlohmann::json;
    json models = json::array();
    for (auto m : cfg.models) models.push_back(std::string(deam::to_string(m)));
    json produced = json::array();
    for (const auto& f : files) produced.push_back(f.filename().string());

    auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
    const TreeConfig tree = cfg.tree();
    const McConfig mc = cfg.mc();

    json m = {
        {"study", std::string(to_string(cfg.study))},
        {"config",
         {{"models", models},
          {"scenarios", cfg.scenarios},
          {"rates", cfg.rates},
          {"strikes", cfg.strikes},
          {"maturities", cfg.maturities},
          {"seed", cfg.seed},
          {"fast", cfg.fast},
          {"workers", cfg.workers},
          {"scenario_file", cfg.scenario_file},
          {"overrides",
           {{"tree_dt", opt(cfg.tree_dt)},
            {"tree_tol", opt(cfg.tree_tol)},
            {"grid_scale", opt(cfg.grid_scale)},
            {"mc_paths", opt(cfg.mc_paths)},
            {"starts", opt(cfg.starts)},
            {"max_evaluations", opt(cfg.max_evaluations)}}},
          {"effective",
           {{"tree_dt", tree.dt},
            {"tree_tol", tree.bisection_tol},
            {"mc_paths", mc.n_paths},
            {"calibration_starts", cfg.calibration_starts()}}},
          {"market",
           {{"chain", cfg.chain_path},
            {"curve", cfg.curve_path},
            {"valuation_date", cfg.valuation_date},
            {"s0", cfg.s0}}},
          {"exotic_maturity", cfg.exotic_maturity},
          {"calibration_dir", cfg.calibration_dir}}},
        {"versions",
         {{"deam", DEAM_VERSION},
          {"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION}}},
        {"seed", cfg.seed},
        {"files", produced},
    };

    const auto path = dir / "run_manifest.json";
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << m.dump(2) << '\n';
    return path;
}

}  // namespace deam::cli
