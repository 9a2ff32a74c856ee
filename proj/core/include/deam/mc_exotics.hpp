#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "deam/models.hpp"
#include "deam/parallel.hpp"

namespace deam {

struct McConfig {
    std::size_t n_paths = 1'000'000;
    std::size_t steps_per_year = 400;
    bool antithetic = true;
    std::uint64_t seed = 42;
    /// Paths per random stream. Streams are seeded from (seed, block), so
    /// results do not depend on the number of workers.
    std::size_t block_size = 2048;
    std::size_t workers = default_workers();

    void validate() const;
};

enum class ExoticKind { down_and_out_call, lookback_call };
std::string_view to_string(ExoticKind k);

struct ExoticSpec {
    ExoticKind kind = ExoticKind::down_and_out_call;
    double s0 = 1.0;
    double barrier = 0.9;  ///< down-and-out only
    double strike = 1.05;
    double maturity = 1.0;

    /// Barrier at 90% and strike at 105% of the spot.
    static ExoticSpec standard(ExoticKind kind, double s0 = 1.0, double maturity = 1.0);
    void validate() const;
};

/// Terminal value and running extremes (at the simulation dates, spot included) per path.
/// With antithetic sampling paths 2k and 2k+1 form a mirrored pair.
struct PathEnsemble {
    double s0 = 1.0;
    double r = 0.0;
    double maturity = 1.0;
    std::size_t steps = 0;
    bool antithetic = false;
    std::vector<double> terminal;
    std::vector<double> running_min;
    std::vector<double> running_max;

    std::size_t size() const { return terminal.size(); }
};

/// Euler schemes: CEV with reflection at zero, Heston with full truncation
/// and log-Euler spot, Merton log-Euler with compound Poisson jumps.
PathEnsemble simulate_paths(const ModelParams& p, double s0, double r, double maturity,
                            const McConfig& cfg);

struct McEstimate {
    double price = 0.0;
    double std_err = 0.0;
};

/// Discounted sample mean of payoff(path index). Antithetic pairs are
/// averaged first so the standard error reflects the pairing.
McEstimate estimate(const PathEnsemble& paths, const std::function<double(std::size_t)>& payoff);

McEstimate price_down_and_out_call(const PathEnsemble& paths, const ExoticSpec& spec);
McEstimate price_lookback_call(const PathEnsemble& paths, const ExoticSpec& spec);
McEstimate price_vanilla_call(const PathEnsemble& paths, double strike);
McEstimate price_exotic(const PathEnsemble& paths, const ExoticSpec& spec);

/// Order-fixed pairwise summation.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace deam
