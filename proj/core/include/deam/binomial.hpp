#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "deam/instruments.hpp"

namespace deam {

/// Settings for the CRR tree and the up-factor search.
struct TreeConfig {
    double dt = 2e-4;                ///< target step; rescaled so the tree ends at maturity
    double bisection_tol = 1e-5;     ///< |tree price - target| stopping criterion
    std::size_t max_bisection_iters = 200;
    double exclusion_factor = 0.01;  ///< puts need price > intrinsic * (1 + delta)
    double u_upper_seed = 3.0;
    std::size_t max_doublings = 6;
    double lower_offset = 1e-8;

    void validate() const;
};

struct TreeQuoteResult {
    double u_star = 0.0;
    double european_price = 0.0;
    std::size_t n_steps = 0;
    std::size_t iterations = 0;
    /// False when u* lies below the lower bound that guarantees monotonicity
    /// of the tree price in u (the search fell back to u > e^{r dt}).
    bool within_admissible = true;
};

/// Risk-neutral up probability p = (e^{r dt} - 1/u) / (u - 1/u).
double up_probability(double u, double r, double dt);

/// Backward induction on an n-step CRR tree with up factor u and down 1/u.
/// American contracts take max(continuation, intrinsic) at every node.
double tree_value(const OptionSpec& spec, double s0, double r, double u, std::size_t n_steps,
                  double dt);

struct UBounds {
    double lower;
    double upper;
};

/// Bracket for the up factor. The lower end is the bound under which the
/// European put price is monotone in u: e^{r dt} + sqrt(e^{2 r dt} - 1),
/// raised to e^{r dt}/k when the strike ratio k = K/S0 < 1 leaves no room
/// below 1/k. The upper end is the configured seed.
UBounds admissible_u_bounds(double r, double dt, double k, const TreeConfig& cfg = {});

/// Number of tree steps for a maturity: ceil(T / dt), at least one.
std::size_t tree_steps(double maturity, double dt);

/// Smallest up factor whose American tree price is within the tolerance of
/// the target. Throws ImmediateExerciseError, BracketError or NumericalError.
TreeQuoteResult find_u_star(double target_american, const OptionSpec& spec, double s0, double r,
                            const TreeConfig& cfg = {});

/// Pseudo-European price: the European contract valued on the tree fitted
/// to the American quote.
double deamericanize(const Quote& quote, double s0, double r, const TreeConfig& cfg = {});

/// Per-quote outcome of a batch run; failures carry the exception message.
struct DeamOutcome {
    bool ok = false;
    double european_price = 0.0;
    std::string error;
};

/// De-Americanizes a quote list in parallel. Each quote uses rates[i].
std::vector<DeamOutcome> deamericanize_all(std::span<const Quote> quotes, double s0,
                                           std::span<const double> rates,
                                           const TreeConfig& cfg = {});

}  // namespace deam
