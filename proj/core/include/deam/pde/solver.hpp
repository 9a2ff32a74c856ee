#pragma once

#include "deam/instruments.hpp"
#include "deam/models.hpp"
#include "deam/pde/assemble.hpp"
#include "deam/pde/grid.hpp"
#include "deam/pde/lcp.hpp"
#include "deam/pde/solution.hpp"

namespace deam::pde {

/// Point the grid is built around; it becomes a node so that pricing there
/// needs no interpolation. A variance <= 0 means the model's v0.
struct Anchor {
    double spot = 1.0;
    double variance = 0.0;
};

struct SolveOptions {
    bool keep_history = false;
};

/// PSOR for Merton, active set for CEV and Heston.
LcpConfig default_lcp(ModelKind model);

/// Space (and variance) nodes used for a contract.
struct Nodes {
    std::vector<double> x;
    std::vector<double> v;
};
Nodes build_nodes(const ModelParams& p, const OptionSpec& spec, const GridSpec& grid,
                  const Anchor& anchor);

/// Theta-scheme (Crank-Nicolson after implicit Euler half steps) from the
/// payoff to maturity. The exercise style of spec is ignored.
PdeSolution solve_european(const ModelParams& p, const OptionSpec& spec, double r,
                           const GridSpec& grid, const Anchor& anchor = {},
                           const SolveOptions& opts = {});

/// Same scheme with a linear complementarity problem per time step; the
/// payoff is the obstacle.
PdeSolution solve_american(const ModelParams& p, const OptionSpec& spec, double r,
                           const GridSpec& grid, const LcpConfig& lcp, const Anchor& anchor = {},
                           const SolveOptions& opts = {});

/// Dispatches on spec.exercise using the default LCP settings of the model.
PdeSolution solve(const ModelParams& p, const OptionSpec& spec, double r, const GridSpec& grid,
                  const Anchor& anchor = {}, const SolveOptions& opts = {});

}  // namespace deam::pde
