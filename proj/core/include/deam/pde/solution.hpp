#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "deam/instruments.hpp"
#include "deam/models.hpp"

namespace deam::pde {

/// Nodal prices at maturity of a P(I)DE solve. The space coordinate is S
/// for CEV and x = log(S/K) for Heston and Merton; values are ordered with
/// x fastest.
struct PdeSolution {
    ModelKind model = ModelKind::cev;
    OptionSpec spec;
    double r = 0.0;
    std::vector<double> x;
    std::vector<double> v;
    /// Heston only: variance used when a query leaves it out (the model's v0).
    std::optional<double> initial_variance;
    Eigen::VectorXd values;

    /// Filled only when history was requested: the price slice after every
    /// time step, with the corresponding time to maturity.
    std::vector<double> times;
    std::vector<Eigen::VectorXd> history;

    std::size_t steps = 0;
    std::size_t lcp_iterations = 0;
    double lcp_residual = 0.0;

    /// Piecewise-linear (bilinear for Heston) interpolation in native coordinates.
    double evaluate(double coord, std::optional<double> variance = std::nullopt) const;

    /// Native coordinate of a spot price.
    double coordinate(double spot) const;

    double price_at(double spot, std::optional<double> variance = std::nullopt) const {
        return evaluate(coordinate(spot), variance);
    }

    /// Obstacle-free interpolation of an arbitrary slice on this grid.
    double evaluate_slice(const Eigen::VectorXd& slice, double coord,
                          std::optional<double> variance = std::nullopt) const;
};

/// Writes `coord[,v],value` rows of the final slice.
void write_csv(const PdeSolution& sol, std::ostream& out);

}  // namespace deam::pde
