#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "deam/models.hpp"

namespace deam::pde {

/// One spatial axis. With concentration > 0 the nodes follow
/// y = anchor + c * sinh(s) for uniform s, clustering around the anchor;
/// c is the width of the fine region in axis units.
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 3;
    double concentration = 0.0;
};

/// Nodes of the axis with `anchor` (clamped into [lo, hi]) placed exactly on a node.
std::vector<double> make_axis(const Axis& axis, double anchor);

/// Discretization settings. For CEV, `space` is in units of spot
/// ([0.01, 2] means [0.01 S0, 2 S0]); for Heston and Merton it is x = log(S/K).
struct GridSpec {
    ModelKind model = ModelKind::cev;
    Axis space;
    std::optional<Axis> variance;      ///< Heston only
    double dt = 0.008;
    std::size_t rannacher_half_steps = 4;

    static GridSpec defaults(ModelKind model);

    /// Multiplies node intervals by `factor` and divides dt by it.
    GridSpec refined(double factor) const;

    void validate() const;
};

}  // namespace deam::pde
