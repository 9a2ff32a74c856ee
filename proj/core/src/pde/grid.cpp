#include "deam/pde/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deam/error.hpp"

namespace deam::pde {

std::vector<double> make_axis(const Axis& axis, double anchor) {
    if (!(axis.hi > axis.lo) || axis.n < 3) throw ConfigError("axis needs lo < hi and n >= 3");
    const double a = std::clamp(anchor, axis.lo, axis.hi);
    const std::size_t intervals = axis.n - 1;

    // map lo..hi to a computational coordinate s with the anchor at s = 0
    const bool stretched = axis.concentration > 0.0;
    auto to_s = [&](double y) {
        return stretched ? std::asinh((y - a) / axis.concentration) : y - a;
    };
    auto from_s = [&](double s) {
        return stretched ? a + axis.concentration * std::sinh(s) : a + s;
    };
    const double s_lo = to_s(axis.lo);
    const double s_hi = to_s(axis.hi);

    // split the intervals between the two sides so both spacings stay close
    auto left = static_cast<std::size_t>(
        std::llround(static_cast<double>(intervals) * (-s_lo) / (s_hi - s_lo)));
    if (a > axis.lo) left = std::max<std::size_t>(left, 1);
    if (a < axis.hi) left = std::min(left, intervals - 1);
    if (a == axis.lo) left = 0;
    if (a == axis.hi) left = intervals;
    const std::size_t right = intervals - left;

    std::vector<double> nodes(axis.n);
    for (std::size_t i = 0; i < left; ++i) {
        const double w = static_cast<double>(left - i) / static_cast<double>(left);
        nodes[i] = from_s(w * s_lo);
    }
    nodes[left] = a;
    for (std::size_t i = 1; i <= right; ++i) {
        const double w = static_cast<double>(i) / static_cast<double>(right);
        nodes[left + i] = from_s(w * s_hi);
    }
    nodes.front() = axis.lo;
    nodes.back() = axis.hi;
    return nodes;
}

GridSpec GridSpec::defaults(ModelKind model) {
    GridSpec g;
    g.model = model;
    switch (model) {
        case ModelKind::cev:
            g.space = {0.01, 2.0, 1000, 0.3};
            break;
        case ModelKind::heston:
            g.space = {-5.0, 5.0, 97, 0.5};
            g.variance = Axis{1e-5, 3.0, 49, 0.1};
            break;
        case ModelKind::merton:
            g.space = {-5.0, 5.0, 192, 0.5};
            break;
    }
    return g;
}

namespace {

Axis refine_axis(Axis a, double factor) {
    const double intervals = static_cast<double>(a.n - 1) * factor;
    a.n = std::max<std::size_t>(3, static_cast<std::size_t>(std::llround(intervals)) + 1);
    return a;
}

}  // namespace

GridSpec GridSpec::refined(double factor) const {
    if (!(factor > 0.0)) throw ConfigError("refinement factor must be positive");
    GridSpec g = *this;
    g.space = refine_axis(space, factor);
    if (variance) g.variance = refine_axis(*variance, factor);
    g.dt = dt / factor;
    return g;
}

void GridSpec::validate() const {
    auto check = [](const Axis& a, const char* name) {
        if (!(a.hi > a.lo)) throw ConfigError(std::string(name) + " axis bounds must be ordered");
        if (a.n < 3) throw ConfigError(std::string(name) + " axis needs at least 3 nodes");
        if (!(a.concentration >= 0.0)) throw ConfigError("axis concentration must be >= 0");
    };
    check(space, "space");
    if (model == ModelKind::heston) {
        if (!variance) throw ConfigError("Heston grid needs a variance axis");
        check(*variance, "variance");
        if (!(variance->lo > 0.0)) throw ConfigError("variance axis must start above zero");
    } else if (variance) {
        throw ConfigError("variance axis is only used by the Heston model");
    }
    if (model == ModelKind::cev && !(space.lo > 0.0)) {
        throw ConfigError("CEV spot axis must start above zero");
    }
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
}

}  // namespace deam::pde
