#include "deam/pde/solution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "deam/error.hpp"

namespace deam::pde {

namespace {

struct Bracket {
    std::size_t i;
    double w;
};

Bracket locate(const std::vector<double>& nodes, double q, const char* axis) {
    if (!(q >= nodes.front() && q <= nodes.back())) {
        throw DomainError(std::string("query outside the ") + axis + " range of the grid");
    }
    auto it = std::upper_bound(nodes.begin(), nodes.end(), q);
    std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    i = std::clamp<std::size_t>(i, 1, nodes.size() - 1) - 1;
    const double w = (q - nodes[i]) / (nodes[i + 1] - nodes[i]);
    return {i, w};
}

double lerp(double a, double b, double w) { return w == 0.0 ? a : (w == 1.0 ? b : a + w * (b - a)); }

}  // namespace

double PdeSolution::coordinate(double spot) const {
    if (!(spot > 0.0)) throw DomainError("spot must be positive");
    return model == ModelKind::cev ? spot : std::log(spot / spec.strike);
}

double PdeSolution::evaluate_slice(const Eigen::VectorXd& slice, double coord,
                                   std::optional<double> variance) const {
    const Bracket bx = locate(x, coord, "space");
    const std::size_t nx = x.size();
    if (v.empty()) return lerp(slice[bx.i], slice[bx.i + 1], bx.w);
    if (!variance) variance = initial_variance;
    if (!variance) throw UsageError("Heston evaluation needs a variance");
    const Bracket bv = locate(v, *variance, "variance");
    auto at = [&](std::size_t i, std::size_t j) { return slice[static_cast<Eigen::Index>(j * nx + i)]; };
    const double lo = lerp(at(bx.i, bv.i), at(bx.i + 1, bv.i), bx.w);
    const double hi = lerp(at(bx.i, bv.i + 1), at(bx.i + 1, bv.i + 1), bx.w);
    return lerp(lo, hi, bv.w);
}

double PdeSolution::evaluate(double coord, std::optional<double> variance) const {
    return evaluate_slice(values, coord, variance);
}

void write_csv(const PdeSolution& sol, std::ostream& out) {
    const char* coord = sol.model == ModelKind::cev ? "S" : "x";
    out << coord << (sol.v.empty() ? "" : ",v") << ",value\n";
    out << std::setprecision(12);
    const std::size_t nx = sol.x.size();
    const std::size_t nv = sol.v.empty() ? 1 : sol.v.size();
    for (std::size_t j = 0; j < nv; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            out << sol.x[i];
            if (!sol.v.empty()) out << ',' << sol.v[j];
            out << ',' << sol.values[static_cast<Eigen::Index>(j * nx + i)] << '\n';
        }
    }
}

}  // namespace deam::pde
