#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "deam/models.hpp"

namespace deam::pde {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using DenseRowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Finite-difference generator on a node set. The mass matrix is the
/// identity. Rows of boundary nodes are left empty; the solver replaces them
/// by boundary conditions.
///
/// Unknowns are ordered with x fastest: index = j * x.size() + i.
struct DiscreteOperator {
    ModelKind model = ModelKind::cev;
    std::vector<double> x;  ///< S for CEV, log(S/K) otherwise
    std::vector<double> v;  ///< Heston variance nodes, empty otherwise
    SparseRowMatrix local;  ///< diffusion, drift and discounting
    DenseRowMatrix jump;    ///< lambda times the jump integral, Merton only (all rows)
    std::vector<char> interior;

    std::size_t size() const { return interior.size(); }
    bool has_jumps() const { return jump.size() > 0; }
};

/// Weights for a * u'' + b * u' at a node with neighbours at distance hm
/// (left) and hp (right). Central differences, switched to one-sided drift
/// when central weights would make an off-diagonal negative.
struct Stencil3 {
    double lo;
    double mid;
    double hi;
};
Stencil3 diffusion_drift_stencil(double hm, double hp, double a, double b);

/// (W u)_i = integral of u_h(x_i + z) against the N(alpha, beta^2) density,
/// with u_h the piecewise-linear interpolant and zero outside the grid.
DenseRowMatrix jump_weights(const std::vector<double>& x, double alpha, double beta);

DiscreteOperator assemble_cev(const CevParams& p, const std::vector<double>& s, double r);
DiscreteOperator assemble_heston(const HestonParams& p, const std::vector<double>& x,
                                 const std::vector<double>& v, double r);
DiscreteOperator assemble_merton(const MertonParams& p, const std::vector<double>& x, double r);

DiscreteOperator assemble(const ModelParams& p, const std::vector<double>& x,
                          const std::vector<double>& v, double r);

}  // namespace deam::pde
