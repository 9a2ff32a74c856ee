#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "deam/pde/assemble.hpp"

namespace deam::pde {

enum class LcpMethod { psor, pdas };

struct LcpConfig {
    LcpMethod method = LcpMethod::psor;
    double omega = 1.5;  ///< PSOR relaxation, in (0, 2)
    double tol = 1e-8;   ///< PSOR: max update, relative to max(1, |u|)
    std::size_t max_iters = 10000;

    void validate() const;
};

struct LcpStats {
    std::size_t iterations = 0;
    double residual = 0.0;  ///< max complementarity violation after the solve
};

// Each solver finds u with
//   B u >= rhs,  u >= g,  (B u - rhs)_i (u - g)_i = 0   where mask[i] != 0,
//   (B u)_i = rhs_i                                      elsewhere.
// u holds the starting guess on entry.

LcpStats psor(const SparseRowMatrix& B, const Eigen::VectorXd& rhs, const Eigen::VectorXd& g,
              const std::vector<char>& mask, Eigen::VectorXd& u, const LcpConfig& cfg);
LcpStats psor(const DenseRowMatrix& B, const Eigen::VectorXd& rhs, const Eigen::VectorXd& g,
              const std::vector<char>& mask, Eigen::VectorXd& u, const LcpConfig& cfg);

/// Primal-dual active set iteration. Keeps its active set between calls so
/// consecutive time steps start from the previous exercise region; the
/// sparse variant also reuses the symbolic factorization.
class Pdas {
public:
    explicit Pdas(const SparseRowMatrix& B);
    explicit Pdas(const DenseRowMatrix& B);
    ~Pdas();
    Pdas(Pdas&&) noexcept;
    Pdas& operator=(Pdas&&) noexcept;

    LcpStats solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& g,
                   const std::vector<char>& mask, Eigen::VectorXd& u, const LcpConfig& cfg);

    const std::vector<char>& active() const;
    void warm_start(const std::vector<char>& active);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Complementarity residual used for LcpStats::residual.
double lcp_residual(const Eigen::VectorXd& Bu_minus_rhs, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& g, const std::vector<char>& mask);

}  // namespace deam::pde
