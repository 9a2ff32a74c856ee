#include "deam/pde/lcp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/SparseLU>

#include "deam/error.hpp"

namespace deam::pde {

void LcpConfig::validate() const {
    if (!(omega > 0.0 && omega < 2.0)) throw ConfigError("PSOR relaxation must lie in (0, 2)");
    if (!(tol > 0.0)) throw ConfigError("LCP tolerance must be positive");
    if (max_iters == 0) throw ConfigError("LCP needs at least one iteration");
}

double lcp_residual(const Eigen::VectorXd& Bu_minus_rhs, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& g, const std::vector<char>& mask) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double w = Bu_minus_rhs[i];
        const double e = mask[i] ? std::abs(std::min(w, u[i] - g[i])) : std::abs(w);
        worst = std::max(worst, e);
    }
    return worst;
}

namespace {

double row_dot(const SparseRowMatrix& B, Eigen::Index i, const Eigen::VectorXd& u, double& diag) {
    double sum = 0.0;
    for (SparseRowMatrix::InnerIterator it(B, i); it; ++it) {
        sum += it.value() * u[it.col()];
        if (it.col() == i) diag = it.value();
    }
    return sum;
}

double row_dot(const DenseRowMatrix& B, Eigen::Index i, const Eigen::VectorXd& u, double& diag) {
    diag = B(i, i);
    return B.row(i).dot(u);
}

template <class Matrix>
LcpStats psor_impl(const Matrix& B, const Eigen::VectorXd& rhs, const Eigen::VectorXd& g,
                   const std::vector<char>& mask, Eigen::VectorXd& u, const LcpConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = u.size();
    for (Eigen::Index i = 0; i < n; ++i)
        if (mask[i]) u[i] = std::max(u[i], g[i]);
    const double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
    double change = 0.0;
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        change = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double diag = 1.0;
            const double r = rhs[i] - row_dot(B, i, u, diag);
            // algebraic boundary rows are enforced without over-relaxation
            double next = u[i] + (mask[i] ? cfg.omega : 1.0) * r / diag;
            if (mask[i]) next = std::max(next, g[i]);
            change = std::max(change, std::abs(next - u[i]));
            u[i] = next;
        }
        if (change < cfg.tol * scale) {
            const Eigen::VectorXd w = B * u - rhs;
            return {it, lcp_residual(w, u, g, mask)};
        }
    }
    throw NumericalError("projected SOR did not converge", cfg.max_iters, change);
}

}  // namespace

LcpStats psor(const SparseRowMatrix& B, const Eigen::VectorXd& rhs, const Eigen::VectorXd& g,
              const std::vector<char>& mask, Eigen::VectorXd& u, const LcpConfig& cfg) {
    return psor_impl(B, rhs, g, mask, u, cfg);
}

LcpStats psor(const DenseRowMatrix& B, const Eigen::VectorXd& rhs, const Eigen::VectorXd& g,
              const std::vector<char>& mask, Eigen::VectorXd& u, const LcpConfig& cfg) {
    return psor_impl(B, rhs, g, mask, u, cfg);
}

struct Pdas::Impl {
    // exactly one of the two representations is used
    std::optional<SparseRowMatrix> sparse_rows;
    Eigen::SparseMatrix<double> sparse_cols;
    std::vector<std::vector<Eigen::Index>> row_slots;  // value slots of each row in sparse_cols
    std::vector<Eigen::Index> diag_slot;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> sparse_lu;
    bool analyzed = false;

    // tridiagonal systems skip the sparse LU: lo/mid/hi diagonals, Thomas sweep per solve
    bool tridiagonal = false;
    Eigen::VectorXd lo, mid, hi;

    DenseRowMatrix dense;
    Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu;

    std::vector<char> active;
    std::vector<char> factored_for;
    bool factored = false;

    Eigen::Index size() const { return sparse_rows ? sparse_rows->rows() : dense.rows(); }

    Eigen::VectorXd multiply(const Eigen::VectorXd& u) const {
        return sparse_rows ? Eigen::VectorXd(*sparse_rows * u) : Eigen::VectorXd(dense * u);
    }

    void factor() {
        if (tridiagonal) return;
        if (factored && factored_for == active) return;
        if (sparse_rows) {
            Eigen::SparseMatrix<double> m = sparse_cols;
            double* values = m.valuePtr();
            for (std::size_t i = 0; i < active.size(); ++i) {
                if (!active[i]) continue;
                for (auto slot : row_slots[i]) values[slot] = 0.0;
                values[diag_slot[i]] = 1.0;
            }
            if (!analyzed) {
                sparse_lu.analyzePattern(m);
                analyzed = true;
            }
            sparse_lu.factorize(m);
            if (sparse_lu.info() != Eigen::Success) {
                throw NumericalError("sparse LU failed inside the active set iteration");
            }
        } else {
            Eigen::MatrixXd m = dense;
            for (std::size_t i = 0; i < active.size(); ++i) {
                if (!active[i]) continue;
                const auto r = static_cast<Eigen::Index>(i);
                m.row(r).setZero();
                m(r, r) = 1.0;
            }
            dense_lu.compute(m);
        }
        factored_for = active;
        factored = true;
    }

    Eigen::VectorXd thomas(const Eigen::VectorXd& b) const {
        const Eigen::Index n = b.size();
        Eigen::VectorXd c(n), x(n);
        auto row = [&](Eigen::Index i, double& l, double& d, double& h) {
            if (active[static_cast<std::size_t>(i)]) {
                l = h = 0.0;
                d = 1.0;
            } else {
                l = lo[i], d = mid[i], h = hi[i];
            }
        };
        double l, d, h;
        row(0, l, d, h);
        c[0] = h / d;
        x[0] = b[0] / d;
        for (Eigen::Index i = 1; i < n; ++i) {
            row(i, l, d, h);
            const double m = d - l * c[i - 1];
            if (m == 0.0) throw NumericalError("zero pivot in the tridiagonal active set solve");
            c[i] = h / m;
            x[i] = (b[i] - l * x[i - 1]) / m;
        }
        for (Eigen::Index i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
        return x;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) {
        if (tridiagonal) return thomas(b);
        if (sparse_rows) {
            Eigen::VectorXd x = sparse_lu.solve(b);
            if (sparse_lu.info() != Eigen::Success) throw NumericalError("sparse LU solve failed");
            return x;
        }
        return dense_lu.solve(b);
    }
};

Pdas::Pdas(const SparseRowMatrix& B) : impl_(std::make_unique<Impl>()) {
    auto& s = *impl_;
    s.sparse_rows = B;
    s.sparse_cols = Eigen::SparseMatrix<double>(B);
    s.sparse_cols.makeCompressed();
    const auto n = static_cast<std::size_t>(B.rows());
    s.row_slots.assign(n, {});
    s.diag_slot.assign(n, -1);
    const auto* outer = s.sparse_cols.outerIndexPtr();
    const auto* inner = s.sparse_cols.innerIndexPtr();
    for (Eigen::Index c = 0; c < s.sparse_cols.cols(); ++c) {
        for (auto k = outer[c]; k < outer[c + 1]; ++k) {
            const auto r = static_cast<std::size_t>(inner[k]);
            s.row_slots[r].push_back(k);
            if (static_cast<Eigen::Index>(r) == c) s.diag_slot[r] = k;
        }
    }
    for (auto d : s.diag_slot)
        if (d < 0) throw ConfigError("active set solver needs a stored diagonal in every row");
    s.active.assign(n, 0);

    s.tridiagonal = n >= 2;
    s.lo = s.mid = s.hi = Eigen::VectorXd::Zero(B.rows());
    for (Eigen::Index r = 0; r < B.rows() && s.tridiagonal; ++r) {
        for (SparseRowMatrix::InnerIterator it(B, r); it; ++it) {
            const auto off = it.col() - r;
            if (off == -1) s.lo[r] = it.value();
            else if (off == 0) s.mid[r] = it.value();
            else if (off == 1) s.hi[r] = it.value();
            else if (it.value() != 0.0) s.tridiagonal = false;
        }
    }
}

Pdas::Pdas(const DenseRowMatrix& B) : impl_(std::make_unique<Impl>()) {
    impl_->dense = B;
    impl_->active.assign(static_cast<std::size_t>(B.rows()), 0);
}

Pdas::~Pdas() = default;
Pdas::Pdas(Pdas&&) noexcept = default;
Pdas& Pdas::operator=(Pdas&&) noexcept = default;

const std::vector<char>& Pdas::active() const { return impl_->active; }

void Pdas::warm_start(const std::vector<char>& active) {
    if (active.size() != impl_->active.size()) throw UsageError("active set size mismatch");
    impl_->active = active;
}

LcpStats Pdas::solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& g,
                     const std::vector<char>& mask, Eigen::VectorXd& u, const LcpConfig& cfg) {
    cfg.validate();
    auto& s = *impl_;
    const Eigen::Index n = s.size();
    if (rhs.size() != n || g.size() != n || static_cast<Eigen::Index>(mask.size()) != n) {
        throw UsageError("active set solver: dimension mismatch");
    }
    for (std::size_t i = 0; i < s.active.size(); ++i) s.active[i] = s.active[i] && mask[i];

    const double scale = std::max({1.0, rhs.cwiseAbs().maxCoeff(), g.cwiseAbs().maxCoeff()});
    const double eps = 1e-13 * scale;
    std::vector<char> next(s.active.size());
    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        s.factor();
        Eigen::VectorXd b = rhs;
        for (Eigen::Index i = 0; i < n; ++i)
            if (s.active[i]) b[i] = g[i];
        u = s.solve(b);
        const Eigen::VectorXd w = s.multiply(u) - rhs;
        for (Eigen::Index i = 0; i < n; ++i) {
            // multiplier is w on active nodes and zero elsewhere
            const double lambda = s.active[i] ? w[i] : 0.0;
            next[i] = mask[i] && (lambda + (g[i] - u[i]) > eps);
        }
        if (next == s.active) return {it, lcp_residual(w, u, g, mask)};
        s.active.swap(next);
    }
    throw NumericalError("active set iteration did not settle", cfg.max_iters);
}

}  // namespace deam::pde
