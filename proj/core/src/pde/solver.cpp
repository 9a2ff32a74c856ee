#include "deam/pde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

#include <Eigen/SparseLU>

#include "deam/error.hpp"
#include "deam/pde/merton_lift.hpp"
#include "deam/reference_pricing.hpp"

namespace deam::pde {

LcpConfig default_lcp(ModelKind model) {
    LcpConfig cfg;
    if (model != ModelKind::merton) cfg.method = LcpMethod::pdas;
    return cfg;
}

Nodes build_nodes(const ModelParams& p, const OptionSpec& spec, const GridSpec& grid,
                  const Anchor& anchor) {
    grid.validate();
    if (grid.model != kind_of(p)) throw ConfigError("grid and model parameters disagree");
    if (!(anchor.spot > 0.0)) throw DomainError("anchor spot must be positive");
    Nodes nodes;
    if (grid.model == ModelKind::cev) {
        Axis a = grid.space;
        a.lo *= anchor.spot;
        a.hi *= anchor.spot;
        a.concentration *= anchor.spot;
        // keep far out-of-the-money call strikes well inside the domain
        a.hi = std::max(a.hi, spec.strike / 0.75);
        nodes.x = make_axis(a, anchor.spot);
        return nodes;
    }
    nodes.x = make_axis(grid.space, std::log(anchor.spot / spec.strike));
    if (grid.model == ModelKind::heston) {
        const double v0 = anchor.variance > 0.0 ? anchor.variance : std::get<HestonParams>(p).v0;
        nodes.v = make_axis(*grid.variance, v0);
    }
    return nodes;
}

namespace {

using Fill = std::function<void(double, Eigen::VectorXd&)>;

// Discrete problem in the solver's unknowns (P itself, or P - Psi for Merton).
struct Problem {
    DiscreteOperator op;
    Eigen::VectorXd initial;
    std::vector<Eigen::Triplet<double>> boundary_rows;
    Fill boundary_values;  // writes the right-hand side of algebraic rows
    Fill source;           // interior source term, may be empty
    Fill obstacle;
    Fill to_price;  // may be empty
};

double payoff(const OptionSpec& spec, double spot) {
    return spec.is_put() ? std::max(spec.strike - spot, 0.0) : std::max(spot - spec.strike, 0.0);
}

Problem cev_problem(const CevParams& p, const OptionSpec& spec, double r, const Nodes& nodes) {
    Problem pb;
    pb.op = assemble_cev(p, nodes.x, r);
    const auto& s = pb.op.x;
    const auto n = static_cast<Eigen::Index>(s.size());
    pb.initial.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) pb.initial[i] = payoff(spec, s[i]);
    pb.boundary_rows = {{0, 0, 1.0}, {static_cast<int>(n - 1), static_cast<int>(n - 1), 1.0}};
    const double k = spec.strike, s_min = s.front(), s_max = s.back();
    pb.boundary_values = [=](double t, Eigen::VectorXd& b) {
        const double dk = k * std::exp(-r * t);
        if (!spec.is_put()) {
            b[0] = 0.0;
            b[n - 1] = s_max - dk;
        } else {
            b[0] = spec.is_american() ? k - s_min : dk - s_min;
            b[n - 1] = 0.0;
        }
    };
    pb.obstacle = [init = pb.initial](double, Eigen::VectorXd& g) { g = init; };
    return pb;
}

Problem merton_problem(const MertonParams& p, const OptionSpec& spec, double r, const Nodes& nodes) {
    Problem pb;
    pb.op = assemble_merton(p, nodes.x, r);
    const auto x = pb.op.x;
    const auto n = static_cast<Eigen::Index>(x.size());
    const double k = spec.strike;
    Eigen::VectorXd pay(n);
    for (Eigen::Index i = 0; i < n; ++i) pay[i] = payoff(spec, k * std::exp(x[i]));
    auto lift = [=](double t, Eigen::VectorXd& out) {
        out.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) out[i] = merton_lift(spec, t, x[i], k, r);
    };
    Eigen::VectorXd psi0;
    lift(0.0, psi0);
    pb.initial = pay - psi0;
    pb.boundary_rows = {{0, 0, 1.0}, {static_cast<int>(n - 1), static_cast<int>(n - 1), 1.0}};
    pb.boundary_values = [n](double, Eigen::VectorXd& b) {
        b[0] = 0.0;
        b[n - 1] = 0.0;
    };
    pb.source = [=](double t, Eigen::VectorXd& f) {
        f.setZero(n);
        for (Eigen::Index i = 1; i + 1 < n; ++i) f[i] = merton_lift_source(p, spec, t, x[i], r).source;
    };
    pb.obstacle = [=](double t, Eigen::VectorXd& g) {
        lift(t, g);
        g = pay - g;
    };
    pb.to_price = [=](double t, Eigen::VectorXd& u) {
        Eigen::VectorXd psi;
        lift(t, psi);
        u += psi;
    };
    return pb;
}

Problem heston_problem(const HestonParams& p, const OptionSpec& spec, double r, const Nodes& nodes) {
    Problem pb;
    pb.op = assemble_heston(p, nodes.x, nodes.v, r);
    const auto x = pb.op.x;
    const auto v = pb.op.v;
    const std::size_t nx = x.size(), nv = v.size();
    const auto n = static_cast<Eigen::Index>(nx * nv);
    const double k = spec.strike;
    auto idx = [nx](std::size_t i, std::size_t j) { return static_cast<int>(j * nx + i); };

    pb.initial.resize(n);
    for (std::size_t j = 0; j < nv; ++j)
        for (std::size_t i = 0; i < nx; ++i) pb.initial[idx(i, j)] = payoff(spec, k * std::exp(x[i]));
    pb.obstacle = [init = pb.initial](double, Eigen::VectorXd& g) { g = init; };

    auto& rows = pb.boundary_rows;
    if (spec.is_american()) {
        for (std::size_t j = 0; j < nv; ++j) {
            rows.emplace_back(idx(0, j), idx(0, j), 1.0);
            rows.emplace_back(idx(nx - 1, j), idx(nx - 1, j), 1.0);
        }
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            rows.emplace_back(idx(i, 0), idx(i, 0), 1.0);
            rows.emplace_back(idx(i, 0), idx(i, 1), -1.0);
            rows.emplace_back(idx(i, nv - 1), idx(i, nv - 1), 1.0);
            rows.emplace_back(idx(i, nv - 1), idx(i, nv - 2), -1.0);
        }
        const Eigen::VectorXd init = pb.initial;
        pb.boundary_values = [=](double, Eigen::VectorXd& b) {
            for (std::size_t j = 0; j < nv; ++j) {
                b[idx(0, j)] = init[idx(0, j)];
                b[idx(nx - 1, j)] = init[idx(nx - 1, j)];
            }
            for (std::size_t i = 1; i + 1 < nx; ++i) b[idx(i, 0)] = b[idx(i, nv - 1)] = 0.0;
        };
        return pb;
    }

    for (std::size_t i = 0; i < nx; ++i) {
        rows.emplace_back(idx(i, 0), idx(i, 0), 1.0);
        rows.emplace_back(idx(i, nv - 1), idx(i, nv - 1), 1.0);
    }
    // linear in x at both ends: the end node continues the neighbouring secant
    const double lo_ratio = (x[1] - x[0]) / (x[2] - x[1]);
    const double hi_ratio = (x[nx - 1] - x[nx - 2]) / (x[nx - 2] - x[nx - 3]);
    for (std::size_t j = 1; j + 1 < nv; ++j) {
        rows.emplace_back(idx(0, j), idx(0, j), 1.0);
        rows.emplace_back(idx(0, j), idx(1, j), -(1.0 + lo_ratio));
        rows.emplace_back(idx(0, j), idx(2, j), lo_ratio);
        rows.emplace_back(idx(nx - 1, j), idx(nx - 1, j), 1.0);
        rows.emplace_back(idx(nx - 1, j), idx(nx - 2, j), -(1.0 + hi_ratio));
        rows.emplace_back(idx(nx - 1, j), idx(nx - 3, j), hi_ratio);
    }
    const double vol_min = std::sqrt(v.front());
    pb.boundary_values = [=](double t, Eigen::VectorXd& b) {
        for (std::size_t i = 0; i < nx; ++i) {
            const double spot = k * std::exp(x[i]);
            b[idx(i, 0)] = t > 0.0 ? bs_price(OptionSpec(spec.type, Exercise::european, k, t), spot, r, vol_min)
                                   : payoff(spec, spot);
            b[idx(i, nv - 1)] = spec.is_put() ? k * std::exp(-r * t) : spot;
        }
        for (std::size_t j = 1; j + 1 < nv; ++j) b[idx(0, j)] = b[idx(nx - 1, j)] = 0.0;
    };
    return pb;
}

Problem make_problem(const ModelParams& p, const OptionSpec& spec, double r, const Nodes& nodes) {
    switch (kind_of(p)) {
        case ModelKind::cev: return cev_problem(std::get<CevParams>(p), spec, r, nodes);
        case ModelKind::heston: return heston_problem(std::get<HestonParams>(p), spec, r, nodes);
        case ModelKind::merton: return merton_problem(std::get<MertonParams>(p), spec, r, nodes);
    }
    throw ConfigError("unknown model");
}

// Left-hand matrix I - theta k L on interior rows, boundary conditions elsewhere.
struct StepSystem {
    double theta;
    double k;
    bool dense = false;
    SparseRowMatrix sparse_matrix;
    DenseRowMatrix dense_matrix;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> sparse_lu;
    Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu;
    std::unique_ptr<Pdas> pdas;

    StepSystem(const Problem& pb, double theta_, double k_) : theta(theta_), k(k_) {
        const auto& op = pb.op;
        const auto n = static_cast<Eigen::Index>(op.size());
        const double c = theta * k;
        if (op.has_jumps()) {
            dense = true;
            dense_matrix = DenseRowMatrix::Zero(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!op.interior[i]) continue;
                dense_matrix.row(i) = -c * op.jump.row(i);
                for (SparseRowMatrix::InnerIterator it(op.local, i); it; ++it)
                    dense_matrix(i, it.col()) -= c * it.value();
                dense_matrix(i, i) += 1.0;
            }
            for (const auto& t : pb.boundary_rows) dense_matrix(t.row(), t.col()) += t.value();
        } else {
            std::vector<Eigen::Triplet<double>> trip = pb.boundary_rows;
            trip.reserve(trip.size() + static_cast<std::size_t>(op.local.nonZeros()) + op.size());
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!op.interior[i]) continue;
                trip.emplace_back(i, i, 1.0);
                for (SparseRowMatrix::InnerIterator it(op.local, i); it; ++it)
                    trip.emplace_back(i, it.col(), -c * it.value());
            }
            sparse_matrix.resize(n, n);
            sparse_matrix.setFromTriplets(trip.begin(), trip.end());
            sparse_matrix.makeCompressed();
        }
    }

    void factor_direct() {
        if (dense) {
            dense_lu.compute(Eigen::MatrixXd(dense_matrix));
            return;
        }
        Eigen::SparseMatrix<double> cols(sparse_matrix);
        sparse_lu.compute(cols);
        if (sparse_lu.info() != Eigen::Success) throw NumericalError("sparse LU factorization failed");
    }

    Eigen::VectorXd solve_direct(const Eigen::VectorXd& b) {
        if (dense) return dense_lu.solve(b);
        Eigen::VectorXd x = sparse_lu.solve(b);
        if (sparse_lu.info() != Eigen::Success) throw NumericalError("sparse LU solve failed");
        return x;
    }

    Pdas& active_set_solver() {
        if (!pdas) pdas = dense ? std::make_unique<Pdas>(dense_matrix) : std::make_unique<Pdas>(sparse_matrix);
        return *pdas;
    }
};

std::size_t step_count(double maturity, double dt) {
    const double ratio = maturity / dt;
    const double nearest = std::round(ratio);
    const double steps = std::abs(ratio - nearest) < 1e-9 ? nearest : std::ceil(ratio);
    return std::max<std::size_t>(1, static_cast<std::size_t>(steps));
}

PdeSolution march(const ModelParams& p, const OptionSpec& spec, double r, const GridSpec& grid,
                  const Anchor& anchor, const SolveOptions& opts, const LcpConfig* lcp) {
    validate(p);
    const Nodes nodes = build_nodes(p, spec, grid, anchor);
    Problem pb = make_problem(p, spec, r, nodes);
    const auto& op = pb.op;

    const std::size_t full = step_count(spec.maturity, grid.dt);
    const double k = spec.maturity / static_cast<double>(full);
    std::size_t half = std::min(grid.rannacher_half_steps, 2 * full);
    half -= half % 2;
    const std::size_t cn = full - half / 2;

    std::vector<std::unique_ptr<StepSystem>> systems;
    if (half > 0) systems.push_back(std::make_unique<StepSystem>(pb, 1.0, 0.5 * k));
    if (cn > 0) systems.push_back(std::make_unique<StepSystem>(pb, 0.5, k));
    if (!lcp) {
        for (auto& s : systems) s->factor_direct();
    }

    PdeSolution sol;
    sol.model = kind_of(p);
    sol.spec = spec;
    sol.r = r;
    sol.x = op.x;
    sol.v = op.v;
    if (const auto* h = std::get_if<HestonParams>(&p)) sol.initial_variance = h->v0;

    const auto n = static_cast<Eigen::Index>(op.size());
    Eigen::VectorXd u = pb.initial;
    Eigen::VectorXd f0, f1, g, rhs(n), lu(n);
    if (pb.source) pb.source(0.0, f0);
    double t = 0.0;
    const std::size_t total = half + cn;
    StepSystem* previous = nullptr;
    for (std::size_t step = 0; step < total; ++step) {
        StepSystem& sys = *systems[step < half ? 0 : systems.size() - 1];
        const double t1 = step + 1 == total ? spec.maturity : t + sys.k;

        lu = op.local * u;
        if (op.has_jumps()) lu.noalias() += op.jump * u;
        rhs = u + (1.0 - sys.theta) * sys.k * lu;
        if (pb.source) {
            pb.source(t1, f1);
            rhs += sys.k * (sys.theta * f1 + (1.0 - sys.theta) * f0);
        }
        pb.boundary_values(t1, rhs);

        if (!lcp) {
            u = sys.solve_direct(rhs);
        } else {
            pb.obstacle(t1, g);
            LcpStats stats;
            if (lcp->method == LcpMethod::psor) {
                stats = sys.dense ? psor(sys.dense_matrix, rhs, g, op.interior, u, *lcp)
                                  : psor(sys.sparse_matrix, rhs, g, op.interior, u, *lcp);
            } else {
                Pdas& solver = sys.active_set_solver();
                if (previous && previous != &sys && previous->pdas) solver.warm_start(previous->pdas->active());
                stats = solver.solve(rhs, g, op.interior, u, *lcp);
            }
            sol.lcp_iterations += stats.iterations;
            sol.lcp_residual = std::max(sol.lcp_residual, stats.residual);
        }
        if (pb.source) f0.swap(f1);
        if (opts.keep_history) {
            Eigen::VectorXd price = u;
            if (pb.to_price) pb.to_price(t1, price);
            sol.times.push_back(t1);
            sol.history.push_back(std::move(price));
        }
        previous = &sys;
        t = t1;
    }
    if (pb.to_price) pb.to_price(spec.maturity, u);
    sol.values = std::move(u);
    sol.steps = total;
    for (Eigen::Index i = 0; i < sol.values.size(); ++i) {
        if (!std::isfinite(sol.values[i])) throw NumericalError("non-finite value in the PDE solution");
    }
    return sol;
}

}  // namespace

PdeSolution solve_european(const ModelParams& p, const OptionSpec& spec, double r,
                           const GridSpec& grid, const Anchor& anchor, const SolveOptions& opts) {
    return march(p, spec.with_exercise(Exercise::european), r, grid, anchor, opts, nullptr);
}

PdeSolution solve_american(const ModelParams& p, const OptionSpec& spec, double r,
                           const GridSpec& grid, const LcpConfig& lcp, const Anchor& anchor,
                           const SolveOptions& opts) {
    lcp.validate();
    return march(p, spec.with_exercise(Exercise::american), r, grid, anchor, opts, &lcp);
}

PdeSolution solve(const ModelParams& p, const OptionSpec& spec, double r, const GridSpec& grid,
                  const Anchor& anchor, const SolveOptions& opts) {
    if (spec.is_american()) return solve_american(p, spec, r, grid, default_lcp(kind_of(p)), anchor, opts);
    return solve_european(p, spec, r, grid, anchor, opts);
}

}  // namespace deam::pde
