#include "deam/pde/assemble.hpp"

#include <cmath>

#include "deam/error.hpp"
#include "deam/reference_pricing.hpp"

namespace deam::pde {

Stencil3 diffusion_drift_stencil(double hm, double hp, double a, double b) {
    const double span = hm + hp;
    Stencil3 s{2.0 * a / (hm * span), -2.0 * a / (hm * hp), 2.0 * a / (hp * span)};
    const double lo_c = -b * hp / (hm * span);
    const double mid_c = b * (hp - hm) / (hm * hp);
    const double hi_c = b * hm / (hp * span);
    if (s.lo + lo_c >= 0.0 && s.hi + hi_c >= 0.0) {
        s.lo += lo_c;
        s.mid += mid_c;
        s.hi += hi_c;
    } else if (b > 0.0) {
        s.hi += b / hp;
        s.mid -= b / hp;
    } else {
        s.lo -= b / hm;
        s.mid += b / hm;
    }
    return s;
}

DenseRowMatrix jump_weights(const std::vector<double>& x, double alpha, double beta) {
    const auto n = static_cast<Eigen::Index>(x.size());
    DenseRowMatrix w = DenseRowMatrix::Zero(n, n);
    // integral over [a, b] of (y - a) and (b - y) against N(mu, beta^2)
    auto ramp_up = [beta](double a, double b, double mu) {
        const double za = (a - mu) / beta, zb = (b - mu) / beta;
        return (mu - a) * (norm_cdf(zb) - norm_cdf(za)) + beta * (norm_pdf(za) - norm_pdf(zb));
    };
    auto ramp_down = [beta](double a, double b, double mu) {
        const double za = (a - mu) / beta, zb = (b - mu) / beta;
        return (b - mu) * (norm_cdf(zb) - norm_cdf(za)) - beta * (norm_pdf(za) - norm_pdf(zb));
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mu = x[i] + alpha;
        for (Eigen::Index j = 0; j < n; ++j) {
            double sum = 0.0;
            if (j > 0) {
                const double a = x[j - 1], b = x[j];
                if (std::abs(mu - 0.5 * (a + b)) < 0.5 * (b - a) + 12.0 * beta)
                    sum += ramp_up(a, b, mu) / (b - a);
            }
            if (j + 1 < n) {
                const double a = x[j], b = x[j + 1];
                if (std::abs(mu - 0.5 * (a + b)) < 0.5 * (b - a) + 12.0 * beta)
                    sum += ramp_down(a, b, mu) / (b - a);
            }
            w(i, j) = sum;
        }
    }
    return w;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

DiscreteOperator one_dimensional(ModelKind model, const std::vector<double>& x, auto&& coeffs) {
    const std::size_t n = x.size();
    if (n < 3) throw ConfigError("grid needs at least 3 nodes");
    DiscreteOperator op;
    op.model = model;
    op.x = x;
    op.interior.assign(n, 1);
    op.interior.front() = op.interior.back() = 0;
    Triplets t;
    t.reserve(3 * n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const auto [a, b, c] = coeffs(x[i]);
        const Stencil3 s = diffusion_drift_stencil(x[i] - x[i - 1], x[i + 1] - x[i], a, b);
        const auto row = static_cast<int>(i);
        t.emplace_back(row, row - 1, s.lo);
        t.emplace_back(row, row, s.mid - c);
        t.emplace_back(row, row + 1, s.hi);
    }
    op.local.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    op.local.setFromTriplets(t.begin(), t.end());
    return op;
}

struct Coeffs {
    double diffusion;
    double drift;
    double discount;
};

}  // namespace

DiscreteOperator assemble_cev(const CevParams& p, const std::vector<double>& s, double r) {
    p.validate();
    if (!(s.front() > 0.0)) throw ConfigError("CEV grid must start above zero");
    return one_dimensional(ModelKind::cev, s, [&](double spot) {
        const double vol = p.sigma * std::pow(spot, p.zeta);
        return Coeffs{0.5 * vol * vol, r * spot, r};
    });
}

DiscreteOperator assemble_merton(const MertonParams& p, const std::vector<double>& x, double r) {
    p.validate();
    const double b = merton_drift(p, r);
    auto op = one_dimensional(ModelKind::merton, x, [&](double) {
        return Coeffs{0.5 * p.sigma * p.sigma, b, r + p.lambda};
    });
    if (p.lambda > 0.0) op.jump = p.lambda * jump_weights(x, p.alpha, p.beta);
    return op;
}

DiscreteOperator assemble_heston(const HestonParams& p, const std::vector<double>& x,
                                 const std::vector<double>& v, double r) {
    p.validate();
    const std::size_t nx = x.size(), nv = v.size();
    if (nx < 3 || nv < 3) throw ConfigError("Heston grid needs at least 3 nodes per axis");
    DiscreteOperator op;
    op.model = ModelKind::heston;
    op.x = x;
    op.v = v;
    op.interior.assign(nx * nv, 0);
    Triplets t;
    t.reserve(9 * nx * nv);
    auto idx = [nx](std::size_t i, std::size_t j) { return static_cast<int>(j * nx + i); };
    for (std::size_t j = 1; j + 1 < nv; ++j) {
        const double vj = v[j];
        const double vm = vj - v[j - 1], vp = v[j + 1] - vj;
        const Stencil3 sv =
            diffusion_drift_stencil(vm, vp, 0.5 * p.xi * p.xi * vj, p.kappa * (p.gamma - vj));
        const double cross = p.rho * p.xi * vj / (vm + vp);
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            op.interior[j * nx + i] = 1;
            const double xm = x[i] - x[i - 1], xp = x[i + 1] - x[i];
            const Stencil3 sx = diffusion_drift_stencil(xm, xp, 0.5 * vj, r - 0.5 * vj);
            const int row = idx(i, j);
            t.emplace_back(row, idx(i - 1, j), sx.lo);
            t.emplace_back(row, idx(i + 1, j), sx.hi);
            t.emplace_back(row, idx(i, j - 1), sv.lo);
            t.emplace_back(row, idx(i, j + 1), sv.hi);
            t.emplace_back(row, row, sx.mid + sv.mid - r);
            const double c = cross / (xm + xp);
            t.emplace_back(row, idx(i + 1, j + 1), c);
            t.emplace_back(row, idx(i - 1, j - 1), c);
            t.emplace_back(row, idx(i + 1, j - 1), -c);
            t.emplace_back(row, idx(i - 1, j + 1), -c);
        }
    }
    const auto n = static_cast<Eigen::Index>(nx * nv);
    op.local.resize(n, n);
    op.local.setFromTriplets(t.begin(), t.end());
    return op;
}

DiscreteOperator assemble(const ModelParams& p, const std::vector<double>& x,
                          const std::vector<double>& v, double r) {
    switch (kind_of(p)) {
        case ModelKind::cev: return assemble_cev(std::get<CevParams>(p), x, r);
        case ModelKind::heston: return assemble_heston(std::get<HestonParams>(p), x, v, r);
        case ModelKind::merton: return assemble_merton(std::get<MertonParams>(p), x, r);
    }
    throw ConfigError("unknown model");
}

}  // namespace deam::pde
