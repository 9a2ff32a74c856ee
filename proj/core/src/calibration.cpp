#include "deam/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "deam/error.hpp"
#include "deam/parallel.hpp"

namespace deam {

std::string_view to_string(Selection s) {
    return s == Selection::puts_only ? "puts_only" : "otm_calls_and_puts";
}

std::string_view to_string(Route r) {
    return r == Route::american_direct ? "american_direct" : "deamericanized";
}

Selection parse_selection(std::string_view s) {
    if (s == "puts_only" || s == "puts") return Selection::puts_only;
    if (s == "otm_calls_and_puts" || s == "otm") return Selection::otm_calls_and_puts;
    throw ConfigError("unknown selection '" + std::string(s) + "'");
}

Route parse_route(std::string_view s) {
    if (s == "american_direct" || s == "american") return Route::american_direct;
    if (s == "deamericanized" || s == "deam") return Route::deamericanized;
    throw ConfigError("unknown route '" + std::string(s) + "'");
}

Bounds Bounds::defaults(ModelKind model) {
    switch (model) {
        case ModelKind::cev: return {{0.01, 0.05}, {1.5, 0.99}};
        case ModelKind::heston: return {{0.01, -0.99, 1e-4, 0.01, 1e-4}, {2.0, 0.99, 1.0, 10.0, 1.0}};
        case ModelKind::merton: return {{0.01, -1.0, 0.005, 0.0}, {1.0, 1.0, 1.0, 15.0}};
    }
    throw ConfigError("unknown model");
}

void Bounds::validate(std::size_t dim) const {
    if (lo.size() != dim || hi.size() != dim) throw ConfigError("bounds do not match the parameter count");
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(std::isfinite(lo[i]) && std::isfinite(hi[i]) && lo[i] < hi[i])) {
            throw ConfigError("bounds must be finite with lower < upper");
        }
    }
}

CalibrationProblem CalibrationProblem::defaults(ModelKind model) {
    CalibrationProblem p;
    p.model = model;
    p.bounds = Bounds::defaults(model);
    p.pricer = PricerConfig::defaults(model);
    return p;
}

double aase(std::span<const double> market, std::span<const double> model) {
    if (market.size() != model.size()) throw UsageError("aase: price lists differ in length");
    if (market.empty()) throw UsageError("aase: empty price lists");
    double sum = 0.0;
    for (std::size_t i = 0; i < market.size(); ++i) {
        const double d = market[i] - model[i];
        sum += d * d;
    }
    return sum / static_cast<double>(market.size());
}

QuoteSubset filter_deam_unique(std::span<const Quote> quotes, double s0, double delta) {
    QuoteSubset out;
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        const Quote& q = quotes[i];
        if (q.spec.is_put()) {
            const double floor = intrinsic_value(q.spec, s0) * (1.0 + delta);
            if (!(q.price > floor)) {
                out.excluded.push_back({i, "put price within the immediate-exercise margin"});
                continue;
            }
        }
        out.quotes.push_back(q);
        out.index.push_back(i);
    }
    return out;
}

QuoteSubset select_quotes(std::span<const Quote> quotes, double s0, Selection mode) {
    QuoteSubset out;
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        const auto& spec = quotes[i].spec;
        bool keep = false;
        if (mode == Selection::puts_only) {
            keep = spec.is_put();
        } else {
            keep = spec.is_put() ? spec.strike < s0 : spec.strike > s0;
        }
        if (keep) {
            out.quotes.push_back(quotes[i]);
            out.index.push_back(i);
        }
    }
    if (out.quotes.empty()) throw SelectionError("no quotes left after " + std::string(to_string(mode)) + " selection");
    return out;
}

QuoteSubset prepare_targets(const CalibrationProblem& problem) {
    QuoteSubset selected = select_quotes(problem.quotes, problem.s0, problem.selection);
    if (problem.route == Route::american_direct) return selected;

    const QuoteSubset unique = filter_deam_unique(selected.quotes, problem.s0, problem.tree.exclusion_factor);
    QuoteSubset out;
    for (const auto& e : unique.excluded) out.excluded.push_back({selected.index[e.index], e.reason});

    std::vector<double> rates;
    for (const auto& q : unique.quotes) rates.push_back(problem.curve.rate(q.spec.maturity));
    const auto outcomes = deamericanize_all(unique.quotes, problem.s0, rates, problem.tree);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const std::size_t original = selected.index[unique.index[i]];
        if (!outcomes[i].ok) {
            out.excluded.push_back({original, outcomes[i].error});
            continue;
        }
        out.quotes.emplace_back(unique.quotes[i].spec.with_exercise(Exercise::european),
                                outcomes[i].european_price);
        out.index.push_back(original);
    }
    if (out.quotes.empty()) throw SelectionError("no quote could be de-Americanized");
    return out;
}

namespace {

double radical_inverse(std::size_t i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

// Unconstrained coordinates for the least-squares polish: u = (1 - cos(pi z)) / 2
// keeps every iterate inside the cube without flat regions beyond the faces.
double to_cube(double z) { return 0.5 * (1.0 - std::cos(std::numbers::pi * z)); }
double from_cube(double u) { return std::acos(1.0 - 2.0 * std::clamp(u, 1e-6, 1.0 - 1e-6)) / std::numbers::pi; }

// Residuals (model - market) / sqrt(n), so the squared norm is the aase.
struct Residuals : Eigen::DenseFunctor<double> {
    std::function<std::vector<double>(const std::vector<double>&)> prices;
    const std::vector<double>* market;

    Residuals(int dim, int n) : Eigen::DenseFunctor<double>(dim, n) {}

    int operator()(const Eigen::VectorXd& z, Eigen::VectorXd& f) const {
        std::vector<double> u(static_cast<std::size_t>(z.size()));
        for (Eigen::Index d = 0; d < z.size(); ++d) u[static_cast<std::size_t>(d)] = to_cube(z(d));
        const auto px = prices(u);
        const double scale = 1.0 / std::sqrt(static_cast<double>(market->size()));
        for (std::size_t i = 0; i < market->size(); ++i) {
            const double r = (px[i] - (*market)[i]) * scale;
            f(static_cast<Eigen::Index>(i)) = std::isfinite(r) ? r : 1e3;
        }
        return 0;
    }

    // forward differences; steps well above the solver noise
    int df(const Eigen::VectorXd& z, Eigen::MatrixXd& jac) const {
        Eigen::VectorXd f0(values()), f1(values());
        (*this)(z, f0);
        for (Eigen::Index d = 0; d < z.size(); ++d) {
            Eigen::VectorXd zs = z;
            const double h = 1e-5;
            zs(d) += h;
            (*this)(zs, f1);
            jac.col(d) = (f1 - f0) / h;
        }
        return 0;
    }
};

std::vector<std::vector<double>> start_points(std::size_t count, std::size_t dim, std::uint64_t seed) {
    static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    if (dim > std::size(primes)) throw ConfigError("too many parameters for the start design");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> shift(dim);
    for (auto& s : shift) s = unif(rng);
    std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
    for (std::size_t s = 0; s < count; ++s) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double u = radical_inverse(s + 1, primes[d]) + shift[d];
            // keep starts off the faces of the cube
            pts[s][d] = 0.05 + 0.9 * (u - std::floor(u));
        }
    }
    return pts;
}

}  // namespace

CalibrationResult calibrate(const CalibrationProblem& problem) {
    const std::size_t dim = param_names(problem.model).size();
    problem.bounds.validate(dim);
    if (problem.starts == 0) throw ConfigError("calibration needs at least one start");
    if (problem.pricer.grid.model != problem.model) throw ConfigError("pricer grid is for another model");

    const QuoteSubset targets = prepare_targets(problem);
    std::vector<OptionSpec> specs;
    std::vector<double> market;
    for (const auto& q : targets.quotes) {
        specs.push_back(q.spec);
        market.push_back(q.price);
    }

    PricerConfig pricer = problem.pricer;
    const std::size_t outer = std::min(problem.starts, pricer.workers);
    if (outer > 1) pricer.workers = 1;

    auto to_params = [&](const std::vector<double>& u) {
        std::vector<double> x(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            x[d] = problem.bounds.lo[d] + u[d] * (problem.bounds.hi[d] - problem.bounds.lo[d]);
        }
        return from_vector(problem.model, x);
    };
    auto objective = [&](const std::vector<double>& u) {
        try {
            const ModelParams p = to_params(u);
            validate(p);
            const auto prices = model_prices(p, specs, problem.s0, problem.curve, pricer);
            const double value = aase(market, prices);
            return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const auto starts = start_points(problem.starts, dim, problem.seed);
    std::vector<SimplexResult> runs(starts.size());
    parallel_for(
        starts.size(),
        [&](std::size_t s) {
            std::map<std::vector<double>, double> cache;
            auto cached = [&](const std::vector<double>& u) {
                auto it = cache.find(u);
                if (it != cache.end()) return it->second;
                const double v = objective(u);
                cache.emplace(u, v);
                return v;
            };
            runs[s] = nelder_mead(cached, starts[s], 0.1, problem.max_evaluations, problem.ftol, problem.xtol);
            if (problem.polish_iterations > 0 && std::isfinite(runs[s].value) && runs[s].value > 0.0) {
                Residuals res(static_cast<int>(dim), static_cast<int>(market.size()));
                res.market = &market;
                res.prices = [&](const std::vector<double>& u) {
                    try {
                        const ModelParams p = to_params(u);
                        validate(p);
                        return model_prices(p, specs, problem.s0, problem.curve, pricer);
                    } catch (const Error&) {
                        return std::vector<double>(market.size(), std::numeric_limits<double>::quiet_NaN());
                    }
                };
                Eigen::LevenbergMarquardt<Residuals> lm(res);
                lm.setMaxfev(static_cast<Eigen::Index>(problem.polish_iterations));
                Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
                for (std::size_t d = 0; d < dim; ++d) z(static_cast<Eigen::Index>(d)) = from_cube(runs[s].x[d]);
                lm.minimize(z);
                std::vector<double> u(dim);
                for (std::size_t d = 0; d < dim; ++d) u[d] = to_cube(z(static_cast<Eigen::Index>(d)));
                const double polished = cached(u);
                if (polished < runs[s].value) {
                    runs[s].x = u;
                    runs[s].value = polished;
                }
            }
            runs[s].evaluations = cache.size();
        },
        outer);

    std::size_t best = 0, evaluations = 0;
    for (std::size_t s = 0; s < runs.size(); ++s) {
        evaluations += runs[s].evaluations;
        if (runs[s].value < runs[best].value) best = s;
    }
    if (!std::isfinite(runs[best].value)) throw CalibrationError("every objective evaluation failed");

    CalibrationResult result;
    result.params = to_params(runs[best].x);
    result.aase = runs[best].value;
    result.evaluations = evaluations;
    result.excluded = targets.excluded;
    result.used = targets.index;
    result.targets = market;
    result.fitted = model_prices(result.params, specs, problem.s0, problem.curve, pricer);
    return result;
}

}  // namespace deam
