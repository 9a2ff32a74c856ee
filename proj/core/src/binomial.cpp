#include "deam/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "deam/error.hpp"
#include "deam/parallel.hpp"

namespace deam {

void TreeConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("tree dt must be positive");
    if (!(bisection_tol > 0.0)) throw ConfigError("bisection tolerance must be positive");
    if (!(exclusion_factor > 0.0)) throw ConfigError("exclusion factor must be positive");
    if (!(u_upper_seed > 1.0)) throw ConfigError("upper seed for u must exceed 1");
    if (max_bisection_iters == 0) throw ConfigError("need at least one bisection iteration");
}

double up_probability(double u, double r, double dt) {
    const double growth = std::exp(r * dt);
    if (!(u > growth) || !(u * growth > 1.0)) {
        throw InadmissibleFactorError("up factor " + std::to_string(u) +
                                      " does not give a probability in (0,1) for e^{r dt}=" +
                                      std::to_string(growth));
    }
    const double inv = 1.0 / u;
    return (growth - inv) / (u - inv);
}

namespace {

template <bool Put, bool American>
double backward_induction(double s0, double strike, double r, double u, std::size_t n, double dt) {
    const double p = up_probability(u, r, dt);
    const double disc = std::exp(-r * dt);
    const double pu = disc * p;
    const double pd = disc * (1.0 - p);
    const double log_u = std::log(u);

    std::vector<double> value(n + 1);
    std::vector<double> spot(American ? n + 1 : 0);
    for (std::size_t j = 0; j <= n; ++j) {
        const double s = s0 * std::exp((2.0 * static_cast<double>(j) - static_cast<double>(n)) * log_u);
        value[j] = Put ? std::max(strike - s, 0.0) : std::max(s - strike, 0.0);
        if constexpr (American) spot[j] = s;
    }

    double* v = value.data();
    double* s = spot.data();
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = 0; j <= i; ++j) v[j] = pu * v[j + 1] + pd * v[j];
        if constexpr (American) {
            // node (i, j) sits one up-move below node (i + 1, j)
            for (std::size_t j = 0; j <= i; ++j) {
                s[j] *= u;
                const double exercise = Put ? strike - s[j] : s[j] - strike;
                v[j] = std::max(v[j], exercise);
            }
        }
    }
    return value[0];
}

}  // namespace

double tree_value(const OptionSpec& spec, double s0, double r, double u, std::size_t n_steps,
                  double dt) {
    if (n_steps == 0) throw ConfigError("tree needs at least one step");
    if (!(s0 > 0.0)) throw DomainError("spot must be positive");
    if (!(dt > 0.0)) throw ConfigError("tree dt must be positive");
    const double k = spec.strike;
    if (spec.is_put()) {
        return spec.is_american() ? backward_induction<true, true>(s0, k, r, u, n_steps, dt)
                                  : backward_induction<true, false>(s0, k, r, u, n_steps, dt);
    }
    return spec.is_american() ? backward_induction<false, true>(s0, k, r, u, n_steps, dt)
                              : backward_induction<false, false>(s0, k, r, u, n_steps, dt);
}

UBounds admissible_u_bounds(double r, double dt, double k, const TreeConfig& cfg) {
    if (!(k > 0.0)) throw ConfigError("strike ratio must be positive");
    const double growth = std::exp(r * dt);
    double lower = growth + std::sqrt(std::max(growth * growth - 1.0, 0.0));
    // below 1/k the one-step condition holds on its own; otherwise u >= e^{r dt}/k
    if (k < 1.0 && lower > 1.0 / k) lower = std::max(lower, growth / k);
    return {lower + cfg.lower_offset, cfg.u_upper_seed};
}

std::size_t tree_steps(double maturity, double dt) {
    const double ratio = maturity / dt;
    // guard against ceil(2.0000000000000004) style round-up
    const double nearest = std::round(ratio);
    const double steps = std::abs(ratio - nearest) < 1e-9 ? nearest : std::ceil(ratio);
    return std::max<std::size_t>(1, static_cast<std::size_t>(steps));
}

TreeQuoteResult find_u_star(double target, const OptionSpec& spec, double s0, double r,
                            const TreeConfig& cfg) {
    cfg.validate();
    if (!spec.is_american()) throw ConfigError("find_u_star expects an American contract");
    if (r < 0.0) throw ConfigError("negative rates are not supported by the tree search");
    if (!std::isfinite(target)) throw ConfigError("target price is not finite");

    const double intrinsic = intrinsic_value(spec, s0);
    if (spec.is_put() && target <= intrinsic * (1.0 + cfg.exclusion_factor)) {
        throw ImmediateExerciseError(
            "American put price " + std::to_string(target) + " is within the exercise margin of " +
            std::to_string(intrinsic) + "; a unique European price cannot be determined");
    }

    const std::size_t n = tree_steps(spec.maturity, cfg.dt);
    const double dt = spec.maturity / static_cast<double>(n);
    // without dividends and r >= 0 the American call is the European call
    const OptionSpec valued = spec.is_put() ? spec : spec.with_exercise(Exercise::european);
    const double eps = cfg.bisection_tol;
    const double threshold = target - eps;

    auto price = [&](double u) { return tree_value(valued, s0, r, u, n, dt); };

    TreeQuoteResult result;
    result.n_steps = n;

    const UBounds bounds = admissible_u_bounds(r, dt, spec.strike / s0, cfg);

    auto accept = [&](double u, double f, std::size_t iterations) {
        result.u_star = u;
        result.iterations = iterations;
        result.european_price =
            spec.is_put() ? tree_value(spec.with_exercise(Exercise::european), s0, r, u, n, dt) : f;
        if (u < bounds.lower) result.within_admissible = false;
        return result;
    };

    double lo = bounds.lower;
    double f_lo = price(lo);
    // targets below eps: the bracket end itself can already be close enough
    if (f_lo >= threshold && f_lo <= target + eps) return accept(lo, f_lo, 0);
    if (f_lo >= threshold) {
        lo = std::exp(r * dt) * (1.0 + cfg.lower_offset);
        f_lo = price(lo);
        result.within_admissible = false;
        if (f_lo >= threshold && f_lo <= target + eps) return accept(lo, f_lo, 0);
        if (f_lo >= threshold) {
            throw BracketError("target " + std::to_string(target) +
                               " lies below the cheapest admissible tree price " +
                               std::to_string(f_lo));
        }
    }

    double hi = std::max(bounds.upper, 2.0 * lo);
    double f_hi = price(hi);
    for (std::size_t d = 0; f_hi < threshold; ++d) {
        if (d >= cfg.max_doublings) {
            throw BracketError("no up factor up to " + std::to_string(hi) +
                               " reaches the target " + std::to_string(target));
        }
        lo = hi;
        hi *= 2.0;
        f_hi = price(hi);
    }

    // Invariant: f(lo) < target - eps <= f(hi). Shrink until hi is the
    // smallest factor meeting the stopping rule, to within eps / 2.
    std::size_t iterations = 0;
    while (!(f_hi <= target + eps && f_hi - threshold <= 0.5 * eps)) {
        if (iterations >= cfg.max_bisection_iters) {
            throw NumericalError("bisection for u* did not converge", iterations,
                                 std::abs(f_hi - target));
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
        const double mid = 0.5 * (lo + hi);
        const double f_mid = price(mid);
        ++iterations;
        if (f_mid >= threshold) {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
        }
    }
    if (std::abs(f_hi - target) > eps) {
        throw NumericalError("tree price is discontinuous at the target; |f(u) - V| = " +
                                 std::to_string(std::abs(f_hi - target)),
                             iterations, std::abs(f_hi - target));
    }

    return accept(hi, f_hi, iterations);
}

double deamericanize(const Quote& quote, double s0, double r, const TreeConfig& cfg) {
    if (!quote.spec.is_american()) throw ConfigError("only American quotes can be de-Americanized");
    if (!quote.spec.is_put() && r >= 0.0) return quote.price;
    return find_u_star(quote.price, quote.spec, s0, r, cfg).european_price;
}

std::vector<DeamOutcome> deamericanize_all(std::span<const Quote> quotes, double s0,
                                           std::span<const double> rates, const TreeConfig& cfg) {
    if (rates.size() != quotes.size()) throw UsageError("one rate per quote is required");
    std::vector<DeamOutcome> out(quotes.size());
    parallel_for(quotes.size(), [&](std::size_t i) {
        try {
            out[i].european_price = deamericanize(quotes[i], s0, rates[i], cfg);
            out[i].ok = true;
        } catch (const Error& e) {
            out[i].error = e.what();
        }
    });
    return out;
}

}  // namespace deam
