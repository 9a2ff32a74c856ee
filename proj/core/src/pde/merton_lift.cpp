#include "deam/pde/merton_lift.hpp"

#include <cmath>

#include "deam/reference_pricing.hpp"

namespace deam::pde {

namespace {

// Psi = K (a e^x + b) W(x) with W = Phi for calls and W(x) = Phi(-x) for puts.
// Kept in factored form so that the far tails do not cancel.
struct LiftForm {
    double a;
    double b;
    double db;      // time derivative of b
    double side;    // +1: W = Phi(x), -1: W = Phi(-x)
};

LiftForm form(const OptionSpec& spec, double t, double r) {
    const double df = std::exp(-r * t);
    if (!spec.is_put()) return {1.0, -df, r * df, 1.0};
    if (spec.is_american()) return {-1.0, 1.0, 0.0, -1.0};
    return {-1.0, df, -r * df, -1.0};
}

}  // namespace

double merton_lift(const OptionSpec& spec, double t, double x, double strike, double r) {
    const LiftForm f = form(spec, t, r);
    return strike * (f.a * std::exp(x) + f.b) * norm_cdf(f.side * x);
}

LiftValue merton_lift_source(const MertonParams& p, const OptionSpec& spec, double t, double x,
                             double r) {
    const LiftForm f = form(spec, t, r);
    const double k = spec.strike;
    const double ex = std::exp(x);
    const double w = norm_cdf(f.side * x);
    const double w1 = f.side * norm_pdf(x);
    const double w2 = -x * w1;
    const double g = f.a * ex + f.b;

    const double psi = k * g * w;
    const double psi_x = k * (f.a * ex * w + g * w1);
    const double psi_xx = k * (f.a * ex * (w + 2.0 * w1) + g * w2);
    const double psi_t = k * f.db * w;

    // E[Psi(x + Z)] for Z ~ N(alpha, beta^2)
    const double s = std::sqrt(1.0 + p.beta * p.beta);
    const double growth = std::exp(x + p.alpha + 0.5 * p.beta * p.beta);
    const double jump_mean = k * (f.a * growth * norm_cdf(f.side * (x + p.alpha + p.beta * p.beta) / s) +
                                  f.b * norm_cdf(f.side * (x + p.alpha) / s));

    const double generator = 0.5 * p.sigma * p.sigma * psi_xx + merton_drift(p, r) * psi_x -
                             (r + p.lambda) * psi + p.lambda * jump_mean;
    return {psi, generator - psi_t};
}

}  // namespace deam::pde
