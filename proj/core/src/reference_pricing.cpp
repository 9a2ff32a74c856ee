#include "deam/reference_pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "deam/error.hpp"

namespace deam {

using cplx = std::complex<double>;

void QuadratureConfig::validate() const {
    if (!(upper_limit > 0.0)) throw ConfigError("quadrature upper limit must be positive");
    if (!(abs_tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
    if (max_subdivisions == 0) throw ConfigError("quadrature needs at least one subdivision");
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double bs_price(const OptionSpec& spec, double s0, double r, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("Black-Scholes volatility must be positive");
    if (!(s0 > 0.0)) throw DomainError("spot must be positive");
    const double t = spec.maturity;
    const double k = spec.strike;
    const double df = std::exp(-r * t);
    const double sd = sigma * std::sqrt(t);
    const double d1 = (std::log(s0 / k) + (r + 0.5 * sigma * sigma) * t) / sd;
    const double d2 = d1 - sd;
    if (spec.is_put()) return k * df * norm_cdf(-d2) - s0 * norm_cdf(-d1);
    return s0 * norm_cdf(d1) - k * df * norm_cdf(d2);
}

namespace {

double sankaran_cdf(double x, double k, double lambda) {
    const double kl = k + lambda;
    const double k2l = k + 2.0 * lambda;
    const double h = 1.0 - 2.0 * kl * (k + 3.0 * lambda) / (3.0 * k2l * k2l);
    const double p = k2l / (kl * kl);
    const double m = (h - 1.0) * (1.0 - 3.0 * h);
    const double num = std::pow(x / kl, h) - (1.0 + h * p * (h - 1.0 - 0.5 * (2.0 - h) * m * p));
    const double den = h * std::sqrt(2.0 * p) * (1.0 + 0.5 * m * p);
    return norm_cdf(num / den);
}

}  // namespace

double ncx2_cdf(double x, double dof, double ncp) {
    if (!(dof > 0.0) || !(ncp >= 0.0)) throw DomainError("noncentral chi-square needs dof > 0, ncp >= 0");
    if (x <= 0.0) return 0.0;
    if (!std::isfinite(x)) return 1.0;
    if (ncp > 1e4) return sankaran_cdf(x, dof, ncp);

    using boost::math::gamma_p;
    const double half = 0.5 * ncp;
    const double hx = 0.5 * x;
    const double a = 0.5 * dof;
    if (half == 0.0) return gamma_p(a, hx);

    // Poisson(ncp/2) mixture of central chi-square CDFs, summed outward from the mode.
    const auto mode = static_cast<long>(std::floor(half));
    const double w_mode = std::exp(-half + static_cast<double>(mode) * std::log(half) -
                                   std::lgamma(static_cast<double>(mode) + 1.0));
    constexpr double stop = 1e-14;
    constexpr long max_terms = 200000;

    double sum = w_mode * gamma_p(a + static_cast<double>(mode), hx);
    double w = w_mode;
    long j = mode;
    for (long n = 0;; ++n) {
        if (n > max_terms) throw NumericalError("noncentral chi-square series did not converge", n);
        ++j;
        w *= half / static_cast<double>(j);
        const double term = w * gamma_p(a + static_cast<double>(j), hx);
        sum += term;
        if (w < stop || term < stop * 1e-2) break;
    }
    w = w_mode;
    for (j = mode; j > 0; --j) {
        w *= static_cast<double>(j) / half;
        const double term = w * gamma_p(a + static_cast<double>(j - 1), hx);
        sum += term;
        if (w < stop) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double cev_price(const CevParams& p, const OptionSpec& spec, double s0, double r) {
    p.validate();
    if (!(s0 > 0.0)) throw DomainError("spot must be positive");
    const double t = spec.maturity;
    const double one_minus = 1.0 - p.zeta;
    const double x = 2.0 * r * (p.zeta - 1.0) * t;
    const double v = p.sigma * p.sigma * t * (std::abs(x) < 1e-12 ? 1.0 : std::expm1(x) / x);
    const double df_k = spec.strike * std::exp(-r * t);
    const double scale = one_minus * one_minus * v;
    const double a = std::pow(df_k, 2.0 * one_minus) / scale;
    const double b = 1.0 / one_minus;
    const double c = std::pow(s0, 2.0 * one_minus) / scale;

    if (spec.is_put()) {
        return df_k * (1.0 - ncx2_cdf(c, b, a)) - s0 * ncx2_cdf(a, b + 2.0, c);
    }
    return s0 * (1.0 - ncx2_cdf(a, b + 2.0, c)) - df_k * ncx2_cdf(c, b, a);
}

CharacteristicFunction heston_cf(const HestonParams& p, double s0, double r, double maturity) {
    p.validate();
    const double xi2 = p.xi * p.xi;
    const double t = maturity;
    const double drift = std::log(s0) + r * t;
    return [=](cplx u) {
        const cplx i{0.0, 1.0};
        const cplx iu = i * u;
        const cplx b = p.kappa - p.rho * p.xi * iu;
        const cplx q = iu + u * u;
        const cplx d = std::sqrt(b * b + xi2 * q);
        const cplx bd = b + d;
        // (b - d) / xi^2 and g / xi^2 without cancellation as xi -> 0
        const cplx bm = -q / bd;
        const cplx G = -q / (bd * bd);
        const cplx g = xi2 * G;
        const cplx e = std::exp(-d * t);

        cplx log_term;
        if (std::abs(g) < 0.1) {
            cplx sum = 0.0;
            cplx gp = 1.0;
            cplx ep = e;
            for (int n = 1; n <= 60; ++n) {
                const cplx term = gp * (1.0 - ep) / static_cast<double>(n);
                sum += term;
                if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
                gp *= g;
                ep *= e;
            }
            log_term = G * sum;
        } else {
            log_term = (std::log(1.0 - g * e) - std::log(1.0 - g)) / xi2;
        }
        const cplx c = p.kappa * p.gamma * (bm * t - 2.0 * log_term);
        const cplx dd = p.v0 * bm * (1.0 - e) / (1.0 - g * e);
        return std::exp(iu * drift + c + dd);
    };
}

CharacteristicFunction merton_cf(const MertonParams& p, double s0, double r, double maturity) {
    p.validate();
    const double t = maturity;
    const double drift = std::log(s0) + merton_drift(p, r) * t;
    return [=](cplx u) {
        const cplx i{0.0, 1.0};
        const cplx jump = std::exp(i * u * p.alpha - 0.5 * p.beta * p.beta * u * u) - 1.0;
        return std::exp(i * u * drift - 0.5 * p.sigma * p.sigma * u * u * t + p.lambda * t * jump);
    };
}

namespace {

template <class F>
double integrate(F&& f, double upper, double tol, std::size_t depth, const char* what) {
    using boost::math::quadrature::gauss_kronrod;
    double error = 0.0;
    double l1 = 0.0;
    const double value =
        gauss_kronrod<double, 61>::integrate(f, 0.0, upper, static_cast<unsigned>(depth), tol, &error, &l1);
    if (!std::isfinite(value) || error > std::max(1e-7, 1e-6 * l1)) {
        throw NumericalError(std::string(what) + ": quadrature error estimate " + std::to_string(error),
                             depth, error);
    }
    return value;
}

}  // namespace

double heston_price(const HestonParams& p, const OptionSpec& spec, double s0, double r,
                    const QuadratureConfig& quad) {
    quad.validate();
    const auto cf = heston_cf(p, s0, r, spec.maturity);
    const double k = spec.strike;
    const double log_k = std::log(k);
    const double df = std::exp(-r * spec.maturity);
    const cplx i{0.0, 1.0};
    auto integrand = [&](double phi) {
        const cplx num = df * cf(cplx(phi, -1.0)) - k * df * cf(cplx(phi, 0.0));
        return std::real(std::exp(-i * phi * log_k) * num / (i * phi));
    };
    const double integral =
        integrate(integrand, quad.upper_limit, quad.abs_tol, quad.max_subdivisions, "Heston");
    const double call = 0.5 * (s0 - k * df) + integral / std::numbers::pi;
    return spec.is_put() ? call - s0 + k * df : call;
}

double damped_fourier_price(const CharacteristicFunction& cf, double strike, double maturity,
                            double r, double alpha, double upper_limit, double tol) {
    if (!(alpha > 0.0 || alpha < -1.0)) {
        throw NumericalError("damping parameter must be > 0 (call) or < -1 (put)");
    }
    const double k = std::log(strike);
    const double df = std::exp(-r * maturity);
    const cplx i{0.0, 1.0};
    auto integrand = [&](double v) {
        const cplx psi = df * cf(cplx(v, -(alpha + 1.0))) /
                         cplx(alpha * alpha + alpha - v * v, (2.0 * alpha + 1.0) * v);
        return std::real(std::exp(-i * v * k) * psi);
    };
    const double integral = integrate(integrand, upper_limit, tol, 15, "damped Fourier");
    return std::exp(-alpha * k) * integral / std::numbers::pi;
}

double merton_price(const MertonParams& p, const OptionSpec& spec, double s0, double r) {
    const auto cf = merton_cf(p, s0, r, spec.maturity);
    const double upper = std::max(200.0, std::sqrt(80.0 / (p.sigma * p.sigma * spec.maturity)));
    const double alpha = spec.is_put() ? -1.5 : 1.5;
    return damped_fourier_price(cf, spec.strike, spec.maturity, r, alpha, upper);
}

double merton_price_series(const MertonParams& p, const OptionSpec& spec, double s0, double r) {
    p.validate();
    const double t = spec.maturity;
    const double m = merton_jump_mean(p);
    const double intensity = p.lambda * (1.0 + m) * t;
    const double log_growth = std::log1p(m);
    double price = 0.0;
    for (int n = 0; n < 2000; ++n) {
        const double dn = static_cast<double>(n);
        const double w = intensity == 0.0
                             ? (n == 0 ? 1.0 : 0.0)
                             : std::exp(-intensity + dn * std::log(intensity) - std::lgamma(dn + 1.0));
        if (w > 0.0) {
            const double sigma_n = std::sqrt(p.sigma * p.sigma + dn * p.beta * p.beta / t);
            const double r_n = r - p.lambda * m + dn * log_growth / t;
            price += w * bs_price(spec, s0, r_n, sigma_n);
        }
        if (dn > intensity && w < 1e-14) break;
    }
    return price;
}

double reference_price(const ModelParams& p, const OptionSpec& spec, double s0, double r) {
    switch (kind_of(p)) {
        case ModelKind::cev: return cev_price(std::get<CevParams>(p), spec, s0, r);
        case ModelKind::heston: return heston_price(std::get<HestonParams>(p), spec, s0, r);
        case ModelKind::merton: return merton_price(std::get<MertonParams>(p), spec, s0, r);
    }
    throw ConfigError("unknown model");
}

}  // namespace deam
