#pragma once

#include <complex>
#include <cstddef>
#include <functional>

#include "deam/instruments.hpp"
#include "deam/models.hpp"

namespace deam {

struct QuadratureConfig {
    double upper_limit = 200.0;
    double abs_tol = 1e-10;
    std::size_t max_subdivisions = 15;  ///< maximum bisection depth of the adaptive rule

    void validate() const;
};

/// Standard normal CDF.
double norm_cdf(double x);
double norm_pdf(double x);

/// European Black-Scholes price (the exercise style of spec is ignored).
double bs_price(const OptionSpec& spec, double s0, double r, double sigma);

/// P(X <= x) for X noncentral chi-square with `dof` degrees of freedom and
/// noncentrality `ncp`. Poisson-weighted series; Sankaran's normal
/// approximation when ncp > 1e4.
double ncx2_cdf(double x, double dof, double ncp);

/// European CEV price, zero absorbing at the origin.
double cev_price(const CevParams& p, const OptionSpec& spec, double s0, double r);

/// E[exp(i u log S_T)] for complex u.
using CharacteristicFunction = std::function<std::complex<double>(std::complex<double>)>;

CharacteristicFunction heston_cf(const HestonParams& p, double s0, double r, double maturity);
CharacteristicFunction merton_cf(const MertonParams& p, double s0, double r, double maturity);

/// Heston European price from a single characteristic-function integral.
/// Puts follow from parity.
double heston_price(const HestonParams& p, const OptionSpec& spec, double s0, double r,
                    const QuadratureConfig& quad = {});

/// Damped Fourier integral. alpha > 0 yields the call, alpha < -1 the put.
double damped_fourier_price(const CharacteristicFunction& cf, double strike, double maturity,
                            double r, double alpha, double upper_limit, double tol = 1e-12);

/// Merton European price via the damped Fourier integral. Calls use
/// alpha = 1.5 and puts alpha = -1.5, so parity is not imposed.
double merton_price(const MertonParams& p, const OptionSpec& spec, double s0, double r);

/// Merton European price as a Poisson mixture of Black-Scholes prices.
double merton_price_series(const MertonParams& p, const OptionSpec& spec, double s0, double r);

/// Dispatches to the closed-form or semi-closed-form European price.
double reference_price(const ModelParams& p, const OptionSpec& spec, double s0, double r);

}  // namespace deam
