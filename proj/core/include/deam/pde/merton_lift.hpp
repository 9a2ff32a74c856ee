#pragma once

#include "deam/instruments.hpp"
#include "deam/models.hpp"

namespace deam::pde {

/// Far-field approximation Psi(t, x) of the Merton price in x = log(S/K):
///   calls            (K e^x - K e^{-rt}) Phi(x)
///   American puts    (K - K e^x) (1 - Phi(x))
///   European puts    (K e^{-rt} - K e^x) (1 - Phi(x))
/// P - Psi vanishes at both ends of the truncated domain.
double merton_lift(const OptionSpec& spec, double t, double x, double strike, double r);

/// Psi together with the source term (L Psi - dPsi/dt) it induces, where L
/// is the Merton generator with the jump integral taken over the whole line.
struct LiftValue {
    double psi;
    double source;
};
LiftValue merton_lift_source(const MertonParams& p, const OptionSpec& spec, double t, double x,
                             double r);

}  // namespace deam::pde
