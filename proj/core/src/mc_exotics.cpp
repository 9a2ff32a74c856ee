#include "deam/mc_exotics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "deam/error.hpp"

namespace deam {

void McConfig::validate() const {
    if (n_paths < 2) throw UsageError("need at least two paths");
    if (antithetic && n_paths % 2 != 0) throw UsageError("antithetic sampling needs an even path count");
    if (steps_per_year == 0) throw UsageError("steps_per_year must be positive");
    if (block_size == 0 || (antithetic && block_size % 2 != 0)) {
        throw UsageError("block size must be positive (and even with antithetic sampling)");
    }
}

std::string_view to_string(ExoticKind k) {
    return k == ExoticKind::down_and_out_call ? "down_and_out_call" : "lookback_call";
}

ExoticSpec ExoticSpec::standard(ExoticKind kind, double s0, double maturity) {
    return {kind, s0, 0.9 * s0, 1.05 * s0, maturity};
}

void ExoticSpec::validate() const {
    if (!(s0 > 0.0 && strike > 0.0 && maturity > 0.0)) throw ConfigError("exotic needs positive spot, strike and maturity");
    if (kind == ExoticKind::down_and_out_call && !(barrier >= 0.0)) throw ConfigError("barrier must be >= 0");
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

namespace {

// Per-step increments for one path; `sign` mirrors every normal draw.
struct Stepper {
    const ModelParams& p;
    double r;
    double dt;

    struct Draws {
        std::vector<double> z1, z2, jump_u;  // per step
        std::vector<std::vector<double>> jump_z;
    };

    void draw(std::mt19937_64& rng, std::size_t steps, Draws& d) const {
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> unif;
        d.z1.resize(steps);
        for (auto& z : d.z1) z = normal(rng);
        if (kind_of(p) == ModelKind::heston) {
            d.z2.resize(steps);
            for (auto& z : d.z2) z = normal(rng);
        }
        if (kind_of(p) == ModelKind::merton) {
            const auto& m = std::get<MertonParams>(p);
            const double mean = m.lambda * dt;
            d.jump_z.resize(steps);
            for (std::size_t s = 0; s < steps; ++s) {
                // Poisson count by inversion
                const double u = unif(rng);
                double prob = std::exp(-mean), cdf = prob;
                std::size_t count = 0;
                while (u > cdf && count < 64) {
                    ++count;
                    prob *= mean / static_cast<double>(count);
                    cdf += prob;
                }
                d.jump_z[s].resize(count);
                for (auto& z : d.jump_z[s]) z = normal(rng);
            }
        }
    }

    // Runs one path and records terminal, min and max.
    void run(const Draws& d, double sign, double s0, double& terminal, double& lo, double& hi) const {
        const std::size_t steps = d.z1.size();
        const double sq = std::sqrt(dt);
        double s = s0;
        lo = hi = s0;
        switch (kind_of(p)) {
            case ModelKind::cev: {
                const auto& m = std::get<CevParams>(p);
                for (std::size_t k = 0; k < steps; ++k) {
                    s = std::abs(s + r * s * dt + m.sigma * std::pow(s, m.zeta) * sq * sign * d.z1[k]);
                    lo = std::min(lo, s);
                    hi = std::max(hi, s);
                }
                break;
            }
            case ModelKind::heston: {
                const auto& m = std::get<HestonParams>(p);
                const double rho_c = std::sqrt(std::max(0.0, 1.0 - m.rho * m.rho));
                double v = m.v0, x = std::log(s0);
                for (std::size_t k = 0; k < steps; ++k) {
                    const double vp = std::max(v, 0.0);
                    const double z1 = sign * d.z1[k];
                    const double z2 = m.rho * z1 + rho_c * sign * d.z2[k];
                    const double vol = std::sqrt(vp * dt);
                    x += (r - 0.5 * vp) * dt + vol * z1;
                    v += m.kappa * (m.gamma - vp) * dt + m.xi * vol * z2;
                    s = std::exp(x);
                    lo = std::min(lo, s);
                    hi = std::max(hi, s);
                }
                break;
            }
            case ModelKind::merton: {
                const auto& m = std::get<MertonParams>(p);
                const double drift = merton_drift(m, r) * dt;
                const double vol = m.sigma * sq;
                double x = std::log(s0);
                for (std::size_t k = 0; k < steps; ++k) {
                    x += drift + vol * sign * d.z1[k];
                    for (double z : d.jump_z[k]) x += m.alpha + m.beta * sign * z;
                    s = std::exp(x);
                    lo = std::min(lo, s);
                    hi = std::max(hi, s);
                }
                break;
            }
        }
        terminal = s;
    }
};

}  // namespace

PathEnsemble simulate_paths(const ModelParams& p, double s0, double r, double maturity,
                            const McConfig& cfg) {
    cfg.validate();
    validate(p);
    if (!(s0 > 0.0) || !(maturity > 0.0)) throw UsageError("simulation needs positive spot and maturity");

    PathEnsemble out;
    out.s0 = s0;
    out.r = r;
    out.maturity = maturity;
    out.antithetic = cfg.antithetic;
    out.steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(cfg.steps_per_year) * maturity)));
    out.terminal.resize(cfg.n_paths);
    out.running_min.resize(cfg.n_paths);
    out.running_max.resize(cfg.n_paths);

    const Stepper stepper{p, r, maturity / static_cast<double>(out.steps)};
    const std::size_t blocks = (cfg.n_paths + cfg.block_size - 1) / cfg.block_size;
    parallel_for(
        blocks,
        [&](std::size_t b) {
            std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                              static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
            std::mt19937_64 rng(seq);
            Stepper::Draws draws;
            const std::size_t begin = b * cfg.block_size;
            const std::size_t end = std::min(cfg.n_paths, begin + cfg.block_size);
            for (std::size_t i = begin; i < end;) {
                stepper.draw(rng, out.steps, draws);
                stepper.run(draws, 1.0, s0, out.terminal[i], out.running_min[i], out.running_max[i]);
                ++i;
                if (cfg.antithetic) {
                    stepper.run(draws, -1.0, s0, out.terminal[i], out.running_min[i], out.running_max[i]);
                    ++i;
                }
            }
        },
        cfg.workers);
    return out;
}

McEstimate estimate(const PathEnsemble& paths, const std::function<double(std::size_t)>& payoff) {
    const std::size_t group = paths.antithetic ? 2 : 1;
    const std::size_t m = paths.size() / group;
    if (m < 2) throw UsageError("need at least two independent samples");
    std::vector<double> y(m);
    for (std::size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < group; ++j) s += payoff(k * group + j);
        y[k] = s / static_cast<double>(group);
    }
    const double mean = pairwise_sum(y.data(), m) / static_cast<double>(m);
    for (auto& v : y) v = (v - mean) * (v - mean);
    const double var = pairwise_sum(y.data(), m) / static_cast<double>(m - 1);
    const double df = std::exp(-paths.r * paths.maturity);
    return {df * mean, df * std::sqrt(var / static_cast<double>(m))};
}

McEstimate price_down_and_out_call(const PathEnsemble& paths, const ExoticSpec& spec) {
    spec.validate();
    return estimate(paths, [&](std::size_t i) {
        return paths.running_min[i] >= spec.barrier ? std::max(paths.terminal[i] - spec.strike, 0.0) : 0.0;
    });
}

McEstimate price_lookback_call(const PathEnsemble& paths, const ExoticSpec& spec) {
    spec.validate();
    return estimate(paths, [&](std::size_t i) { return std::max(paths.running_max[i] - spec.strike, 0.0); });
}

McEstimate price_vanilla_call(const PathEnsemble& paths, double strike) {
    return estimate(paths, [&](std::size_t i) { return std::max(paths.terminal[i] - strike, 0.0); });
}

McEstimate price_exotic(const PathEnsemble& paths, const ExoticSpec& spec) {
    return spec.kind == ExoticKind::down_and_out_call ? price_down_and_out_call(paths, spec)
                                                      : price_lookback_call(paths, spec);
}

}  // namespace deam
