#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace deam {

template <class F>
SimplexResult nelder_mead(F&& f, std::vector<double> start, double step, std::size_t max_evals,
                          double ftol, double xtol) {
    const std::size_t n = start.size();
    auto clamp01 = [](std::vector<double>& x) {
        for (auto& xi : x) xi = std::clamp(xi, 0.0, 1.0);
    };
    std::size_t evals = 0;
    auto eval = [&](std::vector<double>& x) {
        clamp01(x);
        ++evals;
        return f(x);
    };

    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
        // step inward when the start sits on the upper face
        pts[i + 1][i] += pts[i + 1][i] + step <= 1.0 ? step : -step;
    }
    std::vector<double> val(n + 1);
    for (std::size_t i = 0; i <= n; ++i) val[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    auto along = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
        for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (worst[k] - centroid[k]);
    };

    while (evals < max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return val[a] < val[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double size = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(pts[i][k] - pts[best][k]));
        const double spread = val[worst] - val[best];
        if (std::isfinite(spread) && spread <= ftol * std::abs(val[best]) + 1e-300 && size <= xtol) break;
        if (size <= 1e-12) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
        }
        along(-1.0, trial, pts[worst]);
        const double fr = eval(trial);
        if (fr < val[best]) {
            along(-2.0, trial2, pts[worst]);
            const double fe = eval(trial2);
            if (fe < fr) {
                pts[worst] = trial2;
                val[worst] = fe;
            } else {
                pts[worst] = trial;
                val[worst] = fr;
            }
            continue;
        }
        if (fr < val[second]) {
            pts[worst] = trial;
            val[worst] = fr;
            continue;
        }
        // contraction, outside or inside
        const bool outside = fr < val[worst];
        along(outside ? -0.5 : 0.5, trial2, pts[worst]);
        const double fc = eval(trial2);
        if (fc < (outside ? fr : val[worst])) {
            pts[worst] = trial2;
            val[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
            val[i] = eval(pts[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
    return {pts[best], val[best], evals};
}

}  // namespace deam
