#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace povmix {

struct NelderMeadOptions {
    double initial_step = 0.1;  // absolute simplex offset per coordinate
    double f_tol = 1e-8;        // converged when max-min function spread drops below
    int max_iter = 500;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f_min = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Downhill simplex minimizer (Nelder & Mead 1965) with the standard
// reflection/expansion/contraction/shrink coefficients 1, 2, 0.5, 0.5.
// The objective may return +infinity to mark infeasible points.
inline NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                                    std::span<const double> start,
                                    const NelderMeadOptions& opts = {}) {
    const std::size_t dim = start.size();
    const std::size_t m = dim + 1;

    std::vector<std::vector<double>> x(m, std::vector<double>(start.begin(), start.end()));
    for (std::size_t j = 1; j < m; ++j) {
        x[j][j - 1] += opts.initial_step;
    }
    std::vector<double> fx(m);
    for (std::size_t j = 0; j < m; ++j) {
        fx[j] = f(x[j]);
    }

    std::vector<std::size_t> order(m);
    const auto sort_simplex = [&] {
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return fx[l] < fx[r]; });
    };

    std::vector<double> centroid(dim);
    std::vector<double> cand(dim);

    NelderMeadResult result;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        sort_simplex();
        const std::size_t best = order[0];
        const std::size_t second_worst = order[m - 2];
        const std::size_t worst = order[m - 1];

        if (std::isfinite(fx[worst]) && fx[worst] - fx[best] < opts.f_tol) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == worst) continue;
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += x[j][i];
        }
        for (auto& c : centroid) c /= static_cast<double>(dim);

        // reflection
        for (std::size_t i = 0; i < dim; ++i) cand[i] = centroid[i] + (centroid[i] - x[worst][i]);
        double f_refl = f(cand);
        if (f_refl < fx[best]) {
            // expansion
            std::vector<double> expd(dim);
            for (std::size_t i = 0; i < dim; ++i) expd[i] = centroid[i] + 2.0 * (cand[i] - centroid[i]);
            const double f_exp = f(expd);
            if (f_exp < f_refl) {
                x[worst] = std::move(expd);
                fx[worst] = f_exp;
            } else {
                x[worst].assign(cand.begin(), cand.end());
                fx[worst] = f_refl;
            }
        } else if (f_refl < fx[second_worst]) {
            x[worst].assign(cand.begin(), cand.end());
            fx[worst] = f_refl;
        } else {
            // contraction, outside when the reflection improved on the worst
            const bool outside = f_refl < fx[worst];
            std::vector<double> contr(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                const double target = outside ? cand[i] : x[worst][i];
                contr[i] = centroid[i] + 0.5 * (target - centroid[i]);
            }
            const double f_con = f(contr);
            if (f_con < (outside ? f_refl : fx[worst])) {
                x[worst] = std::move(contr);
                fx[worst] = f_con;
            } else {
                // shrink toward the best vertex
                for (std::size_t j = 0; j < m; ++j) {
                    if (j == best) continue;
                    for (std::size_t i = 0; i < dim; ++i) {
                        x[j][i] = x[best][i] + 0.5 * (x[j][i] - x[best][i]);
                    }
                    fx[j] = f(x[j]);
                }
            }
        }
    }

    sort_simplex();
    result.x = x[order[0]];
    result.f_min = fx[order[0]];
    result.iterations = iter;
    return result;
}

}  // namespace povmix
