#include "povmix/gof.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace povmix {

double mad_statistic(std::span<const double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) {
        throw std::invalid_argument("mad_statistic: empty sample");
    }
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double sum_h = 0.0;
    double weighted_log = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double h = std::min(cdf(sorted[i]), k_cdf_clip);
        sum_h += h;
        const double w = 2.0 - (2.0 * static_cast<double>(i + 1) - 1.0) / n;
        weighted_log += w * std::log(1.0 - h);
    }
    return 0.5 * n - 2.0 * sum_h - weighted_log;
}

GofResult bootstrap_gof_test(std::span<const double> xs,
                             const GpdFitFn& fit,
                             const GpdSampleFn& sample,
                             std::size_t n_boot,
                             Rng& rng,
                             bool keep_boot_stats) {
    if (n_boot == 0) {
        throw std::invalid_argument("bootstrap_gof_test: n_boot must be >= 1");
    }

    const GpdFit observed = fit(xs);
    if (!observed.converged || !std::isfinite(observed.loglik)) {
        throw FitError("bootstrap_gof_test: fit failed on the observed sample");
    }
    const double t_obs =
        mad_statistic(xs, [&](double x) { return gpd_cdf(observed.params, x); });

    const std::uint64_t boot_seed = rng.next_u64();
    const std::size_t max_redraws = 3 * n_boot;
    std::size_t redraws = 0;
    std::size_t n_geq = 0;

    GofResult result;
    result.statistic = t_obs;
    result.n_boot = n_boot;
    if (keep_boot_stats) {
        result.boot_stats.reserve(n_boot);
    }

    for (std::size_t b = 0; b < n_boot; ++b) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            Rng replicate_rng(derive_seed(boot_seed, b, attempt));
            const std::vector<double> ys = sample(observed, xs.size(), replicate_rng);
            GpdFit refit;
            try {
                refit = fit(ys);
            } catch (const std::exception&) {
                refit.converged = false;
            }
            if (!refit.converged || !std::isfinite(refit.loglik)) {
                if (++redraws > max_redraws) {
                    throw FitError("bootstrap_gof_test: refit failure cap exhausted");
                }
                continue;
            }
            const double t_b =
                mad_statistic(ys, [&](double x) { return gpd_cdf(refit.params, x); });
            if (t_b >= t_obs) {
                ++n_geq;
            }
            if (keep_boot_stats) {
                result.boot_stats.push_back(t_b);
            }
            break;
        }
    }

    result.p_value = static_cast<double>(1 + n_geq) / static_cast<double>(n_boot + 1);
    return result;
}

}  // namespace povmix
