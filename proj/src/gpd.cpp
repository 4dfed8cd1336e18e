#include "povmix/gpd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "povmix/nelder_mead.hpp"

namespace povmix {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

void check_fit_input(std::span<const double> xs, std::size_t min_obs) {
    if (xs.size() < min_obs) {
        throw std::invalid_argument("fit_gpd_mle: fewer observations than the minimum-excess floor");
    }
    for (const double x : xs) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument("fit_gpd_mle: observations must be positive and finite");
        }
    }
}

}  // namespace

double gpd_cdf(const GpdParams& params, double y) {
    if (y <= 0.0) {
        return 0.0;
    }
    if (std::abs(params.shape) < k_shape_zero_tol) {
        return 1.0 - std::exp(-y / params.scale);
    }
    const double t = 1.0 + params.shape * y / params.scale;
    if (t <= 0.0) {
        return 1.0;  // beyond the upper endpoint (negative shape)
    }
    return 1.0 - std::pow(t, -1.0 / params.shape);
}

double gpd_quantile(const GpdParams& params, double p) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::invalid_argument("gpd_quantile: p must lie in [0,1)");
    }
    if (std::abs(params.shape) < k_shape_zero_tol) {
        return -params.scale * std::log1p(-p);
    }
    return params.scale * std::expm1(-params.shape * std::log1p(-p)) / params.shape;
}

std::vector<double> gpd_sample(const GpdParams& params, std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    for (auto& v : out) {
        v = gpd_quantile(params, 1.0 - rng.uniform01());
    }
    return out;
}

double gpd_loglik(const GpdParams& params, std::span<const double> xs) {
    const double m = static_cast<double>(xs.size());
    const double log_scale = std::log(params.scale);
    if (std::abs(params.shape) < k_shape_zero_tol) {
        double sum = 0.0;
        for (const double x : xs) {
            if (x < 0.0) return neg_inf;
            sum += x;
        }
        return -m * log_scale - sum / params.scale;
    }
    double acc = 0.0;
    for (const double x : xs) {
        if (x < 0.0) return neg_inf;
        const double t = 1.0 + params.shape * x / params.scale;
        if (t <= 0.0) return neg_inf;
        acc += std::log(t);
    }
    return -m * log_scale - (1.0 + 1.0 / params.shape) * acc;
}

GpdFit fit_gpd_mle(std::span<const double> xs,
                   std::optional<double> fixed_shape,
                   std::size_t min_obs) {
    check_fit_input(xs, min_obs);
    const double mean = mean_of(xs);

    if (fixed_shape && std::abs(*fixed_shape) < k_shape_zero_tol) {
        // exponential MLE, closed form
        const GpdParams params{0.0, mean};
        return {params, gpd_loglik(params, xs), true, xs.size(), 0.0};
    }

    if (fixed_shape) {
        const double shape = *fixed_shape;
        double scale0 = mean;
        if (shape < 0.0) {
            const double max_x = *std::max_element(xs.begin(), xs.end());
            scale0 = std::max(scale0, 1.5 * (-shape) * max_x);  // keep the start feasible
        }
        const auto objective = [&](std::span<const double> theta) {
            return -gpd_loglik({shape, std::exp(theta[0])}, xs);
        };
        const double start[] = {std::log(scale0)};
        const auto res = nelder_mead(objective, start);
        const GpdParams params{shape, std::exp(res.x[0])};
        return {params, -res.f_min, res.converged, xs.size(), shape};
    }

    const auto objective = [&](std::span<const double> theta) {
        return -gpd_loglik({theta[0], std::exp(theta[1])}, xs);
    };
    const double start[] = {0.1, std::log(mean)};
    const auto res = nelder_mead(objective, start);
    const GpdParams params{res.x[0], std::exp(res.x[1])};
    return {params, -res.f_min, res.converged, xs.size(), std::nullopt};
}

DevianceResult deviance_test(std::span<const double> xs, std::size_t min_obs) {
    const GpdFit full = fit_gpd_mle(xs, std::nullopt, min_obs);
    const GpdFit restricted = fit_gpd_mle(xs, 0.0, min_obs);
    // the restricted optimum is analytic; a slightly negative difference is
    // optimizer noise from the free fit
    const double d = std::max(0.0, 2.0 * (full.loglik - restricted.loglik));
    return {d, 1.0 - chi_squared1_cdf(d), full.params.shape};
}

double chi_squared1_cdf(double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    return std::erf(std::sqrt(0.5 * x));
}

}  // namespace povmix
