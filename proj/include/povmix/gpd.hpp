#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "povmix/rng.hpp"

namespace povmix {

// Default floor on the number of excesses a fit will accept.
inline constexpr std::size_t k_default_min_excesses = 10;

// Shapes this close to zero are treated as exactly zero, removing the
// removable singularity of the cdf/likelihood.
inline constexpr double k_shape_zero_tol = 1e-9;

// Raised when a numerical routine cannot produce a usable result
// (non-converged fit feeding a test, bootstrap refit cap exhausted, ...).
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Generalized Pareto parameters. Support is [0, inf) for shape >= 0 and
// [0, -scale/shape] for shape < 0; scale must be strictly positive.
struct GpdParams {
    double shape = 0.0;
    double scale = 1.0;
};

double gpd_cdf(const GpdParams& params, double y);

// Inverse cdf for p in [0, 1).
double gpd_quantile(const GpdParams& params, double p);

std::vector<double> gpd_sample(const GpdParams& params, std::size_t n, Rng& rng);

// Log-likelihood of xs under params; -infinity when any observation falls
// off the support.
double gpd_loglik(const GpdParams& params, std::span<const double> xs);

struct GpdFit {
    GpdParams params;
    double loglik = 0.0;
    bool converged = false;
    std::size_t n_obs = 0;
    std::optional<double> fixed_shape;
};

// Maximum-likelihood fit. With fixed_shape == 0 the scale has the closed
// form mean(xs) and no optimizer runs; otherwise a Nelder-Mead search over
// (shape, log scale) — or log scale alone when the shape is pinned — started
// at shape 0.1, scale mean(xs), with step 0.1, spread tolerance 1e-8 and a
// 500-iteration budget. Throws std::invalid_argument for fewer than min_obs
// observations or non-positive values.
GpdFit fit_gpd_mle(std::span<const double> xs,
                   std::optional<double> fixed_shape = std::nullopt,
                   std::size_t min_obs = k_default_min_excesses);

struct DevianceResult {
    double statistic = 0.0;  // 2(L1 - L0), clamped at zero
    double p_value = 1.0;
    double shape_hat = 0.0;  // from the unrestricted fit
};

// Likelihood-ratio test of shape == 0 against the chi-squared(1) reference.
DevianceResult deviance_test(std::span<const double> xs,
                             std::size_t min_obs = k_default_min_excesses);

// Chi-squared cdf with one degree of freedom, via the erf form of the
// regularized incomplete gamma. Accurate to ~1e-15.
double chi_squared1_cdf(double x);

}  // namespace povmix
