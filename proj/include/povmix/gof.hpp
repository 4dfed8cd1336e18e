#pragma once

#include <functional>
#include <span>
#include <vector>

#include "povmix/gpd.hpp"
#include "povmix/rng.hpp"

namespace povmix {

// Fitted-cdf values at or above this are clipped before log(1-H); negative-
// shape fits can place observed points exactly at the support endpoint.
inline constexpr double k_cdf_clip = 1.0 - 1e-12;

struct GofResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_boot = 0;
    std::vector<double> boot_stats;  // retained only on request
};

// Modified (upper-tail) Anderson-Darling statistic of xs against the
// distribution function cdf:
//   T = n/2 - 2 Σ H(X(i)) - Σ [2 - (2i-1)/n] log(1 - H(X(i)))
// with X(1) <= ... <= X(n) the order statistics. Throws on empty input.
double mad_statistic(std::span<const double> xs, const std::function<double(double)>& cdf);

using GpdFitFn = std::function<GpdFit(std::span<const double>)>;
using GpdSampleFn = std::function<std::vector<double>(const GpdFit&, std::size_t, Rng&)>;

// Parametric bootstrap goodness-of-fit test: fit on xs, take the statistic
// against the fitted cdf, then for each of n_boot replicates draw an
// equally-sized sample from the fitted model, refit, and recompute; the
// add-one p-value (1 + #{T_b >= T_obs}) / (n_boot + 1) never reaches zero.
// Replicate b derives its generator from (seed drawn off rng, b), so the
// result depends only on the incoming generator state and n_boot.
// Replicates whose refit fails are redrawn, up to 3*n_boot redraws in
// total; a failed fit on xs itself or an exhausted cap raises FitError.
GofResult bootstrap_gof_test(std::span<const double> xs,
                             const GpdFitFn& fit,
                             const GpdSampleFn& sample,
                             std::size_t n_boot,
                             Rng& rng,
                             bool keep_boot_stats = false);

}  // namespace povmix
