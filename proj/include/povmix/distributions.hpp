#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "povmix/rng.hpp"

namespace povmix {

enum class MixingFamily {
    gamma,
    exponential,
    lognormal,
    frechet,
    folded_cauchy,
    weibull,
    inverse_gamma,
    beta_prime,
    inverse_gaussian,
};

const char* to_string(MixingFamily family);

enum class CategoryKind { frechet, gumbel, pseudo_gumbel, unclassified };

const char* to_string(CategoryKind kind);

// Classification outcome. `reason` is a machine-readable code, set exactly
// when kind == unclassified.
struct Category {
    CategoryKind kind = CategoryKind::unclassified;
    std::string reason;

    static Category frechet() { return {CategoryKind::frechet, {}}; }
    static Category gumbel() { return {CategoryKind::gumbel, {}}; }
    static Category pseudo_gumbel() { return {CategoryKind::pseudo_gumbel, {}}; }
    static Category unclassified(std::string reason);

    friend bool operator==(const Category&, const Category&) = default;
};

namespace reason {
inline constexpr const char* negative_shape = "negative-shape";
inline constexpr const char* jitter_rejected = "jitter-rejected";
inline constexpr const char* too_few_excesses = "too-few-excesses";
inline constexpr const char* outside_category_conditions = "outside-category-conditions";
inline constexpr const char* replicate_error = "replicate-error";
}  // namespace reason

// A mixing distribution for the Poisson intensity. Parameterizations:
//   gamma(shape a, rate b)            density ∝ x^{a-1} e^{-bx}
//   exponential(rate a)
//   lognormal(location μ, scale σ)    log X ~ N(μ, σ²)
//   frechet(shape a, scale s)         cdf exp(-(x/s)^{-a})
//   folded_cauchy(location μ, scale s)  |X| with X Cauchy(μ, s)
//   weibull(shape a, scale b)         survival exp(-(x/b)^a)
//   inverse_gamma(shape a, scale b)   1/X with X gamma(a, rate b)
//   beta_prime(a, b)                  density ∝ x^{a-1} (1+x)^{-a-b}
//   inverse_gaussian(mean μ, shape σ) density ∝ x^{-3/2} e^{-σx/(2μ²)} e^{-σ/(2x)}
// All parameters must be strictly positive except the two locations;
// factories throw std::invalid_argument otherwise.
class MixingLaw {
public:
    static MixingLaw gamma(double shape, double rate);
    static MixingLaw exponential(double rate);
    static MixingLaw lognormal(double location, double scale);
    static MixingLaw frechet(double shape, double scale);
    static MixingLaw folded_cauchy(double location, double scale);
    static MixingLaw weibull(double shape, double scale);
    static MixingLaw inverse_gamma(double shape, double scale);
    static MixingLaw beta_prime(double a, double b);
    static MixingLaw inverse_gaussian(double mean, double shape);

    MixingFamily family() const { return family_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }

    // e.g. "gamma(2,1)"
    std::string describe() const;

    // One draw of the mixing variate.
    double sample(Rng& rng) const;

private:
    MixingLaw(MixingFamily family, double p1, double p2)
        : family_(family), p1_(p1), p2_(p2) {}

    MixingFamily family_;
    double p1_;
    double p2_;
};

// Builds a law from a CLI/config name ("gamma", "exponential", "lognormal",
// "frechet", "folded-cauchy", "weibull", "inverse-gamma", "beta2",
// "inverse-gaussian") and its parameter list. Throws std::invalid_argument
// on unknown names or wrong arity.
MixingLaw make_law(const std::string& name, std::span<const double> params);

// Parses "name(p1,p2)" law specs as used in study config files.
MixingLaw parse_law(const std::string& spec);

// n i.i.d. draws of the mixing variate.
std::vector<double> sample_mixing(const MixingLaw& law, std::size_t n, Rng& rng);

// Intensities above this are rejected: the sampler's acceptance test loses
// floating-point accuracy further out, and a silent wrap of the count is
// exactly what must not happen for laws like folded-Cauchy.
inline constexpr double k_max_poisson_intensity = 1e12;

// One exact Poisson(lambda) draw: sequential inversion below
// k_poisson_inversion_cutoff, Hörmann's PTRS transformed rejection above it.
// Throws std::invalid_argument for non-finite or negative lambda and
// std::overflow_error above k_max_poisson_intensity.
inline constexpr double k_poisson_inversion_cutoff = 10.0;
std::int64_t sample_poisson(double lambda, Rng& rng);

// n draws Y_i ~ Poisson(lambda_i), lambda_i ~ law.
std::vector<std::int64_t> sample_poisson_mixture(const MixingLaw& law, std::size_t n, Rng& rng);

// The tail category the mixture of `law` is known to fall in. Weibull mixing
// is Gumbel only for shape < 0.5 (strictly); at or above that the category
// is unknown and an unclassified result is returned.
Category category_of(const MixingLaw& law);

// The decay rate β of the gamma-type representation f(x) ≍ C(x) x^α e^{-βx},
// when the family has one: gamma → rate, exponential → rate,
// inverse-Gaussian(μ,σ) → σ/(2μ²). Empty otherwise.
std::optional<double> gamma_type_beta(const MixingLaw& law);

// Limit of the count survival ratio S(n+k)/S(n) for gamma-type mixing,
// (1+β)^{-k}. Empty when β is undefined.
std::optional<double> tail_ratio_limit(const MixingLaw& law, int k);

struct MixtureMoments {
    double mean = 0.0;
    double variance = 0.0;  // E[λ] + Var(λ)
};

// Mean/variance of the Poisson mixture when the mixing moments are finite;
// empty otherwise (Fréchet shape ≤ 2, folded-Cauchy, ...). Returning empty
// instead of NaN keeps undefined moments from poisoning study summaries.
std::optional<MixtureMoments> mixture_moments(const MixingLaw& law);

}  // namespace povmix
