#include "povmix/distributions.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace povmix {

namespace {

constexpr double pi = 3.14159265358979323846;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be strictly positive");
    }
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

// Marsaglia & Tsang (2000) squeeze method; shapes below 1 are boosted with
// the U^{1/a} trick.
double sample_gamma(double shape, double rate, Rng& rng) {
    double boost = 1.0;
    if (shape < 1.0) {
        boost = std::pow(rng.uniform01(), 1.0 / shape);
        shape += 1.0;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return boost * d * v / rate;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return boost * d * v / rate;
        }
    }
}

// Michael, Schucany & Haas (1976) transform-with-roots method. The smaller
// root is computed as μ(R-w)/(R+w) to avoid the cancellation the textbook
// form suffers for large normal draws.
double sample_inverse_gaussian(double mean, double shape, Rng& rng) {
    const double z = rng.normal();
    const double w = mean * z * z;
    const double r = std::sqrt(w * (w + 4.0 * shape));
    const double x = mean * (r - w) / (r + w);
    if (rng.uniform01() <= mean / (mean + x)) {
        return x;
    }
    return mean * mean / x;
}

// Hörmann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS. Exact for 10 <= lambda <= 1e12.
std::int64_t sample_poisson_ptrs(double lambda, Rng& rng) {
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
        const double u = rng.uniform01() - 0.5;
        const double v = rng.uniform01();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) {
            return static_cast<std::int64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_lambda - lambda - std::lgamma(k + 1.0)) {
            return static_cast<std::int64_t>(k);
        }
    }
}

// Knuth-style sequential inversion; exact for small lambda.
std::int64_t sample_poisson_inversion(double lambda, Rng& rng) {
    const double u = rng.uniform01();
    double p = std::exp(-lambda);
    double f = p;
    std::int64_t k = 0;
    while (u > f) {
        ++k;
        p *= lambda / static_cast<double>(k);
        f += p;
        if (p < 1e-320) {
            break;  // remaining mass below representable; u cannot be reached
        }
    }
    return k;
}

}  // namespace

const char* to_string(MixingFamily family) {
    switch (family) {
        case MixingFamily::gamma: return "gamma";
        case MixingFamily::exponential: return "exponential";
        case MixingFamily::lognormal: return "lognormal";
        case MixingFamily::frechet: return "frechet";
        case MixingFamily::folded_cauchy: return "folded-cauchy";
        case MixingFamily::weibull: return "weibull";
        case MixingFamily::inverse_gamma: return "inverse-gamma";
        case MixingFamily::beta_prime: return "beta2";
        case MixingFamily::inverse_gaussian: return "inverse-gaussian";
    }
    return "?";
}

const char* to_string(CategoryKind kind) {
    switch (kind) {
        case CategoryKind::frechet: return "frechet";
        case CategoryKind::gumbel: return "gumbel";
        case CategoryKind::pseudo_gumbel: return "pseudo-gumbel";
        case CategoryKind::unclassified: return "unclassified";
    }
    return "?";
}

Category Category::unclassified(std::string reason) {
    if (reason.empty()) {
        throw std::invalid_argument("unclassified category requires a reason code");
    }
    return {CategoryKind::unclassified, std::move(reason)};
}

MixingLaw MixingLaw::gamma(double shape, double rate) {
    require_positive(shape, "gamma shape");
    require_positive(rate, "gamma rate");
    return {MixingFamily::gamma, shape, rate};
}

MixingLaw MixingLaw::exponential(double rate) {
    require_positive(rate, "exponential rate");
    return {MixingFamily::exponential, rate, 0.0};
}

MixingLaw MixingLaw::lognormal(double location, double scale) {
    require_finite(location, "lognormal location");
    require_positive(scale, "lognormal scale");
    return {MixingFamily::lognormal, location, scale};
}

MixingLaw MixingLaw::frechet(double shape, double scale) {
    require_positive(shape, "frechet shape");
    require_positive(scale, "frechet scale");
    return {MixingFamily::frechet, shape, scale};
}

MixingLaw MixingLaw::folded_cauchy(double location, double scale) {
    require_finite(location, "folded-cauchy location");
    require_positive(scale, "folded-cauchy scale");
    return {MixingFamily::folded_cauchy, location, scale};
}

MixingLaw MixingLaw::weibull(double shape, double scale) {
    require_positive(shape, "weibull shape");
    require_positive(scale, "weibull scale");
    return {MixingFamily::weibull, shape, scale};
}

MixingLaw MixingLaw::inverse_gamma(double shape, double scale) {
    require_positive(shape, "inverse-gamma shape");
    require_positive(scale, "inverse-gamma scale");
    return {MixingFamily::inverse_gamma, shape, scale};
}

MixingLaw MixingLaw::beta_prime(double a, double b) {
    require_positive(a, "beta2 a");
    require_positive(b, "beta2 b");
    return {MixingFamily::beta_prime, a, b};
}

MixingLaw MixingLaw::inverse_gaussian(double mean, double shape) {
    require_positive(mean, "inverse-gaussian mean");
    require_positive(shape, "inverse-gaussian shape");
    return {MixingFamily::inverse_gaussian, mean, shape};
}

std::string MixingLaw::describe() const {
    std::ostringstream out;
    out << to_string(family_) << '(' << p1_;
    if (family_ != MixingFamily::exponential) {
        out << ',' << p2_;
    }
    out << ')';
    return out.str();
}

double MixingLaw::sample(Rng& rng) const {
    switch (family_) {
        case MixingFamily::gamma:
            return sample_gamma(p1_, p2_, rng);
        case MixingFamily::exponential:
            return -std::log1p(-rng.uniform01()) / p1_;
        case MixingFamily::lognormal:
            return std::exp(p1_ + p2_ * rng.normal());
        case MixingFamily::frechet:
            return p2_ * std::pow(-std::log(rng.uniform01()), -1.0 / p1_);
        case MixingFamily::folded_cauchy:
            return std::abs(p1_ + p2_ * std::tan(pi * (rng.uniform01() - 0.5)));
        case MixingFamily::weibull:
            return p2_ * std::pow(-std::log1p(-rng.uniform01()), 1.0 / p1_);
        case MixingFamily::inverse_gamma:
            return 1.0 / sample_gamma(p1_, p2_, rng);
        case MixingFamily::beta_prime:
            return sample_gamma(p1_, 1.0, rng) / sample_gamma(p2_, 1.0, rng);
        case MixingFamily::inverse_gaussian:
            return sample_inverse_gaussian(p1_, p2_, rng);
    }
    throw std::logic_error("unreachable mixing family");
}

MixingLaw make_law(const std::string& name, std::span<const double> params) {
    const auto need = [&](std::size_t arity) {
        if (params.size() != arity) {
            std::ostringstream out;
            out << "law '" << name << "' takes " << arity << " parameter"
                << (arity == 1 ? "" : "s") << ", got " << params.size();
            throw std::invalid_argument(out.str());
        }
    };
    if (name == "gamma") { need(2); return MixingLaw::gamma(params[0], params[1]); }
    if (name == "exponential") { need(1); return MixingLaw::exponential(params[0]); }
    if (name == "lognormal") { need(2); return MixingLaw::lognormal(params[0], params[1]); }
    if (name == "frechet") { need(2); return MixingLaw::frechet(params[0], params[1]); }
    if (name == "folded-cauchy") { need(2); return MixingLaw::folded_cauchy(params[0], params[1]); }
    if (name == "weibull") { need(2); return MixingLaw::weibull(params[0], params[1]); }
    if (name == "inverse-gamma") { need(2); return MixingLaw::inverse_gamma(params[0], params[1]); }
    if (name == "beta2") { need(2); return MixingLaw::beta_prime(params[0], params[1]); }
    if (name == "inverse-gaussian") { need(2); return MixingLaw::inverse_gaussian(params[0], params[1]); }
    throw std::invalid_argument(
        "unknown law '" + name +
        "'; supported: gamma, exponential, lognormal, frechet, folded-cauchy, "
        "weibull, inverse-gamma, beta2, inverse-gaussian");
}

MixingLaw parse_law(const std::string& spec) {
    const auto open = spec.find('(');
    const auto close = spec.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw std::invalid_argument("law spec must look like name(p1,p2): '" + spec + "'");
    }
    const std::string name = spec.substr(0, open);
    std::vector<double> params;
    std::string body = spec.substr(open + 1, close - open - 1);
    std::istringstream in(body);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad parameter '" + tok + "' in law spec '" + spec + "'");
        }
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        if (used != tok.size()) {
            throw std::invalid_argument("bad parameter '" + tok + "' in law spec '" + spec + "'");
        }
        params.push_back(v);
    }
    return make_law(name, params);
}

std::vector<double> sample_mixing(const MixingLaw& law, std::size_t n, Rng& rng) {
    if (n == 0) {
        throw std::invalid_argument("sample_mixing: n must be >= 1");
    }
    std::vector<double> out(n);
    for (auto& v : out) {
        v = law.sample(rng);
    }
    return out;
}

std::int64_t sample_poisson(double lambda, Rng& rng) {
    if (!std::isfinite(lambda) || lambda < 0.0) {
        throw std::invalid_argument("sample_poisson: intensity must be finite and non-negative");
    }
    if (lambda > k_max_poisson_intensity) {
        throw std::overflow_error("sample_poisson: intensity too large to sample exactly");
    }
    if (lambda == 0.0) {
        return 0;
    }
    if (lambda < k_poisson_inversion_cutoff) {
        return sample_poisson_inversion(lambda, rng);
    }
    return sample_poisson_ptrs(lambda, rng);
}

std::vector<std::int64_t> sample_poisson_mixture(const MixingLaw& law, std::size_t n, Rng& rng) {
    if (n == 0) {
        throw std::invalid_argument("sample_poisson_mixture: n must be >= 1");
    }
    std::vector<std::int64_t> out(n);
    for (auto& y : out) {
        y = sample_poisson(law.sample(rng), rng);
    }
    return out;
}

Category category_of(const MixingLaw& law) {
    switch (law.family()) {
        case MixingFamily::frechet:
        case MixingFamily::folded_cauchy:
        case MixingFamily::inverse_gamma:
        case MixingFamily::beta_prime:
            return Category::frechet();
        case MixingFamily::lognormal:
            return Category::gumbel();
        case MixingFamily::weibull:
            // strict: the boundary shape 0.5 is not covered
            return law.param1() < 0.5
                       ? Category::gumbel()
                       : Category::unclassified(reason::outside_category_conditions);
        case MixingFamily::exponential:
        case MixingFamily::gamma:
        case MixingFamily::inverse_gaussian:
            return Category::pseudo_gumbel();
    }
    throw std::logic_error("unreachable mixing family");
}

std::optional<double> gamma_type_beta(const MixingLaw& law) {
    switch (law.family()) {
        case MixingFamily::gamma:
            return law.param2();
        case MixingFamily::exponential:
            return law.param1();
        case MixingFamily::inverse_gaussian:
            return law.param2() / (2.0 * law.param1() * law.param1());
        default:
            return std::nullopt;
    }
}

std::optional<double> tail_ratio_limit(const MixingLaw& law, int k) {
    const auto beta = gamma_type_beta(law);
    if (!beta) {
        return std::nullopt;
    }
    return std::pow(1.0 + *beta, -static_cast<double>(k));
}

std::optional<MixtureMoments> mixture_moments(const MixingLaw& law) {
    const double a = law.param1();
    const double b = law.param2();
    double mean = 0.0;
    double var = 0.0;
    switch (law.family()) {
        case MixingFamily::gamma:
            mean = a / b;
            var = a / (b * b);
            break;
        case MixingFamily::exponential:
            mean = 1.0 / a;
            var = 1.0 / (a * a);
            break;
        case MixingFamily::lognormal:
            mean = std::exp(a + 0.5 * b * b);
            var = (std::exp(b * b) - 1.0) * std::exp(2.0 * a + b * b);
            break;
        case MixingFamily::frechet: {
            if (a <= 2.0) return std::nullopt;
            const double g1 = std::tgamma(1.0 - 1.0 / a);
            const double g2 = std::tgamma(1.0 - 2.0 / a);
            mean = b * g1;
            var = b * b * (g2 - g1 * g1);
            break;
        }
        case MixingFamily::folded_cauchy:
            return std::nullopt;
        case MixingFamily::weibull: {
            const double g1 = std::tgamma(1.0 + 1.0 / a);
            const double g2 = std::tgamma(1.0 + 2.0 / a);
            mean = b * g1;
            var = b * b * (g2 - g1 * g1);
            break;
        }
        case MixingFamily::inverse_gamma:
            if (a <= 2.0) return std::nullopt;
            mean = b / (a - 1.0);
            var = b * b / ((a - 1.0) * (a - 1.0) * (a - 2.0));
            break;
        case MixingFamily::beta_prime:
            if (b <= 2.0) return std::nullopt;
            mean = a / (b - 1.0);
            var = a * (a + b - 1.0) / ((b - 2.0) * (b - 1.0) * (b - 1.0));
            break;
        case MixingFamily::inverse_gaussian:
            mean = a;
            var = a * a * a / b;
            break;
    }
    return MixtureMoments{mean, mean + var};
}

}  // namespace povmix
