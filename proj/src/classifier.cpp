#include "povmix/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace povmix {

namespace {

GpdFit fit_free(std::span<const double> xs, std::size_t min_obs) {
    return fit_gpd_mle(xs, std::nullopt, min_obs);
}

GpdFit fit_exponential(std::span<const double> xs, std::size_t min_obs) {
    return fit_gpd_mle(xs, 0.0, min_obs);
}

std::vector<double> sample_from_fit(const GpdFit& fit, std::size_t n, Rng& rng) {
    return gpd_sample(fit.params, n, rng);
}

// Invariant check run on every classification: the recorded p-values, shape
// sign and branch must imply the category that was returned.
void verify_trace(const DecisionTrace& trace, const ClassifierConfig& config) {
    const auto fail = [] { throw std::logic_error("classifier trace inconsistent"); };
    const double alpha = config.alpha;
    switch (trace.category.kind) {
        case CategoryKind::gumbel:
            if (trace.branch != Branch::deviance || !trace.mad_stage1 || !trace.deviance) fail();
            if (trace.mad_stage1->p_value < alpha || trace.deviance->p_value < alpha) fail();
            break;
        case CategoryKind::frechet:
            if (trace.branch != Branch::deviance || !trace.mad_stage1 || !trace.deviance) fail();
            if (trace.mad_stage1->p_value < alpha) fail();
            if (trace.deviance->p_value >= alpha || !(trace.deviance->shape_hat > 0.0)) fail();
            break;
        case CategoryKind::pseudo_gumbel:
            if (trace.branch != Branch::jitter || !trace.mad_stage1 || !trace.mad_stage2) fail();
            if (trace.mad_stage1->p_value >= alpha || trace.mad_stage2->p_value < alpha) fail();
            break;
        case CategoryKind::unclassified:
            if (trace.category.reason == reason::negative_shape) {
                if (trace.branch != Branch::deviance || !trace.deviance) fail();
                if (trace.deviance->p_value >= alpha || trace.deviance->shape_hat > 0.0) fail();
            } else if (trace.category.reason == reason::jitter_rejected) {
                if (trace.branch != Branch::jitter || !trace.mad_stage2) fail();
                if (trace.mad_stage2->p_value >= alpha) fail();
            } else if (trace.category.reason == reason::too_few_excesses) {
                if (trace.branch != Branch::none) fail();
            } else {
                fail();
            }
            break;
    }
}

}  // namespace

const char* to_string(Branch branch) {
    switch (branch) {
        case Branch::none: return "none";
        case Branch::deviance: return "deviance";
        case Branch::jitter: return "jitter";
    }
    return "?";
}

std::pair<Category, DecisionTrace> classify(std::span<const std::int64_t> ys,
                                            const ClassifierConfig& config) {
    if (ys.empty()) {
        throw std::invalid_argument("classify: empty sample");
    }
    if (std::all_of(ys.begin(), ys.end(), [&](std::int64_t y) { return y == ys.front(); })) {
        throw std::invalid_argument("classify: degenerate input, all observations equal");
    }

    DecisionTrace trace;
    trace.threshold = empirical_quantile(ys, config.threshold_p);

    ExcessSample exc;
    try {
        exc = excesses(ys, trace.threshold, config.min_excesses);
    } catch (const TooFewExcessesError& e) {
        trace.n_excess = e.found();
        trace.category = Category::unclassified(reason::too_few_excesses);
        verify_trace(trace, config);
        return {trace.category, trace};
    }
    trace.n_excess = exc.values.size();

    Rng rng(config.seed);
    const std::size_t floor = config.min_excesses;

    trace.gpd_fit = fit_free(exc.values, floor);
    trace.mad_stage1 = bootstrap_gof_test(
        exc.values, [&](std::span<const double> xs) { return fit_free(xs, floor); },
        sample_from_fit, config.n_boot, rng);

    if (trace.mad_stage1->p_value >= config.alpha) {
        trace.branch = Branch::deviance;
        trace.deviance = deviance_test(exc.values, floor);
        if (trace.deviance->p_value >= config.alpha) {
            trace.category = Category::gumbel();
        } else if (trace.deviance->shape_hat > 0.0) {
            trace.category = Category::frechet();
        } else {
            trace.category = Category::unclassified(reason::negative_shape);
        }
    } else {
        trace.branch = Branch::jitter;
        const JitteredExcesses jittered = jitter(exc, rng);
        trace.jittered_fit = fit_exponential(jittered.values, floor);
        trace.mad_stage2 = bootstrap_gof_test(
            jittered.values,
            [&](std::span<const double> xs) { return fit_exponential(xs, floor); },
            sample_from_fit, config.n_boot, rng);
        trace.category = trace.mad_stage2->p_value >= config.alpha
                             ? Category::pseudo_gumbel()
                             : Category::unclassified(reason::jitter_rejected);
    }

    verify_trace(trace, config);
    return {trace.category, trace};
}

nlohmann::ordered_json trace_to_json(const DecisionTrace& trace) {
    nlohmann::ordered_json doc;
    doc["u"] = trace.threshold;
    doc["n_excess"] = trace.n_excess;
    if (trace.gpd_fit) {
        doc["gamma_hat"] = trace.gpd_fit->params.shape;
        doc["sigma_hat"] = trace.gpd_fit->params.scale;
    } else {
        doc["gamma_hat"] = nullptr;
        doc["sigma_hat"] = nullptr;
    }
    doc["mad1_p"] = trace.mad_stage1 ? nlohmann::ordered_json(trace.mad_stage1->p_value)
                                     : nlohmann::ordered_json(nullptr);
    doc["dev_p"] = trace.deviance ? nlohmann::ordered_json(trace.deviance->p_value)
                                  : nlohmann::ordered_json(nullptr);
    doc["mad2_p"] = trace.mad_stage2 ? nlohmann::ordered_json(trace.mad_stage2->p_value)
                                     : nlohmann::ordered_json(nullptr);
    doc["category"] = to_string(trace.category.kind);
    doc["branch"] = to_string(trace.branch);
    doc["reason"] = trace.category.kind == CategoryKind::unclassified
                        ? nlohmann::ordered_json(trace.category.reason)
                        : nlohmann::ordered_json(nullptr);
    return doc;
}

}  // namespace povmix
