#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "povmix/distributions.hpp"
#include "povmix/gof.hpp"
#include "povmix/gpd.hpp"
#include "povmix/pot.hpp"

#include <json.hpp>

namespace povmix {

struct ClassifierConfig {
    double threshold_p = 0.95;
    double alpha = 0.05;
    std::size_t n_boot = 250;
    std::size_t min_excesses = k_default_min_excesses;
    std::uint64_t seed = 0;
};

// Which side of the tree a classification went down after the first
// goodness-of-fit test: `deviance` when the GPD was accepted on the raw
// excesses, `jitter` when it was rejected and the jittered exponential fit
// ran, `none` when the walk stopped before that test.
enum class Branch { none, deviance, jitter };

const char* to_string(Branch branch);

// Every intermediate quantity of one decision-tree walk.
struct DecisionTrace {
    double threshold = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_excess = 0;
    std::optional<GpdFit> gpd_fit;        // unrestricted fit on the raw excesses
    std::optional<GofResult> mad_stage1;  // GPD goodness of fit
    std::optional<DevianceResult> deviance;
    std::optional<GpdFit> jittered_fit;   // shape pinned at 0, jittered excesses
    std::optional<GofResult> mad_stage2;  // exponential goodness of fit
    Category category;
    Branch branch = Branch::none;
};

// Routes a count sample to its tail category:
//   1. threshold at the type-1 empirical quantile threshold_p,
//   2. take the excesses (an unclassified result with reason
//      "too-few-excesses" if fewer than min_excesses),
//   3. unrestricted GPD fit,
//   4. bootstrap goodness-of-fit test at level alpha,
//   5a. accepted: deviance test of shape == 0 — not significant → Gumbel;
//       significant with positive shape → Fréchet; significant with
//       negative shape → unclassified "negative-shape";
//   5b. rejected: jitter the excesses, fit with shape pinned at 0, test
//       again — accepted → pseudo-Gumbel; rejected → unclassified
//       "jitter-rejected".
// Deterministic given (ys, config). Throws std::invalid_argument on
// degenerate input (all observations equal).
std::pair<Category, DecisionTrace> classify(std::span<const std::int64_t> ys,
                                            const ClassifierConfig& config);

// Stable machine-readable form of a trace. Field names and order are fixed:
// u, n_excess, gamma_hat, sigma_hat, mad1_p, dev_p, mad2_p, category,
// branch, reason; values not reached on the taken path are null.
nlohmann::ordered_json trace_to_json(const DecisionTrace& trace);

}  // namespace povmix
