#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "povmix/classifier.hpp"
#include "povmix/distributions.hpp"

namespace povmix {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Scenario {
    MixingLaw law;
    std::size_t sample_size = 1000;
    double threshold_p = 0.95;
};

struct StudyConfig {
    std::vector<Scenario> scenarios;
    std::size_t replicates = 200;
    double alpha = 0.05;
    std::size_t n_boot = 250;
    std::size_t min_excesses = k_default_min_excesses;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

struct StudyRecord {
    std::size_t scenario = 0;
    std::size_t replicate = 0;
    std::size_t n_excess = 0;
    bool gpd_rejected = false;  // stage-1 goodness-of-fit rejection
    Category category;
    double shape_hat = std::numeric_limits<double>::quiet_NaN();
    double runtime_ms = 0.0;
};

// One record per scenario x replicate, ordered by (scenario, replicate).
// Replicate r of scenario s draws everything from generators derived from
// (seed, s, r), so the output is identical for any worker count. Replicate
// failures become unclassified records, never abort the study.
std::vector<StudyRecord> run_study(const StudyConfig& config);

struct ScenarioSummary {
    std::string mixing;
    std::size_t replicates = 0;
    double avg_excesses = 0.0;
    double gpd_rejection = 0.0;
    double freq_frechet = 0.0;
    double freq_gumbel = 0.0;
    double freq_pseudo = 0.0;
    double freq_unclassified = 0.0;
    CategoryKind most_frequent = CategoryKind::unclassified;
    bool tie = false;  // broken toward the earlier of frechet, gumbel, pseudo, unclassified
};

// Per-scenario aggregates over all replicates, unclassified ones included.
std::vector<ScenarioSummary> summarize(const StudyConfig& config,
                                       std::span<const StudyRecord> records);

// CSV: scenario,replicate,n_excess,gpd_rejected,category,gamma_hat.
// Runtime is intentionally not serialized so output bytes do not depend on
// scheduling.
std::string records_to_csv(const StudyConfig& config, std::span<const StudyRecord> records);

// CSV: mixing,avg_excesses,gpd_rejection,freq_frechet,freq_gumbel,
// freq_pseudo,freq_unclassified,most_frequent ("*" marks a broken tie).
std::string summary_to_csv(std::span<const ScenarioSummary> summaries);

// Rejection sweep over the inverse-Gaussian shape: for each sigma, simulate
// Poisson-inverse-Gaussian(mean, sigma) samples and record how often the
// stage-1 goodness-of-fit test rejects the GPD on the excesses.
struct SweepConfig {
    double mean = 2.0;
    std::vector<double> sigma_grid;
    std::size_t sample_size = 2000;
    double threshold_p = 0.975;
    std::size_t replicates = 500;
    double alpha = 0.05;
    std::size_t n_boot = 250;
    std::size_t min_excesses = k_default_min_excesses;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

struct SweepPoint {
    double sigma = 0.0;
    double rejection = 0.0;
    double limit_tail_ratio = 0.0;  // (1 + sigma/(2 mean^2))^{-1}
};

std::vector<SweepPoint> figure3_sweep(const SweepConfig& config);

// CSV: sigma,rejection,tail_ratio_limit.
std::string sweep_to_csv(std::span<const SweepPoint> points);

// Plain-text key-value study config:
//   replicates = 200        (required)
//   boot = 250
//   alpha = 0.05
//   min_excesses = 10
//   seed = 1
//   n = 1000                (default sample size for scenarios)
//   threshold_p = 0.95      (default threshold quantile)
//   scenario = gamma(2,1)   (repeatable; optional trailing n=... p=...)
// '#' starts a comment. Throws ConfigError naming the offending key.
StudyConfig parse_study_config(std::istream& in);

// Runs fn(0..count-1) on `workers` threads; any task exception is rethrown
// after all tasks finish.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace povmix
