#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "povmix/gpd.hpp"
#include "povmix/rng.hpp"

namespace povmix {

// Raised when a threshold leaves fewer excesses than the configured floor;
// carries the observed count so callers can report it.
class TooFewExcessesError : public std::runtime_error {
public:
    TooFewExcessesError(std::size_t found, std::size_t required);
    std::size_t found() const { return found_; }
    std::size_t required() const { return required_; }

private:
    std::size_t found_;
    std::size_t required_;
};

// Excesses y - u of the observations strictly above the threshold u, in
// input order. For integer-valued u and count data every value is an
// integer >= 1.
struct ExcessSample {
    double threshold = 0.0;
    std::vector<double> values;
    std::size_t n_total = 0;
};

struct JitteredExcesses {
    std::vector<double> values;
};

// Type-1 empirical quantile: the ceil(p*n)-th order statistic. Integer-
// valued for integer data, so thresholds and excesses of counts stay on the
// integer lattice. Throws on empty input or p outside (0,1).
double empirical_quantile(std::span<const std::int64_t> ys, double p);

// Throws TooFewExcessesError when fewer than min_count observations exceed
// the threshold.
ExcessSample excesses(std::span<const std::int64_t> ys,
                      double threshold,
                      std::size_t min_count = k_default_min_excesses);

// Subtracts an independent Uniform(0,1) from each excess, turning the
// integer sample into a continuous one on (0, inf). Requires every value
// >= 1 so the output stays strictly positive.
JitteredExcesses jitter(const ExcessSample& sample, Rng& rng);

struct MrlRow {
    double threshold = 0.0;
    std::size_t n_excess = 0;
    double mean_excess = 0.0;  // NaN when no excesses
    double ci_lo = 0.0;        // NaN when fewer than two excesses
    double ci_hi = 0.0;
    bool low_count = false;    // fewer than 5 excesses
};

// Mean residual life table: for each threshold u the mean excess over u with
// a normal-approximation 95% interval. Thin rows are flagged, never dropped.
std::vector<MrlRow> mean_residual_life(std::span<const std::int64_t> ys,
                                       std::span<const double> thresholds);

// CSV with header u,mean_excess,ci_lo,ci_hi,n_excess; NaN cells are left
// empty.
std::string mrl_to_csv(std::span<const MrlRow> rows);

}  // namespace povmix
