#include "povmix/pot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace povmix {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

void append_field(std::string& out, double v) {
    if (std::isnan(v)) {
        return;  // empty cell
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    out += buf;
}

}  // namespace

TooFewExcessesError::TooFewExcessesError(std::size_t found, std::size_t required)
    : std::runtime_error("too few excesses: " + std::to_string(found) + " found, " +
                         std::to_string(required) + " required"),
      found_(found),
      required_(required) {}

double empirical_quantile(std::span<const std::int64_t> ys, double p) {
    if (ys.empty()) {
        throw std::invalid_argument("empirical_quantile: empty sample");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("empirical_quantile: p must lie in (0,1)");
    }
    const double n = static_cast<double>(ys.size());
    // small backoff so p*n that should be integral is not pushed up a rank
    auto k = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    k = std::clamp<std::size_t>(k, 1, ys.size());
    std::vector<std::int64_t> sorted(ys.begin(), ys.end());
    std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
    return static_cast<double>(sorted[k - 1]);
}

ExcessSample excesses(std::span<const std::int64_t> ys,
                      double threshold,
                      std::size_t min_count) {
    if (threshold < 0.0) {
        throw std::invalid_argument("excesses: threshold must be non-negative");
    }
    ExcessSample out;
    out.threshold = threshold;
    out.n_total = ys.size();
    for (const std::int64_t y : ys) {
        if (static_cast<double>(y) > threshold) {
            out.values.push_back(static_cast<double>(y) - threshold);
        }
    }
    if (out.values.size() < min_count) {
        throw TooFewExcessesError(out.values.size(), min_count);
    }
    return out;
}

JitteredExcesses jitter(const ExcessSample& sample, Rng& rng) {
    JitteredExcesses out;
    out.values.reserve(sample.values.size());
    for (const double v : sample.values) {
        if (v < 1.0) {
            throw std::invalid_argument("jitter: excess values must be >= 1");
        }
        out.values.push_back(v - rng.uniform01());
    }
    return out;
}

std::vector<MrlRow> mean_residual_life(std::span<const std::int64_t> ys,
                                       std::span<const double> thresholds) {
    std::vector<MrlRow> rows;
    rows.reserve(thresholds.size());
    for (const double u : thresholds) {
        MrlRow row;
        row.threshold = u;
        double sum = 0.0;
        double sum_sq = 0.0;
        std::size_t n = 0;
        for (const std::int64_t y : ys) {
            const double e = static_cast<double>(y) - u;
            if (e > 0.0) {
                sum += e;
                sum_sq += e * e;
                ++n;
            }
        }
        row.n_excess = n;
        row.low_count = n < 5;
        if (n == 0) {
            row.mean_excess = nan_value;
            row.ci_lo = nan_value;
            row.ci_hi = nan_value;
        } else {
            const double mean = sum / static_cast<double>(n);
            row.mean_excess = mean;
            if (n < 2) {
                row.ci_lo = nan_value;
                row.ci_hi = nan_value;
            } else {
                const double var =
                    (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
                const double half = 1.96 * std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
                row.ci_lo = mean - half;
                row.ci_hi = mean + half;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::string mrl_to_csv(std::span<const MrlRow> rows) {
    std::string out = "u,mean_excess,ci_lo,ci_hi,n_excess\n";
    for (const auto& row : rows) {
        append_field(out, row.threshold);
        out += ',';
        append_field(out, row.mean_excess);
        out += ',';
        append_field(out, row.ci_lo);
        out += ',';
        append_field(out, row.ci_hi);
        out += ',';
        out += std::to_string(row.n_excess);
        out += '\n';
    }
    return out;
}

}  // namespace povmix
