// Acceptance suite: each criterion prints exactly one PASS/FAIL line
// (details indented below it) and the process exits with the number of
// failed criteria. Run with no arguments for all criteria or with a list
// of criterion numbers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "povmix/classifier.hpp"
#include "povmix/distributions.hpp"
#include "povmix/gof.hpp"
#include "povmix/gpd.hpp"
#include "povmix/pot.hpp"
#include "povmix/study.hpp"

using namespace povmix;

namespace {

std::size_t workers() {
    std::size_t w = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("POVMIX_THREADS")) {
        const unsigned long cap = std::strtoul(env, nullptr, 10);
        if (cap >= 1) {
            w = std::min<std::size_t>(w, cap);
        }
    }
    return w;
}

std::vector<std::string> g_details;

void detail(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    g_details.emplace_back(buf);
}

// ---------------------------------------------------------------------------
// criterion 1: desk-scale reproduction of the published six-scenario table

bool criterion_table3() {
    StudyConfig config;
    config.scenarios = {
        Scenario{MixingLaw::frechet(1.0, 1.0), 1000, 0.95},
        Scenario{MixingLaw::folded_cauchy(0.0, 1.0), 1000, 0.95},
        Scenario{MixingLaw::lognormal(1.0, 1.0), 1000, 0.95},
        Scenario{MixingLaw::weibull(0.5, 1.0), 1000, 0.95},
        Scenario{MixingLaw::gamma(2.0, 1.0), 1000, 0.95},
        Scenario{MixingLaw::inverse_gaussian(1.0, 2.0), 1000, 0.95},
    };
    config.replicates = 200;
    config.n_boot = 250;
    config.alpha = 0.05;
    config.seed = 1001;
    config.workers = workers();

    const CategoryKind expected_category[] = {
        CategoryKind::frechet,       CategoryKind::frechet, CategoryKind::gumbel,
        CategoryKind::gumbel,        CategoryKind::pseudo_gumbel,
        CategoryKind::pseudo_gumbel,
    };
    const double expected_rejection[] = {0.069, 0.078, 0.126, 0.133, 0.704, 0.856};
    const double expected_excesses[] = {48.7, 48.2, 46.8, 46.2, 36.2, 39.0};

    const auto records = run_study(config);
    const auto summaries = summarize(config, records);

    bool pass = true;
    for (std::size_t s = 0; s < summaries.size(); ++s) {
        const auto& sum = summaries[s];
        const bool cat_ok = sum.most_frequent == expected_category[s];
        const bool rej_ok = std::abs(sum.gpd_rejection - expected_rejection[s]) <= 0.10;
        const bool exc_ok = std::abs(sum.avg_excesses - expected_excesses[s]) <= 3.0;
        pass = pass && cat_ok && rej_ok && exc_ok;
        detail("%-22s most_frequent=%-13s (want %-13s %s)  rejection=%.3f (want %.3f+-0.10 %s)  "
               "excesses=%.2f (want %.1f+-3 %s)",
               sum.mixing.c_str(), to_string(sum.most_frequent),
               to_string(expected_category[s]), cat_ok ? "ok" : "MISS", sum.gpd_rejection,
               expected_rejection[s], rej_ok ? "ok" : "MISS", sum.avg_excesses,
               expected_excesses[s], exc_ok ? "ok" : "MISS");
    }
    return pass;
}

// ---------------------------------------------------------------------------
// criterion 2: inverse-Gaussian shape sweep is strongly monotone

double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
    const auto ranks = [](std::span<const double> v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0.0;
            double equal = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (v[j] < v[i]) ++less;
                if (v[j] == v[i]) ++equal;
            }
            r[i] = less + 0.5 * (equal + 1.0);  // average rank
        }
        return r;
    };
    const auto rx = ranks(xs);
    const auto ry = ranks(ys);
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

bool criterion_sweep() {
    SweepConfig config;
    config.mean = 2.0;
    config.sigma_grid = {0.1, 0.5, 1.0, 2.0, 4.0, 8.0};
    config.sample_size = 2000;
    config.threshold_p = 0.975;
    config.replicates = 100;
    config.n_boot = 250;
    config.alpha = 0.05;
    config.seed = 1002;
    config.workers = workers();

    const auto points = figure3_sweep(config);
    std::vector<double> sigmas;
    std::vector<double> rejections;
    for (const auto& p : points) {
        sigmas.push_back(p.sigma);
        rejections.push_back(p.rejection);
        detail("sigma=%-4g rejection=%.3f theoretical_tail_ratio=%.4f", p.sigma, p.rejection,
               p.limit_tail_ratio);
    }
    const double gap = rejections.back() - rejections.front();
    const double rho = spearman_rho(sigmas, rejections);
    bool limits_decreasing = true;
    for (std::size_t i = 1; i < points.size(); ++i) {
        limits_decreasing = limits_decreasing &&
                            points[i].limit_tail_ratio < points[i - 1].limit_tail_ratio;
    }
    detail("rejection(8) - rejection(0.1) = %.3f (need >= 0.3), spearman rho = %.3f "
           "(need > 0.8), theoretical limits decreasing: %s",
           gap, rho, limits_decreasing ? "yes" : "NO");
    return gap >= 0.3 && rho > 0.8 && limits_decreasing;
}

// ---------------------------------------------------------------------------
// criterion 3: empirical count tail ratios against the gamma-type limits

double average_tail_ratio(const MixingLaw& law, std::uint64_t seed) {
    Rng rng(seed);
    const auto ys = sample_poisson_mixture(law, 10'000'000, rng);
    const auto q95 = static_cast<std::int64_t>(empirical_quantile(ys, 0.95));
    const auto q99 = static_cast<std::int64_t>(empirical_quantile(ys, 0.99));

    std::vector<double> freq(static_cast<std::size_t>(q99) + 3, 0.0);
    for (const auto y : ys) {
        freq[static_cast<std::size_t>(std::min<std::int64_t>(y, q99 + 2))] += 1.0;
    }
    std::vector<double> surv(static_cast<std::size_t>(q99) + 2, 0.0);
    double acc = 0.0;
    for (std::int64_t n = q99 + 1; n >= 0; --n) {
        acc += freq[static_cast<std::size_t>(n) + 1];
        surv[static_cast<std::size_t>(n)] = acc;
    }
    double total = 0.0;
    int terms = 0;
    for (std::int64_t n = q95; n <= q99; ++n) {
        total += surv[static_cast<std::size_t>(n) + 1] / surv[static_cast<std::size_t>(n)];
        ++terms;
    }
    return total / terms;
}

bool criterion_tail_ratio() {
    const double gamma_ratio = average_tail_ratio(MixingLaw::gamma(2.0, 1.0), 1003);
    const double gamma_target = 0.5;
    const bool gamma_ok = std::abs(gamma_ratio - gamma_target) <= 0.05;
    detail("gamma(2,1):            average ratio over [q95,q99] = %.4f (want 0.5+-0.05) %s",
           gamma_ratio, gamma_ok ? "ok" : "MISS");

    const double ig_ratio = average_tail_ratio(MixingLaw::inverse_gaussian(2.0, 1.0), 1004);
    const double ig_target = 8.0 / 9.0;
    const bool ig_ok = std::abs(ig_ratio - ig_target) <= 0.05;
    detail("inverse-gaussian(2,1): average ratio over [q95,q99] = %.4f (want %.4f+-0.05) %s",
           ig_ratio, ig_target, ig_ok ? "ok" : "MISS");
    if (!ig_ok) {
        detail("note: the limit 8/9 is asymptotic; at the 95th-99th percentiles (counts ~8-15)");
        detail("the x^{-3/2} prefactor still biases the exact ratio to ~0.81, outside the");
        detail("stated band, so this half cannot pass as specified.");
    }
    return gamma_ok && ig_ok;
}

// ---------------------------------------------------------------------------
// criterion 4: GPD maximum-likelihood estimator quality

bool criterion_estimator() {
    const double shapes[] = {-0.2, 0.0, 0.5, 1.0};
    const double scales[] = {1.0, 2.0};
    constexpr int repeats = 50;
    bool pass = true;
    for (const double shape : shapes) {
        for (const double scale : scales) {
            std::atomic<int> good{0};
            parallel_for(repeats, workers(), [&](std::size_t rep) {
                Rng rng(derive_seed(1005, rep, static_cast<std::uint64_t>(shape * 10 + 100),
                                    static_cast<std::uint64_t>(scale * 10)));
                const auto xs = gpd_sample({shape, scale}, 100'000, rng);
                const GpdFit fit = fit_gpd_mle(xs);
                if (fit.converged && std::abs(fit.params.shape - shape) <= 0.03 &&
                    std::abs(fit.params.scale - scale) / scale <= 0.03) {
                    ++good;
                }
            });
            const bool ok = good >= static_cast<int>(std::ceil(0.95 * repeats));
            pass = pass && ok;
            detail("shape=%-5.2f scale=%.0f: %d/%d repeats within tolerance %s", shape, scale,
                   good.load(), repeats, ok ? "ok" : "MISS");
        }
    }
    return pass;
}

// ---------------------------------------------------------------------------
// criterion 5: both tests hold their level on data from the fitted family

bool criterion_calibration() {
    std::atomic<int> mad_rejections{0};
    parallel_for(500, workers(), [&](std::size_t rep) {
        Rng data_rng(derive_seed(1006, rep));
        const auto xs = gpd_sample({0.2, 1.0}, 50, data_rng);
        Rng test_rng(derive_seed(1007, rep));
        const GofResult res = bootstrap_gof_test(
            xs, [](std::span<const double> v) { return fit_gpd_mle(v); },
            [](const GpdFit& fit, std::size_t n, Rng& rng) {
                return gpd_sample(fit.params, n, rng);
            },
            250, test_rng);
        if (res.p_value < 0.05) ++mad_rejections;
    });
    const double mad_rate = mad_rejections / 500.0;
    const bool mad_ok = mad_rate >= 0.02 && mad_rate <= 0.09;
    detail("bootstrap goodness-of-fit rejection rate = %.3f (want within [0.02, 0.09]) %s",
           mad_rate, mad_ok ? "ok" : "MISS");

    std::atomic<int> dev_rejections{0};
    parallel_for(500, workers(), [&](std::size_t rep) {
        Rng rng(derive_seed(1008, rep));
        const auto xs = gpd_sample({0.0, 1.0}, 10'000, rng);
        if (deviance_test(xs).p_value < 0.05) ++dev_rejections;
    });
    const double dev_rate = dev_rejections / 500.0;
    const bool dev_ok = dev_rate >= 0.02 && dev_rate <= 0.09;
    detail("deviance rejection rate = %.3f (want within [0.02, 0.09]) %s", dev_rate,
           dev_ok ? "ok" : "MISS");
    return mad_ok && dev_ok;
}

// ---------------------------------------------------------------------------
// criterion 6: Poisson-beta2 simulated moments

bool criterion_moments() {
    Rng rng(1009);
    const auto ys = sample_poisson_mixture(MixingLaw::beta_prime(1.0, 2.2), 1'000'000, rng);
    double mean = 0.0;
    for (const auto y : ys) mean += static_cast<double>(y);
    mean /= static_cast<double>(ys.size());
    double var = 0.0;
    for (const auto y : ys) {
        const double d = static_cast<double>(y) - mean;
        var += d * d;
    }
    var /= static_cast<double>(ys.size() - 1);
    const bool mean_ok = std::abs(mean - 0.833) <= 0.02;
    const bool var_ok = std::abs(var - 8.47) <= 0.3;
    detail("mean = %.4f (want 0.833+-0.02) %s, variance = %.3f (want 8.47+-0.3) %s", mean,
           mean_ok ? "ok" : "MISS", var, var_ok ? "ok" : "MISS");
    return mean_ok && var_ok;
}

// ---------------------------------------------------------------------------
// criterion 7: the property suites hold standalone

bool criterion_properties() {
    bool pass = true;

    // cdf/quantile round trips
    bool roundtrip = true;
    for (const double shape : {-0.5, -0.2, 0.0, 0.5, 1.0, 2.0}) {
        for (const double scale : {0.5, 1.0, 2.0}) {
            for (double p = 0.0; p < 0.999; p += 0.033) {
                const GpdParams params{shape, scale};
                roundtrip = roundtrip &&
                            std::abs(gpd_cdf(params, gpd_quantile(params, p)) - p) < 1e-10;
            }
        }
    }
    detail("cdf/quantile round trips exact to 1e-10: %s", roundtrip ? "ok" : "MISS");
    pass = pass && roundtrip;

    // classifier trace consistency across branches
    bool traces_ok = true;
    const MixingLaw laws[] = {MixingLaw::frechet(1.0, 1.0), MixingLaw::lognormal(1.0, 1.0),
                              MixingLaw::gamma(2.0, 1.0)};
    for (const auto& law : laws) {
        for (std::uint64_t rep = 0; rep < 4; ++rep) {
            Rng rng(derive_seed(1010, rep, static_cast<std::uint64_t>(law.family())));
            const auto ys = sample_poisson_mixture(law, 1000, rng);
            ClassifierConfig cc;
            cc.n_boot = 100;
            cc.seed = derive_seed(1011, rep);
            const auto [category, trace] = classify(ys, cc);
            switch (category.kind) {
                case CategoryKind::gumbel:
                    traces_ok = traces_ok && trace.mad_stage1->p_value >= cc.alpha &&
                                trace.deviance->p_value >= cc.alpha;
                    break;
                case CategoryKind::frechet:
                    traces_ok = traces_ok && trace.mad_stage1->p_value >= cc.alpha &&
                                trace.deviance->p_value < cc.alpha &&
                                trace.deviance->shape_hat > 0.0;
                    break;
                case CategoryKind::pseudo_gumbel:
                    traces_ok = traces_ok && trace.mad_stage1->p_value < cc.alpha &&
                                trace.mad_stage2->p_value >= cc.alpha;
                    break;
                case CategoryKind::unclassified:
                    break;
            }
        }
    }
    detail("classifier trace consistency: %s", traces_ok ? "ok" : "MISS");
    pass = pass && traces_ok;

    // schedule independence of the study harness
    StudyConfig config;
    config.scenarios = {Scenario{MixingLaw::gamma(2.0, 1.0), 500, 0.95},
                        Scenario{MixingLaw::frechet(1.0, 1.0), 500, 0.95}};
    config.replicates = 10;
    config.n_boot = 80;
    config.seed = 1012;
    config.workers = 1;
    const auto serial = run_study(config);
    const std::string serial_records = records_to_csv(config, serial);
    const std::string serial_summary = summary_to_csv(summarize(config, serial));
    config.workers = 4;
    const auto threaded = run_study(config);
    const bool schedule_ok = records_to_csv(config, threaded) == serial_records &&
                             summary_to_csv(summarize(config, threaded)) == serial_summary;
    detail("study harness byte-identical for 1 vs 4 workers: %s", schedule_ok ? "ok" : "MISS");
    pass = pass && schedule_ok;

    return pass;
}

struct Criterion {
    int number;
    const char* name;
    bool (*run)();
};

const Criterion criteria[] = {
    {1, "published six-scenario table, desk scale", criterion_table3},
    {2, "inverse-Gaussian rejection sweep", criterion_sweep},
    {3, "count tail-ratio limits", criterion_tail_ratio},
    {4, "GPD estimator quality", criterion_estimator},
    {5, "test level calibration", criterion_calibration},
    {6, "Poisson-beta2 moments", criterion_moments},
    {7, "property suites", criterion_properties},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.push_back(std::atoi(argv[i]));
    }
    int failures = 0;
    for (const auto& criterion : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), criterion.number) == selected.end()) {
            continue;
        }
        g_details.clear();
        const bool pass = criterion.run();
        std::printf("criterion %d (%s): %s\n", criterion.number, criterion.name,
                    pass ? "PASS" : "FAIL");
        for (const auto& line : g_details) {
            std::printf("    %s\n", line.c_str());
        }
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    return failures;
}
