#include "povmix/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "povmix/gof.hpp"
#include "povmix/pot.hpp"

namespace povmix {

namespace {

std::string format_double(double v, const char* fmt = "%.10g") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

std::string category_cell(const Category& c) {
    std::string out = to_string(c.kind);
    if (c.kind == CategoryKind::unclassified) {
        out += ':';
        out += c.reason;
    }
    return out;
}

}  // namespace

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
    if (count == 0) {
        return;
    }
    workers = std::clamp<std::size_t>(workers, 1, count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::vector<StudyRecord> run_study(const StudyConfig& config) {
    if (config.scenarios.empty()) {
        throw std::invalid_argument("run_study: no scenarios");
    }
    if (config.replicates == 0) {
        throw std::invalid_argument("run_study: replicates must be >= 1");
    }

    const std::size_t total = config.scenarios.size() * config.replicates;
    std::vector<StudyRecord> records(total);

    parallel_for(total, config.workers, [&](std::size_t flat) {
        const std::size_t s = flat / config.replicates;
        const std::size_t r = flat % config.replicates;
        const Scenario& scenario = config.scenarios[s];

        StudyRecord& rec = records[flat];
        rec.scenario = s;
        rec.replicate = r;

        const auto t0 = std::chrono::steady_clock::now();
        try {
            Rng data_rng(derive_seed(config.seed, s, r, 0));
            const auto ys = sample_poisson_mixture(scenario.law, scenario.sample_size, data_rng);

            ClassifierConfig cc;
            cc.threshold_p = scenario.threshold_p;
            cc.alpha = config.alpha;
            cc.n_boot = config.n_boot;
            cc.min_excesses = config.min_excesses;
            cc.seed = derive_seed(config.seed, s, r, 1);

            const auto [category, trace] = classify(ys, cc);
            rec.n_excess = trace.n_excess;
            rec.gpd_rejected = trace.mad_stage1 && trace.mad_stage1->p_value < config.alpha;
            rec.category = category;
            if (trace.gpd_fit) {
                rec.shape_hat = trace.gpd_fit->params.shape;
            }
        } catch (const std::exception&) {
            rec.category = Category::unclassified(reason::replicate_error);
        }
        rec.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
    });

    return records;
}

std::vector<ScenarioSummary> summarize(const StudyConfig& config,
                                       std::span<const StudyRecord> records) {
    if (records.empty()) {
        throw std::invalid_argument("summarize: no records");
    }
    std::vector<ScenarioSummary> out(config.scenarios.size());
    std::vector<std::size_t> counts(config.scenarios.size(), 0);
    for (const auto& rec : records) {
        ScenarioSummary& s = out.at(rec.scenario);
        s.avg_excesses += static_cast<double>(rec.n_excess);
        s.gpd_rejection += rec.gpd_rejected ? 1.0 : 0.0;
        switch (rec.category.kind) {
            case CategoryKind::frechet: s.freq_frechet += 1.0; break;
            case CategoryKind::gumbel: s.freq_gumbel += 1.0; break;
            case CategoryKind::pseudo_gumbel: s.freq_pseudo += 1.0; break;
            case CategoryKind::unclassified: s.freq_unclassified += 1.0; break;
        }
        ++counts.at(rec.scenario);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        ScenarioSummary& s = out[i];
        s.mixing = config.scenarios[i].law.describe();
        s.replicates = counts[i];
        if (counts[i] == 0) {
            continue;
        }
        const double n = static_cast<double>(counts[i]);
        s.avg_excesses /= n;
        s.gpd_rejection /= n;
        s.freq_frechet /= n;
        s.freq_gumbel /= n;
        s.freq_pseudo /= n;
        s.freq_unclassified /= n;

        const double freqs[] = {s.freq_frechet, s.freq_gumbel, s.freq_pseudo,
                                s.freq_unclassified};
        const CategoryKind kinds[] = {CategoryKind::frechet, CategoryKind::gumbel,
                                      CategoryKind::pseudo_gumbel, CategoryKind::unclassified};
        std::size_t best = 0;
        for (std::size_t k = 1; k < 4; ++k) {
            if (freqs[k] > freqs[best]) {
                best = k;
            }
        }
        s.most_frequent = kinds[best];
        s.tie = false;
        for (std::size_t k = 0; k < 4; ++k) {
            if (k != best && freqs[k] == freqs[best]) {
                s.tie = true;
            }
        }
    }
    return out;
}

std::string records_to_csv(const StudyConfig& config, std::span<const StudyRecord> records) {
    std::string out = "scenario,replicate,n_excess,gpd_rejected,category,gamma_hat\n";
    for (const auto& rec : records) {
        out += config.scenarios.at(rec.scenario).law.describe();
        out += ',';
        out += std::to_string(rec.replicate);
        out += ',';
        out += std::to_string(rec.n_excess);
        out += ',';
        out += rec.gpd_rejected ? '1' : '0';
        out += ',';
        out += category_cell(rec.category);
        out += ',';
        if (!std::isnan(rec.shape_hat)) {
            out += format_double(rec.shape_hat);
        }
        out += '\n';
    }
    return out;
}

std::string summary_to_csv(std::span<const ScenarioSummary> summaries) {
    std::string out =
        "mixing,avg_excesses,gpd_rejection,freq_frechet,freq_gumbel,freq_pseudo,"
        "freq_unclassified,most_frequent\n";
    for (const auto& s : summaries) {
        out += s.mixing;
        out += ',';
        out += format_double(s.avg_excesses, "%.3f");
        out += ',';
        out += format_double(s.gpd_rejection, "%.4f");
        out += ',';
        out += format_double(s.freq_frechet, "%.4f");
        out += ',';
        out += format_double(s.freq_gumbel, "%.4f");
        out += ',';
        out += format_double(s.freq_pseudo, "%.4f");
        out += ',';
        out += format_double(s.freq_unclassified, "%.4f");
        out += ',';
        out += to_string(s.most_frequent);
        if (s.tie) {
            out += '*';
        }
        out += '\n';
    }
    return out;
}

std::vector<SweepPoint> figure3_sweep(const SweepConfig& config) {
    if (config.sigma_grid.empty()) {
        throw std::invalid_argument("figure3_sweep: empty sigma grid");
    }
    if (config.replicates == 0) {
        throw std::invalid_argument("figure3_sweep: replicates must be >= 1");
    }

    const std::size_t total = config.sigma_grid.size() * config.replicates;
    std::vector<unsigned char> rejected(total, 0);

    parallel_for(total, config.workers, [&](std::size_t flat) {
        const std::size_t s = flat / config.replicates;
        const std::size_t r = flat % config.replicates;
        const MixingLaw law = MixingLaw::inverse_gaussian(config.mean, config.sigma_grid[s]);
        try {
            Rng data_rng(derive_seed(config.seed, s, r, 0));
            const auto ys = sample_poisson_mixture(law, config.sample_size, data_rng);
            const double u = empirical_quantile(ys, config.threshold_p);
            const ExcessSample exc = excesses(ys, u, config.min_excesses);
            Rng test_rng(derive_seed(config.seed, s, r, 1));
            const auto gof = bootstrap_gof_test(
                exc.values,
                [&](std::span<const double> xs) {
                    return fit_gpd_mle(xs, std::nullopt, config.min_excesses);
                },
                [](const GpdFit& fit, std::size_t n, Rng& rng) {
                    return gpd_sample(fit.params, n, rng);
                },
                config.n_boot, test_rng);
            rejected[flat] = gof.p_value < config.alpha ? 1 : 0;
        } catch (const std::exception&) {
            rejected[flat] = 0;  // failed replicates count as not rejected
        }
    });

    std::vector<SweepPoint> out(config.sigma_grid.size());
    for (std::size_t s = 0; s < out.size(); ++s) {
        out[s].sigma = config.sigma_grid[s];
        std::size_t n_rej = 0;
        for (std::size_t r = 0; r < config.replicates; ++r) {
            n_rej += rejected[s * config.replicates + r];
        }
        out[s].rejection = static_cast<double>(n_rej) / static_cast<double>(config.replicates);
        out[s].limit_tail_ratio =
            *tail_ratio_limit(MixingLaw::inverse_gaussian(config.mean, config.sigma_grid[s]), 1);
    }
    return out;
}

std::string sweep_to_csv(std::span<const SweepPoint> points) {
    std::string out = "sigma,rejection,tail_ratio_limit\n";
    for (const auto& p : points) {
        out += format_double(p.sigma, "%.6g");
        out += ',';
        out += format_double(p.rejection, "%.4f");
        out += ',';
        out += format_double(p.limit_tail_ratio, "%.6f");
        out += '\n';
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': bad numeric value '" + value + "'");
    }
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
    const double v = parse_number(key, value);
    if (v < 0.0 || v != std::floor(v)) {
        throw ConfigError("config key '" + key + "': expected a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
}

struct ScenarioSpec {
    std::string law;
    std::optional<std::size_t> n;
    std::optional<double> p;
};

ScenarioSpec parse_scenario_value(const std::string& value) {
    ScenarioSpec spec;
    std::istringstream in(value);
    std::string tok;
    bool first = true;
    while (in >> tok) {
        if (first) {
            spec.law = tok;
            first = false;
        } else if (tok.rfind("n=", 0) == 0) {
            spec.n = static_cast<std::size_t>(parse_unsigned("scenario n", tok.substr(2)));
        } else if (tok.rfind("p=", 0) == 0) {
            spec.p = parse_number("scenario p", tok.substr(2));
        } else {
            throw ConfigError("config key 'scenario': unexpected token '" + tok + "'");
        }
    }
    if (spec.law.empty()) {
        throw ConfigError("config key 'scenario': missing law spec");
    }
    return spec;
}

}  // namespace

StudyConfig parse_study_config(std::istream& in) {
    StudyConfig config;
    bool have_replicates = false;
    std::size_t default_n = 1000;
    double default_p = 0.95;
    std::vector<ScenarioSpec> scenario_specs;

    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line is not key = value: '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line is not key = value: '" + line + "'");
        }

        if (key == "replicates") {
            config.replicates = static_cast<std::size_t>(parse_unsigned(key, value));
            have_replicates = true;
        } else if (key == "boot") {
            config.n_boot = static_cast<std::size_t>(parse_unsigned(key, value));
        } else if (key == "alpha") {
            config.alpha = parse_number(key, value);
        } else if (key == "min_excesses") {
            config.min_excesses = static_cast<std::size_t>(parse_unsigned(key, value));
        } else if (key == "seed") {
            config.seed = parse_unsigned(key, value);
        } else if (key == "n") {
            default_n = static_cast<std::size_t>(parse_unsigned(key, value));
        } else if (key == "threshold_p") {
            default_p = parse_number(key, value);
        } else if (key == "scenario") {
            scenario_specs.push_back(parse_scenario_value(value));
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    if (!have_replicates) {
        throw ConfigError("missing required config key 'replicates'");
    }
    if (scenario_specs.empty()) {
        throw ConfigError("missing required config key 'scenario'");
    }
    for (const auto& spec : scenario_specs) {
        MixingLaw law = [&] {
            try {
                return parse_law(spec.law);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("config key 'scenario': ") + e.what());
            }
        }();
        config.scenarios.push_back(
            Scenario{law, spec.n.value_or(default_n), spec.p.value_or(default_p)});
    }
    return config;
}

}  // namespace povmix
