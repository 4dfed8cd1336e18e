// povmix: classify overdispersed count data into Poisson-mixture tail
// categories, simulate mixtures, and run the Monte Carlo study harness.
//
// Exit codes: 0 success, 2 usage or input error, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "povmix/classifier.hpp"
#include "povmix/counts_io.hpp"
#include "povmix/distributions.hpp"
#include "povmix/pot.hpp"
#include "povmix/study.hpp"

namespace {

namespace fs = std::filesystem;
using namespace povmix;

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_numerical = 3;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) {
        return *seed;
    }
    std::random_device rd;
    const std::uint64_t drawn =
        (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
    std::cerr << "seed: " << drawn << "\n";
    return drawn;
}

std::size_t resolve_workers(std::size_t requested) {
    std::size_t workers = requested != 0 ? requested
                                         : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("POVMIX_THREADS")) {
        std::size_t cap = 0;
        try {
            cap = std::stoul(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("POVMIX_THREADS: bad value '" + std::string(env) + "'");
        }
        if (cap >= 1) {
            workers = std::min(workers, cap);
        }
    }
    return workers;
}

void refuse_overwrite(const fs::path& path, bool force) {
    if (!force && fs::exists(path)) {
        throw std::invalid_argument(path.string() + " exists; pass --force to overwrite");
    }
}

void write_text_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(path.string() + ": cannot open for writing");
    }
    out << contents;
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    char sep1 = 0;
    char sep2 = 0;
    std::istringstream in(spec);
    if (!(in >> lo >> sep1 >> hi >> sep2 >> step) || sep1 != ':' || sep2 != ':' ||
        !(step > 0.0) || hi < lo || !in.eof()) {
        throw std::invalid_argument("--grid expects LO:HI:STEP with STEP > 0: '" + spec + "'");
    }
    std::vector<double> grid;
    for (double u = lo; u <= hi + 1e-9 * step; u += step) {
        grid.push_back(u);
    }
    return grid;
}

std::string optional_cell(const std::optional<double>& v) {
    if (!v) {
        return "-";
    }
    std::ostringstream out;
    out << *v;
    return out.str();
}

std::string trace_to_text(const DecisionTrace& trace) {
    std::ostringstream out;
    const auto line = [&](const char* key, const std::string& value) {
        out << key;
        for (std::size_t i = std::string(key).size(); i < 12; ++i) out << ' ';
        out << ": " << value << '\n';
    };
    std::string category = to_string(trace.category.kind);
    if (trace.category.kind == CategoryKind::unclassified) {
        category += " (" + trace.category.reason + ")";
    }
    line("category", category);
    line("branch", to_string(trace.branch));
    line("u", optional_cell(trace.threshold));
    line("n_excess", std::to_string(trace.n_excess));
    line("gamma_hat",
         optional_cell(trace.gpd_fit ? std::optional(trace.gpd_fit->params.shape) : std::nullopt));
    line("sigma_hat",
         optional_cell(trace.gpd_fit ? std::optional(trace.gpd_fit->params.scale) : std::nullopt));
    line("mad1_p", optional_cell(trace.mad_stage1 ? std::optional(trace.mad_stage1->p_value)
                                                  : std::nullopt));
    line("dev_p",
         optional_cell(trace.deviance ? std::optional(trace.deviance->p_value) : std::nullopt));
    line("mad2_p", optional_cell(trace.mad_stage2 ? std::optional(trace.mad_stage2->p_value)
                                                  : std::nullopt));
    return out.str();
}

struct ClassifyArgs {
    std::string input;
    double quantile = 0.95;
    double alpha = 0.05;
    std::size_t boot = 250;
    std::optional<std::uint64_t> seed;
    bool json = false;
};

int cmd_classify(const ClassifyArgs& args) {
    const auto ys = read_counts_file(args.input);
    ClassifierConfig config;
    config.threshold_p = args.quantile;
    config.alpha = args.alpha;
    config.n_boot = args.boot;
    config.seed = resolve_seed(args.seed);
    const auto [category, trace] = classify(ys, config);
    if (args.json) {
        std::cout << trace_to_json(trace).dump(2) << '\n';
    } else {
        std::cout << trace_to_text(trace);
    }
    return exit_ok;
}

struct SimulateArgs {
    std::string law;
    std::string params;
    std::size_t n = 1000;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_simulate(const SimulateArgs& args) {
    std::vector<double> params;
    if (!args.params.empty()) {
        std::istringstream in(args.params);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            try {
                std::size_t used = 0;
                params.push_back(std::stod(tok, &used));
                if (used != tok.size()) {
                    throw std::invalid_argument(tok);
                }
            } catch (const std::exception&) {
                throw std::invalid_argument("--params: bad number '" + tok + "'");
            }
        }
    }
    const MixingLaw law = make_law(args.law, params);
    const std::uint64_t seed = resolve_seed(args.seed);
    Rng rng(seed);
    const auto ys = sample_poisson_mixture(law, args.n, rng);
    write_counts_file(args.out, ys);

    double mean = 0.0;
    for (const auto y : ys) mean += static_cast<double>(y);
    mean /= static_cast<double>(ys.size());
    double var = 0.0;
    for (const auto y : ys) {
        const double d = static_cast<double>(y) - mean;
        var += d * d;
    }
    var /= ys.size() > 1 ? static_cast<double>(ys.size() - 1) : 1.0;
    std::cerr << "law=" << law.describe() << " seed=" << seed << " n=" << ys.size()
              << " mean=" << mean << " variance=" << var << '\n';
    return exit_ok;
}

struct StudyArgs {
    std::string config_path;
    std::string out_dir;
    bool paper = false;
    bool force = false;
    std::size_t threads = 0;
    std::optional<std::uint64_t> seed;
};

int cmd_study(const StudyArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) {
        throw std::invalid_argument(args.config_path + ": cannot open for reading");
    }
    StudyConfig config = parse_study_config(in);
    if (args.paper) {
        config.replicates = 1000;  // full-scale profile
    }
    if (args.seed) {
        config.seed = *args.seed;
    }
    config.workers = resolve_workers(args.threads);

    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    const fs::path records_path = dir / "records.csv";
    const fs::path summary_path = dir / "summary.csv";
    refuse_overwrite(records_path, args.force);
    refuse_overwrite(summary_path, args.force);

    const auto records = run_study(config);
    const auto summaries = summarize(config, records);
    write_text_file(records_path, records_to_csv(config, records));
    write_text_file(summary_path, summary_to_csv(summaries));
    std::cout << summary_to_csv(summaries);
    std::cerr << "wrote " << records_path.string() << " and " << summary_path.string() << '\n';
    return exit_ok;
}

struct MrlArgs {
    std::string input;
    std::string grid;
    std::string out;
    bool force = false;
};

int cmd_mrl(const MrlArgs& args) {
    const auto ys = read_counts_file(args.input);
    const auto grid = parse_grid(args.grid);
    refuse_overwrite(args.out, args.force);
    const auto rows = mean_residual_life(ys, grid);
    write_text_file(args.out, mrl_to_csv(rows));
    return exit_ok;
}

struct SweepArgs {
    std::string out;
    double mean = 2.0;
    std::vector<double> sigma_grid = {0.1, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::size_t n = 2000;
    double quantile = 0.975;
    std::size_t replicates = 500;
    double alpha = 0.05;
    std::size_t boot = 250;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;
    bool force = false;
};

int cmd_sweep(const SweepArgs& args) {
    SweepConfig config;
    config.mean = args.mean;
    config.sigma_grid = args.sigma_grid;
    config.sample_size = args.n;
    config.threshold_p = args.quantile;
    config.replicates = args.replicates;
    config.alpha = args.alpha;
    config.n_boot = args.boot;
    config.seed = resolve_seed(args.seed);
    config.workers = resolve_workers(args.threads);
    refuse_overwrite(args.out, args.force);
    const auto points = figure3_sweep(config);
    write_text_file(args.out, sweep_to_csv(points));
    std::cout << sweep_to_csv(points);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson-mixture tail classification via peaks over threshold"};
    app.require_subcommand(1);

    ClassifyArgs classify_args;
    auto* classify_cmd =
        app.add_subcommand("classify", "Classify a counts file into a tail category");
    classify_cmd->add_option("--input", classify_args.input, "counts file, one integer per line")
        ->required();
    classify_cmd->add_option("--quantile", classify_args.quantile, "threshold quantile");
    classify_cmd->add_option("--alpha", classify_args.alpha, "test level");
    classify_cmd->add_option("--boot", classify_args.boot, "bootstrap iterations");
    classify_cmd->add_option("--seed", classify_args.seed, "generator seed");
    auto* json_flag = classify_cmd->add_flag("--json", classify_args.json, "machine-readable report");
    classify_cmd->add_flag("--text", "plain-text report (default)")->excludes(json_flag);

    SimulateArgs simulate_args;
    auto* simulate_cmd = app.add_subcommand("simulate", "Write a simulated Poisson-mixture counts file");
    simulate_cmd->add_option("--law", simulate_args.law, "mixing law name")->required();
    simulate_cmd->add_option("--params", simulate_args.params, "comma-separated law parameters")
        ->required();
    simulate_cmd->add_option("--n", simulate_args.n, "sample size")->required();
    simulate_cmd->add_option("--seed", simulate_args.seed, "generator seed");
    simulate_cmd->add_option("--out", simulate_args.out, "output counts file")->required();

    StudyArgs study_args;
    auto* study_cmd = app.add_subcommand("study", "Run a Monte Carlo classification study");
    study_cmd->add_option("--config", study_args.config_path, "key-value study config")->required();
    study_cmd->add_option("--out", study_args.out_dir, "output directory")->required();
    study_cmd->add_flag("--paper", study_args.paper, "full-scale profile (1000 replicates)");
    study_cmd->add_flag("--force", study_args.force, "overwrite existing outputs");
    study_cmd->add_option("--threads", study_args.threads, "worker threads (0 = auto)");
    study_cmd->add_option("--seed", study_args.seed, "override the config seed");

    MrlArgs mrl_args;
    auto* mrl_cmd = app.add_subcommand("mrl", "Mean-residual-life table for threshold diagnostics");
    mrl_cmd->add_option("--input", mrl_args.input, "counts file")->required();
    mrl_cmd->add_option("--grid", mrl_args.grid, "thresholds LO:HI:STEP")->required();
    mrl_cmd->add_option("--out", mrl_args.out, "output CSV")->required();
    mrl_cmd->add_flag("--force", mrl_args.force, "overwrite existing outputs");

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Inverse-Gaussian shape sweep of the stage-1 GPD rejection rate");
    sweep_cmd->add_option("--out", sweep_args.out, "output CSV")->required();
    sweep_cmd->add_option("--mean", sweep_args.mean, "inverse-Gaussian mean");
    sweep_cmd->add_option("--sigma", sweep_args.sigma_grid, "inverse-Gaussian shape grid");
    sweep_cmd->add_option("--n", sweep_args.n, "sample size per replicate");
    sweep_cmd->add_option("--quantile", sweep_args.quantile, "threshold quantile");
    sweep_cmd->add_option("--replicates", sweep_args.replicates, "replicates per grid point");
    sweep_cmd->add_option("--alpha", sweep_args.alpha, "test level");
    sweep_cmd->add_option("--boot", sweep_args.boot, "bootstrap iterations");
    sweep_cmd->add_option("--seed", sweep_args.seed, "generator seed");
    sweep_cmd->add_option("--threads", sweep_args.threads, "worker threads (0 = auto)");
    sweep_cmd->add_flag("--force", sweep_args.force, "overwrite existing outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*classify_cmd) return cmd_classify(classify_args);
        if (*simulate_cmd) return cmd_simulate(simulate_args);
        if (*study_cmd) return cmd_study(study_args);
        if (*mrl_cmd) return cmd_mrl(mrl_args);
        if (*sweep_cmd) return cmd_sweep(sweep_args);
        std::cerr << "no subcommand selected\n";
        return exit_usage;
    } catch (const CountsParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const FitError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
}
