#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "povmix/study.hpp"

using namespace povmix;

namespace {

StudyConfig small_config() {
    StudyConfig config;
    config.scenarios.push_back(Scenario{MixingLaw::gamma(2.0, 1.0), 400, 0.95});
    config.scenarios.push_back(Scenario{MixingLaw::frechet(1.0, 1.0), 400, 0.95});
    config.replicates = 8;
    config.n_boot = 60;
    config.seed = 515;
    return config;
}

}  // namespace

TEST_CASE("run_study is deterministic") {
    StudyConfig config = small_config();
    config.replicates = 1;
    const auto a = run_study(config);
    const auto b = run_study(config);
    REQUIRE(a.size() == b.size());
    CHECK(records_to_csv(config, a) == records_to_csv(config, b));
}

TEST_CASE("run_study is schedule independent") {
    StudyConfig config = small_config();
    config.workers = 1;
    const auto serial = run_study(config);
    config.workers = 4;
    const auto parallel = run_study(config);
    CHECK(records_to_csv(config, serial) == records_to_csv(config, parallel));
    CHECK(summary_to_csv(summarize(config, serial)) ==
          summary_to_csv(summarize(config, parallel)));
}

TEST_CASE("records are keyed by scenario and replicate") {
    const StudyConfig config = small_config();
    const auto records = run_study(config);
    REQUIRE(records.size() == config.scenarios.size() * config.replicates);
    for (std::size_t s = 0; s < config.scenarios.size(); ++s) {
        for (std::size_t r = 0; r < config.replicates; ++r) {
            const auto& rec = records[s * config.replicates + r];
            CHECK(rec.scenario == s);
            CHECK(rec.replicate == r);
        }
    }
}

TEST_CASE("replicate failures are recorded, not thrown") {
    StudyConfig config;
    // intensity ~1e-6, so every draw is zero and the sample is degenerate
    config.scenarios.push_back(Scenario{MixingLaw::exponential(1e6), 100, 0.95});
    config.replicates = 3;
    config.n_boot = 20;
    config.seed = 3;
    const auto records = run_study(config);
    REQUIRE(records.size() == 3);
    for (const auto& rec : records) {
        CHECK(rec.category.kind == CategoryKind::unclassified);
        CHECK(rec.category.reason == reason::replicate_error);
    }
    const auto summaries = summarize(config, records);
    CHECK(summaries[0].freq_unclassified == doctest::Approx(1.0));
}

TEST_CASE("summarize") {
    StudyConfig config;
    config.scenarios.push_back(Scenario{MixingLaw::gamma(2.0, 1.0), 100, 0.95});
    config.replicates = 4;

    SUBCASE("hand-built frequencies") {
        std::vector<StudyRecord> records(4);
        for (std::size_t r = 0; r < 4; ++r) {
            records[r].scenario = 0;
            records[r].replicate = r;
            records[r].n_excess = 10 + r;
        }
        records[0].category = Category::gumbel();
        records[1].category = Category::gumbel();
        records[2].category = Category::frechet();
        records[3].category = Category::unclassified(reason::too_few_excesses);
        const auto summaries = summarize(config, records);
        REQUIRE(summaries.size() == 1);
        CHECK(summaries[0].freq_gumbel == doctest::Approx(0.5));
        CHECK(summaries[0].freq_frechet == doctest::Approx(0.25));
        CHECK(summaries[0].freq_unclassified == doctest::Approx(0.25));
        CHECK(summaries[0].freq_pseudo == doctest::Approx(0.0));
        CHECK(summaries[0].most_frequent == CategoryKind::gumbel);
        CHECK(!summaries[0].tie);
        CHECK(summaries[0].avg_excesses == doctest::Approx(11.5));
        CHECK(summaries[0].mixing == "gamma(2,1)");
    }
    SUBCASE("all one category") {
        std::vector<StudyRecord> records(4);
        for (std::size_t r = 0; r < 4; ++r) {
            records[r].scenario = 0;
            records[r].replicate = r;
            records[r].category = Category::frechet();
        }
        const auto summaries = summarize(config, records);
        CHECK(summaries[0].freq_frechet == doctest::Approx(1.0));
        CHECK(summaries[0].most_frequent == CategoryKind::frechet);
    }
    SUBCASE("ties break toward the fixed category order and are flagged") {
        std::vector<StudyRecord> records(4);
        for (std::size_t r = 0; r < 4; ++r) {
            records[r].scenario = 0;
            records[r].replicate = r;
        }
        records[0].category = Category::gumbel();
        records[1].category = Category::gumbel();
        records[2].category = Category::frechet();
        records[3].category = Category::frechet();
        const auto summaries = summarize(config, records);
        CHECK(summaries[0].most_frequent == CategoryKind::frechet);
        CHECK(summaries[0].tie);
        const std::string csv = summary_to_csv(summaries);
        CHECK(csv.find("frechet*") != std::string::npos);
    }
}

TEST_CASE("category frequencies sum to one") {
    const StudyConfig config = small_config();
    const auto records = run_study(config);
    for (const auto& s : summarize(config, records)) {
        CHECK(s.freq_frechet + s.freq_gumbel + s.freq_pseudo + s.freq_unclassified ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("records csv excludes runtime and includes trace fields") {
    StudyConfig config = small_config();
    config.replicates = 2;
    const auto records = run_study(config);
    const std::string csv = records_to_csv(config, records);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "scenario,replicate,n_excess,gpd_rejected,category,gamma_hat");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == records.size());
}

TEST_CASE("figure3_sweep") {
    SUBCASE("single point, single replicate") {
        SweepConfig config;
        config.sigma_grid = {1.0};
        config.replicates = 1;
        config.sample_size = 2000;
        config.n_boot = 60;
        config.seed = 11;
        const auto points = figure3_sweep(config);
        REQUIRE(points.size() == 1);
        CHECK((points[0].rejection == 0.0 || points[0].rejection == 1.0));
        CHECK(points[0].limit_tail_ratio == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
        const std::string csv = sweep_to_csv(points);
        CHECK(csv.rfind("sigma,rejection,tail_ratio_limit\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    }
    SUBCASE("rejection grows with the shape parameter") {
        SweepConfig config;
        config.sigma_grid = {0.5, 8.0};
        config.replicates = 30;
        config.sample_size = 1000;
        config.threshold_p = 0.95;
        config.n_boot = 100;
        config.seed = 12;
        config.workers = 4;
        const auto points = figure3_sweep(config);
        REQUIRE(points.size() == 2);
        CHECK(points[1].rejection > points[0].rejection);
        CHECK(points[1].limit_tail_ratio < points[0].limit_tail_ratio);
    }
}

TEST_CASE("parse_study_config") {
    SUBCASE("full file with per-scenario overrides") {
        std::istringstream in(
            "# table layout\n"
            "replicates = 12\n"
            "boot = 99\n"
            "alpha = 0.1\n"
            "min_excesses = 8\n"
            "seed = 42\n"
            "n = 500\n"
            "threshold_p = 0.9\n"
            "scenario = gamma(2,1)\n"
            "scenario = frechet(1,1) n=800 p=0.975\n");
        const StudyConfig config = parse_study_config(in);
        CHECK(config.replicates == 12);
        CHECK(config.n_boot == 99);
        CHECK(config.alpha == doctest::Approx(0.1));
        CHECK(config.min_excesses == 8);
        CHECK(config.seed == 42);
        REQUIRE(config.scenarios.size() == 2);
        CHECK(config.scenarios[0].law.describe() == "gamma(2,1)");
        CHECK(config.scenarios[0].sample_size == 500);
        CHECK(config.scenarios[0].threshold_p == doctest::Approx(0.9));
        CHECK(config.scenarios[1].sample_size == 800);
        CHECK(config.scenarios[1].threshold_p == doctest::Approx(0.975));
    }
    SUBCASE("missing replicates is named") {
        std::istringstream in("scenario = gamma(2,1)\n");
        try {
            parse_study_config(in);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("replicates") != std::string::npos);
        }
    }
    SUBCASE("missing scenarios is an error") {
        std::istringstream in("replicates = 5\n");
        CHECK_THROWS_AS(parse_study_config(in), ConfigError);
    }
    SUBCASE("unknown keys and bad values are rejected") {
        std::istringstream bad_key("replicates = 5\nbogus = 1\nscenario = gamma(2,1)\n");
        CHECK_THROWS_AS(parse_study_config(bad_key), ConfigError);
        std::istringstream bad_value("replicates = five\nscenario = gamma(2,1)\n");
        CHECK_THROWS_AS(parse_study_config(bad_value), ConfigError);
        std::istringstream bad_law("replicates = 5\nscenario = gamma(2)\n");
        CHECK_THROWS_AS(parse_study_config(bad_law), ConfigError);
    }
}
