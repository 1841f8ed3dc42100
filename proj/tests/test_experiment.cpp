#include <doctest.h>

#include <sstream>

#include "coordsketch/experiment.hpp"

using namespace coordsketch;

namespace {

ExperimentConfig tiny_config() {
    std::stringstream in(
        "dataset = pair(400,80)\n"
        "family = pri\n"
        "k = 16\n"
        "repetitions = 50\n"
        "seed = 7\n"
        "estimators = rc_union,rc_scs,rc_lcs\n"
        "aggregates = union,intersection\n"
        "threads = 2\n");
    return ExperimentConfig::parse(in);
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = tiny_config();
    CHECK(cfg.dataset.generator == "pair");
    CHECK(cfg.dataset.params == std::vector<double>{400, 80});
    CHECK(cfg.family == RankFamily::pri);
    CHECK(cfg.ks == std::vector<int>{16});
    CHECK(cfg.repetitions == 50);
    CHECK(cfg.estimators.size() == 3);

    SUBCASE("missing keys rejected") {
        std::stringstream in("dataset = pair(10,2)\nk = 4\nestimators = rc_union\n");
        CHECK_THROWS_AS(ExperimentConfig::parse(in), std::invalid_argument);
    }
    SUBCASE("unknown keys rejected") {
        std::stringstream in("dataset = pair(10,2)\nbogus = 3\n");
        CHECK_THROWS_AS(ExperimentConfig::parse(in), std::invalid_argument);
    }
}

TEST_CASE("runner marks inapplicable estimator/aggregate pairs") {
    const auto rows = run_experiment(tiny_config());

    // 3 estimators x 2 aggregates
    CHECK(rows.size() == 6);
    for (const ResultRow& row : rows) {
        if (row.estimator == "rc_lcs" && row.aggregate == "intersection") {
            CHECK(!row.applicable);
        } else {
            CHECK(row.applicable);
            CHECK(row.mean_estimate > 0.0);
            CHECK(row.mean_combination_size >= 16.0);
        }
        if (row.aggregate == "union") CHECK(row.truth == 720.0);
        if (row.aggregate == "intersection") CHECK(row.truth == 80.0);
    }
}

TEST_CASE("identical configs give byte-identical csv") {
    const auto cfg = tiny_config();
    std::stringstream a, b;
    write_result_csv(a, run_experiment(cfg));
    write_result_csv(b, run_experiment(cfg));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind(kResultSchema, 0) == 0);

    SUBCASE("thread count never changes the artifact") {
        auto serial = cfg;
        serial.threads = 1;
        std::stringstream c;
        write_result_csv(c, run_experiment(serial));
        CHECK(c.str() == a.str());
    }
}

TEST_CASE("result csv round trip") {
    const auto rows = run_experiment(tiny_config());
    std::stringstream buffer;
    write_result_csv(buffer, rows);
    const auto back = read_result_csv(buffer);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].dataset == rows[i].dataset);
        CHECK(back[i].estimator == rows[i].estimator);
        CHECK(back[i].mean_estimate == rows[i].mean_estimate);  // hex floats
        CHECK(back[i].empirical_variance == rows[i].empirical_variance);
        CHECK(back[i].applicable == rows[i].applicable);
    }

    std::stringstream bad("not a schema line\n");
    CHECK_THROWS_AS(read_result_csv(bad), std::invalid_argument);
}

TEST_CASE("summarize computes improvement factors against the baseline") {
    ResultRow base;
    base.dataset = "d";
    base.aggregate = "union";
    base.estimator = "rc_union";
    base.family = "pri";
    base.k = 64;
    base.mean_relative_error = 0.10;
    base.empirical_variance = 4.0;
    base.mean_combination_size = 64.0;

    ResultRow better = base;
    better.estimator = "rc_lcs";
    better.mean_relative_error = 0.05;
    better.empirical_variance = 1.0;
    better.mean_combination_size = 256.0;  // l = 4k -> predicted factor 2

    const auto report = summarize({base, better});
    REQUIRE(report.size() == 2);
    for (const ReportRow& row : report) {
        if (row.estimator == "rc_union") {
            CHECK(row.improvement_factor == 1.0);
            CHECK(row.variance_ordering == "baseline");
        } else {
            CHECK(row.improvement_factor == doctest::Approx(2.0));
            CHECK(row.predicted_factor == doctest::Approx(2.0));
            CHECK(row.variance_ratio == doctest::Approx(0.25));
            CHECK(row.variance_ordering == "ok");
        }
    }

    SUBCASE("missing baseline rejected") {
        CHECK_THROWS_AS(summarize({better}), std::invalid_argument);
    }
}

TEST_CASE("predicate aggregates run through the full pipeline") {
    std::stringstream in(
        "dataset = pair(300,60)\n"
        "family = pri\n"
        "k = 12\n"
        "repetitions = 30\n"
        "seed = 3\n"
        "estimators = rc_union,rc_scs,rc_lcs,poisson_scs\n"
        "aggregates = predicate:in(A1) | in(A2),predicate:in(A1) & attr(label) >= 5\n");
    const auto cfg = ExperimentConfig::parse(in);
    REQUIRE(cfg.aggregates.size() == 2);
    const auto rows = run_experiment(cfg);

    for (const ResultRow& row : rows) {
        if (row.aggregate == "predicate:in(A1) | in(A2)") {
            CHECK(row.applicable);  // pure union shape: everything applies
            CHECK(row.truth == 540.0);
        } else {
            // attr-filtered: poisson cannot evaluate attribute leaves
            if (row.estimator == "poisson_scs") {
                CHECK(!row.applicable);
            } else if (row.estimator == "rc_lcs") {
                CHECK(row.applicable);  // in(A1) & attr(...) is lcs-shaped
            }
        }
    }
}
