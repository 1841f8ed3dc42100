#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "coordsketch/dataset.hpp"
#include "coordsketch/rank.hpp"

namespace coordsketch {

// Estimator names understood by the runner:
//   rc_union, rc_scs, rc_lcs      rank-conditioning weights on the combination
//   poisson_scs, poisson_lcs      coordinated Poisson baselines (tau solved per
//                                 set for expected sample size k)
//   sel_union, sel_scs            uniform-weight selectivity (jaccard only)
//   ml_scs                        ws-rank ML on the SCS (weight aggregates)
//   ml_known                      two-set ML with known set weights
//   lcs_known                     known-weight LCS union estimator
//   rc_ratio, rc_comb             ratio / difference forms for jaccard and
//                                 hamming
//
// Aggregates: union, intersection, jaccard, hamming, predicate:<text>.
// Pairwise aggregates require exactly two sets in scope.
struct ExperimentConfig {
    DatasetSpec dataset;
    RankFamily family = RankFamily::pri;
    std::vector<int> ks;
    int repetitions = 1000;
    std::uint64_t seed = 42;
    std::vector<SetId> sets;  // empty = every set of the dataset
    std::vector<std::string> estimators;
    std::vector<std::string> aggregates;
    std::string output;
    int threads = 0;  // 0 = hardware concurrency

    static ExperimentConfig parse(std::istream& in);
    static ExperimentConfig parse_file(const std::string& path);
};

struct ResultRow {
    std::string dataset;
    std::string aggregate;
    std::string estimator;
    std::string family;
    int k = 0;
    int repetitions = 0;
    double truth = 0.0;
    double mean_estimate = 0.0;
    double est_se = 0.0;
    double mean_relative_error = 0.0;
    double rel_err_se = 0.0;
    double empirical_variance = 0.0;
    double mean_combination_size = 0.0;
    bool applicable = true;
};

// Deterministic given the config: repetition r uses rank seed (seed + r), and
// rows are canonically sorted. Repetitions may run on several threads.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

inline constexpr const char* kResultSchema = "# coordsketch.result.v1";
inline constexpr const char* kReportSchema = "# coordsketch.report.v1";

void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_result_csv(std::istream& in);

struct ReportRow {
    std::string dataset;
    std::string aggregate;
    std::string family;
    int k = 0;
    std::string estimator;
    double improvement_factor = 0.0;   // baseline mre / estimator mre
    double predicted_factor = 0.0;     // sqrt(l / l_baseline)
    double variance_ratio = 0.0;       // estimator variance / baseline variance
    std::string variance_ordering;     // baseline | ok | violated
};

// Improvement factors against the union-sketch baseline of each
// (dataset, aggregate, family, k) group. Throws when a group has no baseline.
std::vector<ReportRow> summarize(const std::vector<ResultRow>& rows);

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace coordsketch
