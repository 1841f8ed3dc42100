#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "coordsketch/combine.hpp"
#include "coordsketch/types.hpp"

namespace coordsketch {

// Stopping rules for weighted sampling with replacement from U:
//   wsr:  after k draws (k-mins analogue);
//   wsrd: at the (k+1)-st distinct key, which is excluded from the counts;
//   wsrc: at the (k+1)-st distinct member of some set of the collection,
//         excluded likewise (the SCS analogue).
enum class StopRule { wsr, wsrd, wsrc };

const char* to_string(StopRule rule);

struct ReplacementSample {
    StopRule rule = StopRule::wsr;
    int k = 0;
    // (key id, multiplicity, weight), sorted by key id
    struct Count {
        std::uint64_t key_id;
        std::uint64_t multiplicity;
        double weight;
    };
    std::vector<Count> counts;
    std::uint64_t total = 0;
    // Set when the stopping rule can never trigger (support exhausted before
    // a (k+1)-st distinct key exists).
    bool exhausted = false;
};

ReplacementSample draw_replacement_sample(std::span<const Key> ground, StopRule rule, int k,
                                          std::uint64_t seed);

// wsrc draws from the union of the given sets and stops on the first set to
// reach k+1 distinct sampled members.
ReplacementSample draw_replacement_sample_wsrc(const WeightedSetCollection& collection,
                                               std::span<const SetId> sets, int k,
                                               std::uint64_t seed);

// Adjusted selectivities: rho(i) >= 0, E[rho(i)] = w(i)/w(U), sum exactly 1.
struct AdjustedSelectivityMap {
    std::vector<std::pair<std::uint64_t, double>> items;
    std::unordered_map<std::uint64_t, double> index;

    double at(std::uint64_t key_id) const {
        auto it = index.find(key_id);
        return it == index.end() ? 0.0 : it->second;
    }

    double sum() const {
        double s = 0.0;
        for (const auto& [id, rho] : items) s += rho;
        return s;
    }
};

// rho1(i) = c(i,s)/c(U,s) under any of the three stopping rules.
AdjustedSelectivityMap rho1(const ReplacementSample& sample);

// rho(i) = 1/l for the l keys of an SCS of uniform-weight sets; also accepts
// a union-sketch combination, where l = k recovers the classic estimator.
// Rejects non-uniform entry weights (the estimator is biased there).
AdjustedSelectivityMap rho_scs_uniform(const Combination& combination);

struct JaccardBiasDemo {
    double naive_expectation = 0.0;  // expectation of the weighted-fraction estimator
    double true_resemblance = 0.0;
    double naive_count_expectation = 0.0;  // count-fraction variant
};

// The fixed two-set worked example showing that weight- and count-fraction
// estimators are biased on weighted keys. Computed in exact rational
// arithmetic.
JaccardBiasDemo jaccard_biased_demo();

struct Rho2Options {
    // Exact enumeration is used while the composition count stays within this
    // budget; beyond it, Monte Carlo over the multinomial.
    std::uint64_t enumeration_budget = 2'000'000;
    bool allow_monte_carlo = true;
    std::uint64_t monte_carlo_draws = 100'000;
    std::uint64_t monte_carlo_seed = 0x5eeded;
};

// Conditional-expectation estimators over the sample's equivalence class
// (distinct key set for wsr; distinct key set and total multiplicity for
// wsrd). Returns nullopt when enumeration exceeds the budget and Monte Carlo
// is disabled.
std::optional<AdjustedSelectivityMap> rho2(const ReplacementSample& sample,
                                           const Rho2Options& options = {});

}  // namespace coordsketch
