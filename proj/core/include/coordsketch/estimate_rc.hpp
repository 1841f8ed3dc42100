#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "coordsketch/combine.hpp"
#include "coordsketch/predicate.hpp"

namespace coordsketch {

enum class EstimatorKind {
    union_sketch,
    scs,
    lcs,
    poisson_scs_like,
    poisson_lcs_like,
};

const char* to_string(EstimatorKind kind);

// Nonnegative per-key adjusted weights; keys outside the map implicitly carry
// zero. E[a(i)] = w(i) for every key of the sketched universe.
struct AdjustedWeightMap {
    EstimatorKind kind = EstimatorKind::union_sketch;
    // Parallel to the entries of the combination (or pooled sample) the map
    // was computed from.
    std::vector<std::pair<std::uint64_t, double>> items;
    std::unordered_map<std::uint64_t, double> index;

    double at(std::uint64_t key_id) const {
        auto it = index.find(key_id);
        return it == index.end() ? 0.0 : it->second;
    }

    double total() const {
        double sum = 0.0;
        for (const auto& [id, a] : items) sum += a;
        return sum;
    }
};

// Rank-conditioning adjusted weights: a(i) = w(i)/p(w(i), tau) with tau the
// union threshold, the SCS threshold, or the per-key LCS tau.
AdjustedWeightMap rc_adjusted_weights(const Combination& combination);

// Single-sketch RC weights (the union-sketch rule applied to one set).
AdjustedWeightMap rc_adjusted_weights(const BottomKSketch& sketch);

struct EstimateResult {
    double estimate = 0.0;
    CombinationKind kind = CombinationKind::scs;
    std::size_t combination_size = 0;
};

// The full query procedure: pick relevant sets, build the best applicable
// combination, compute RC weights, and sum them over entries satisfying the
// predicate.
EstimateResult estimate_weight(const std::map<SetId, BottomKSketch>& sketches,
                               const Predicate& pred);

// Same, with the combination kind forced. Throws std::invalid_argument when
// the forced kind cannot evaluate the predicate (lcs on a non-applicable
// formula).
EstimateResult estimate_weight_with(const std::map<SetId, BottomKSketch>& sketches,
                                    const Predicate& pred, CombinationKind kind);

// Makes a PredicateContext for one combination entry.
PredicateContext entry_context(const Combination& combination, std::size_t entry_idx);

// Unbiased estimate of sum h(i) over the subpopulation: sum of
// a(i) * h(i) / w(i) over satisfying entries. `weights` must be parallel to
// the combination (as produced by rc_adjusted_weights).
double estimate_function_sum(const Combination& combination, const AdjustedWeightMap& weights,
                             const Predicate& pred,
                             const std::function<double(const SketchEntry&)>& h);

struct PairAggregates {
    double union_weight = 0.0;
    double intersection_weight = 0.0;
    double hamming = 0.0;      // clamped at zero
    double hamming_raw = 0.0;  // unclamped, for unbiasedness checks
    bool hamming_clamped = false;
    std::optional<double> jaccard;  // empty when the union estimate is zero
};

// union via RC LCS, intersection via RC SCS, hamming as their difference,
// jaccard as the (biased) ratio.
PairAggregates derived_aggregates(const std::map<SetId, BottomKSketch>& sketches,
                                  const SetId& set_a, const SetId& set_b);

// w(A) + w(B) - LCS union estimate. Performs considerably worse than the SCS
// intersection route; kept as a comparison baseline.
double intersection_via_inclusion_exclusion(const std::map<SetId, BottomKSketch>& sketches,
                                            const SetId& set_a, const SetId& set_b,
                                            double weight_a, double weight_b);

}  // namespace coordsketch
