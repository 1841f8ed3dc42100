#include "coordsketch/estimate_rc.hpp"

#include <cmath>
#include <stdexcept>

#include "coordsketch/rank.hpp"

namespace coordsketch {

const char* to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::union_sketch: return "union";
        case EstimatorKind::scs: return "scs";
        case EstimatorKind::lcs: return "lcs";
        case EstimatorKind::poisson_scs_like: return "poisson_scs_like";
        case EstimatorKind::poisson_lcs_like: return "poisson_lcs_like";
    }
    return "?";
}

namespace {

EstimatorKind estimator_kind_of(CombinationKind kind) {
    switch (kind) {
        case CombinationKind::union_sketch: return EstimatorKind::union_sketch;
        case CombinationKind::scs: return EstimatorKind::scs;
        case CombinationKind::lcs: return EstimatorKind::lcs;
    }
    return EstimatorKind::union_sketch;
}

}  // namespace

AdjustedWeightMap rc_adjusted_weights(const Combination& combination) {
    AdjustedWeightMap map;
    map.kind = estimator_kind_of(combination.kind);
    map.items.reserve(combination.size());
    for (std::size_t i = 0; i < combination.size(); ++i) {
        const SketchEntry& entry = combination.entries[i];
        const double tau = combination.tau_of(i);
        const double p = inclusion_prob(combination.family, entry.weight, tau);
        if (!(p > 0.0)) throw std::logic_error("zero inclusion probability for a sampled key");
        map.items.emplace_back(entry.key_id, entry.weight / p);
    }
    map.index.reserve(map.items.size());
    for (const auto& [id, a] : map.items) map.index.emplace(id, a);
    return map;
}

AdjustedWeightMap rc_adjusted_weights(const BottomKSketch& sketch) {
    AdjustedWeightMap map;
    map.kind = EstimatorKind::union_sketch;
    map.items.reserve(sketch.entries.size());
    for (const SketchEntry& entry : sketch.entries) {
        const double p = inclusion_prob(sketch.family, entry.weight, sketch.threshold);
        if (!(p > 0.0)) throw std::logic_error("zero inclusion probability for a sampled key");
        map.items.emplace_back(entry.key_id, entry.weight / p);
    }
    map.index.reserve(map.items.size());
    for (const auto& [id, a] : map.items) map.index.emplace(id, a);
    return map;
}

PredicateContext entry_context(const Combination& combination, std::size_t entry_idx) {
    const SketchEntry& entry = combination.entries[entry_idx];
    PredicateContext ctx;
    ctx.key_id = entry.key_id;
    ctx.weight = entry.weight;
    ctx.attrs = &entry.attrs;
    ctx.membership = [&combination, entry_idx](const SetId& set_id) {
        return combination.membership_at(entry_idx, combination.source_index(set_id));
    };
    return ctx;
}

EstimateResult estimate_weight_with(const std::map<SetId, BottomKSketch>& sketches,
                                    const Predicate& pred, CombinationKind kind) {
    const PredicateAnalysis analysis = analyze_predicate(pred);
    if (kind == CombinationKind::lcs && analysis.best != CombinationKind::lcs) {
        throw std::invalid_argument("lcs combination not applicable to this predicate");
    }
    for (const SetId& id : analysis.relevant_sets) {
        if (!sketches.contains(id)) throw std::invalid_argument("no sketch for set " + id);
    }
    const Combination combo = build_combination(kind, sketches, analysis.relevant_sets);
    const AdjustedWeightMap weights = rc_adjusted_weights(combo);

    EstimateResult result;
    result.kind = kind;
    result.combination_size = combo.size();
    for (std::size_t i = 0; i < combo.size(); ++i) {
        const Tri v = pred.eval(entry_context(combo, i));
        if (v == Tri::u) {
            // cannot happen when the combination choice is sound
            throw std::logic_error("unknown membership reached during estimation");
        }
        if (v == Tri::t) result.estimate += weights.items[i].second;
    }
    return result;
}

EstimateResult estimate_weight(const std::map<SetId, BottomKSketch>& sketches,
                               const Predicate& pred) {
    return estimate_weight_with(sketches, pred, analyze_predicate(pred).best);
}

double estimate_function_sum(const Combination& combination, const AdjustedWeightMap& weights,
                             const Predicate& pred,
                             const std::function<double(const SketchEntry&)>& h) {
    if (weights.items.size() != combination.size()) {
        throw std::invalid_argument("adjusted weights not parallel to combination");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < combination.size(); ++i) {
        const Tri v = pred.eval(entry_context(combination, i));
        if (v == Tri::u) throw std::logic_error("unknown membership reached during estimation");
        if (v != Tri::t) continue;
        const SketchEntry& entry = combination.entries[i];
        sum += weights.items[i].second * h(entry) / entry.weight;
    }
    return sum;
}

PairAggregates derived_aggregates(const std::map<SetId, BottomKSketch>& sketches,
                                  const SetId& set_a, const SetId& set_b) {
    const Predicate union_pred = Predicate::in_set(set_a) || Predicate::in_set(set_b);
    const Predicate inter_pred = Predicate::in_set(set_a) && Predicate::in_set(set_b);

    PairAggregates out;
    out.union_weight = estimate_weight_with(sketches, union_pred, CombinationKind::lcs).estimate;
    out.intersection_weight =
        estimate_weight_with(sketches, inter_pred, CombinationKind::scs).estimate;
    out.hamming_raw = out.union_weight - out.intersection_weight;
    out.hamming = out.hamming_raw;
    if (out.hamming < 0.0) {
        out.hamming = 0.0;
        out.hamming_clamped = true;
    }
    if (out.union_weight > 0.0) out.jaccard = out.intersection_weight / out.union_weight;
    return out;
}

double intersection_via_inclusion_exclusion(const std::map<SetId, BottomKSketch>& sketches,
                                            const SetId& set_a, const SetId& set_b,
                                            double weight_a, double weight_b) {
    const Predicate union_pred = Predicate::in_set(set_a) || Predicate::in_set(set_b);
    const double union_hat =
        estimate_weight_with(sketches, union_pred, CombinationKind::lcs).estimate;
    return weight_a + weight_b - union_hat;
}

}  // namespace coordsketch
