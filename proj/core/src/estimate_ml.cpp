#include "coordsketch/estimate_ml.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "coordsketch/estimate_rc.hpp"
#include "coordsketch/rank.hpp"

namespace coordsketch {

double solve_monotone(const MonotoneEquation& eq, double rel_tol) {
    double lo = eq.lo;
    double hi = eq.hi;
    if (!(lo < hi)) throw std::invalid_argument("solve_monotone: empty bracket");

    double f_lo = eq.pole_at_lo ? 0.0 : eq.f(lo);
    double f_hi = eq.pole_at_hi ? 0.0 : eq.f(hi);
    if (!eq.pole_at_lo && f_lo == 0.0) return lo;
    if (!eq.pole_at_hi && f_hi == 0.0) return hi;
    // Without a pole the endpoint signs must differ.
    if (!eq.pole_at_lo && !eq.pole_at_hi && ((f_lo < 0.0) == (f_hi < 0.0))) {
        throw std::invalid_argument("solve_monotone: no sign change on bracket");
    }
    // Anchor the invariant "sign(f(lo-side)) == sign_lo".
    int sign_lo;
    if (!eq.pole_at_lo) {
        sign_lo = f_lo >= 0.0 ? 1 : -1;
    } else if (!eq.pole_at_hi) {
        sign_lo = f_hi < 0.0 ? 1 : -1;
    } else {
        sign_lo = eq.f(lo + 1e-9 * (hi - lo)) >= 0.0 ? 1 : -1;
    }

    int iterations = 0;
    const int max_iterations = 200;
    while (iterations < max_iterations) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket at floating resolution
        const double f_mid = eq.f(mid);
        if ((f_mid >= 0.0 ? 1 : -1) == sign_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++iterations;
        if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    }

    // secant polish inside the final bracket
    double a = lo, b = hi;
    double fa = eq.f(a);
    double fb = eq.f(b);
    double best = 0.5 * (a + b);
    double f_best = eq.f(best);
    if (!std::isfinite(fa) || !std::isfinite(fb)) return best;
    for (int i = 0; i < 8 && fa != fb; ++i) {
        const double x = b - fb * (b - a) / (fb - fa);
        if (!(x > lo) || !(x < hi)) break;
        const double fx = eq.f(x);
        if (std::abs(fx) < std::abs(f_best)) {
            best = x;
            f_best = fx;
        }
        a = b;
        fa = fb;
        b = x;
        fb = fx;
    }
    return best;
}

namespace {

void require_ws(RankFamily family) {
    if (family != RankFamily::ws) {
        throw std::invalid_argument("ML estimators require ws (exponential) ranks");
    }
}

// Root of sum_{i=0..terms-1} 1/(x - s_i) = tau on (s_last, inf), where s_i
// are the given prefix sums (s_0 = 0 included by the caller). The left side
// is strictly decreasing with a pole at s_last, and is bounded by
// terms/(x - s_last), which pins the root below s_last + terms/tau.
double solve_prefix_sum_equation(std::span<const double> prefix, double tau) {
    const double s_last = prefix.back();
    const double terms = static_cast<double>(prefix.size());
    MonotoneEquation eq;
    eq.f = [&prefix, tau](double x) {
        double sum = 0.0;
        for (double s : prefix) sum += 1.0 / (x - s);
        return sum - tau;
    };
    eq.lo = s_last;
    eq.pole_at_lo = true;
    eq.hi = s_last + 1.125 * terms / tau;  // safety margin over the terms/(x-s_last) bound
    for (int i = 0; i < 64 && eq.f(eq.hi) > 0.0; ++i) eq.hi = s_last + 2.0 * (eq.hi - s_last);
    if (eq.f(eq.hi) > 0.0) throw std::runtime_error("ML bracket growth failed");
    return solve_monotone(eq);
}

std::vector<double> prefix_sums_zero_based(std::span<const double> weights, std::size_t count) {
    std::vector<double> prefix;
    prefix.reserve(count + 1);
    prefix.push_back(0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < count + 1; ++i) {
        sum += weights[i];
        prefix.push_back(sum);
    }
    return prefix;
}

}  // namespace

double ml_union_scs(const Combination& scs_combination) {
    require_ws(scs_combination.family);
    if (scs_combination.kind != CombinationKind::scs) {
        throw std::invalid_argument("ml_union_scs expects an scs combination");
    }
    if (scs_combination.entries.empty()) throw std::invalid_argument("empty scs combination");

    std::vector<double> weights;
    weights.reserve(scs_combination.size());
    double total = 0.0;
    for (const SketchEntry& entry : scs_combination.entries) {
        weights.push_back(entry.weight);
        total += entry.weight;
    }
    if (scs_combination.threshold == kInfiniteRank) return total;  // whole union observed

    // l+1 terms: prefixes s_0 = 0 .. s_l = total
    std::vector<double> prefix = prefix_sums_zero_based(weights, weights.size());
    return solve_prefix_sum_equation(prefix, scs_combination.threshold);
}

double ml_subpop_scs(const Combination& scs_combination, const Predicate& subpop) {
    require_ws(scs_combination.family);
    if (scs_combination.kind != CombinationKind::scs) {
        throw std::invalid_argument("ml_subpop_scs expects an scs combination");
    }

    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t i = 0; i < scs_combination.size(); ++i) {
        if (subpop.eval_bool(entry_context(scs_combination, i))) {
            weights.push_back(scs_combination.entries[i].weight);
            total += weights.back();
        }
    }
    if (weights.empty()) return 0.0;
    if (scs_combination.threshold == kInfiniteRank) return total;

    // m terms: prefixes s_0 = 0 .. s_{m-1}
    std::vector<double> prefix = prefix_sums_zero_based(weights, weights.size() - 1);
    return solve_prefix_sum_equation(prefix, scs_combination.threshold);
}

MlIntersectionResult ml_intersection_known_weights(const Combination& scs_combination,
                                                   double weight_a, double weight_b) {
    require_ws(scs_combination.family);
    if (scs_combination.kind != CombinationKind::scs || scs_combination.sources.size() != 2) {
        throw std::invalid_argument("ml_intersection expects an scs over exactly two sets");
    }
    const double c = weight_a + weight_b;
    const double feasible_max = std::min(weight_a, weight_b);

    std::vector<double> inter_weights;  // entries in both sets, rank order
    std::vector<double> diff_weights;   // entries in exactly one set, rank order
    for (std::size_t i = 0; i < scs_combination.size(); ++i) {
        const bool in_a = scs_combination.membership_at(i, 0) == Membership::in;
        const bool in_b = scs_combination.membership_at(i, 1) == Membership::in;
        (in_a && in_b ? inter_weights : diff_weights).push_back(scs_combination.entries[i].weight);
    }
    const std::size_t m = inter_weights.size();
    const std::size_t m_prime = diff_weights.size();

    MlIntersectionResult result;
    const auto finish = [&](double x) {
        result.intersection = x;
        if (x < 0.0 || x > feasible_max) {
            result.intersection = std::clamp(x, 0.0, feasible_max);
            result.clamped = true;
        }
        result.union_weight = c - result.intersection;
        result.resemblance =
            result.union_weight > 0.0 ? result.intersection / result.union_weight : 0.0;
        return result;
    };

    if (m == 0) return finish(0.0);

    std::vector<double> inter_prefix = prefix_sums_zero_based(inter_weights, m - 1);
#ifdef COORDSKETCH_ML84_LITERAL_INDEX
    // literal reading: second sum starts at i = 1 (skips the s'_0 = 0 term)
    std::vector<double> diff_prefix;
    if (m_prime >= 2) {
        auto full = prefix_sums_zero_based(diff_weights, m_prime - 1);
        diff_prefix.assign(full.begin() + 1, full.end());
    }
#else
    std::vector<double> diff_prefix;
    if (m_prime >= 1) diff_prefix = prefix_sums_zero_based(diff_weights, m_prime - 1);
#endif

    if (diff_prefix.empty()) {
        // no counter-pressure from the symmetric difference: the likelihood
        // pushes x to the upper end of the interval
        return finish(0.5 * c);
    }

    // poles: x = s_{m-1} on the left, x = (c - s'_{m'-1})/2 on the right
    MonotoneEquation eq;
    eq.f = [&](double x) {
        double sum = 0.0;
        for (double s : inter_prefix) sum += 1.0 / (x - s);
        for (double s : diff_prefix) sum -= 1.0 / (c - 2.0 * x - s);
        return sum;
    };
    eq.lo = inter_prefix.back();
    eq.hi = 0.5 * (c - diff_prefix.back());
    eq.pole_at_lo = true;
    eq.pole_at_hi = true;
    if (!(eq.lo < eq.hi)) return finish(eq.lo);
    return finish(solve_monotone(eq));
}

double lcs_union_known_weights(const std::map<SetId, BottomKSketch>& sketches,
                               const std::map<SetId, double>& known_weights,
                               const std::function<bool(const SketchEntry&)>* subpop) {
    if (sketches.empty()) throw std::invalid_argument("no sketches");
    std::vector<const BottomKSketch*> order;
    order.reserve(sketches.size());
    for (const auto& [id, sketch] : sketches) {
        require_ws(sketch.family);
        if (sketch.entries.empty()) {
            throw std::invalid_argument("empty sketch for set " + id + " in known-weight union");
        }
        if (!known_weights.contains(id)) {
            throw std::invalid_argument("missing known weight for set " + id);
        }
        order.push_back(&sketch);
    }
    std::sort(order.begin(), order.end(), [](const BottomKSketch* a, const BottomKSketch* b) {
        if (a->threshold != b->threshold) return a->threshold < b->threshold;
        return a->set_id < b->set_id;
    });

    // keys seen in the sketches after position j, filled back to front
    std::vector<std::unordered_set<std::uint64_t>> later(order.size() + 1);
    for (std::size_t j = order.size(); j-- > 1;) {
        later[j] = later[j + 1];
        for (const SketchEntry& entry : order[j]->entries) later[j].insert(entry.key_id);
    }

    double estimate = 0.0;
    for (std::size_t j = 0; j < order.size(); ++j) {
        const BottomKSketch& sketch = *order[j];
        double selected = 0.0;
        double all = 0.0;
        for (const SketchEntry& entry : sketch.entries) {
            const double a =
                entry.weight / inclusion_prob(sketch.family, entry.weight, sketch.threshold);
            all += a;
            // H_j: keys of this set in no later set; later sets have larger
            // thresholds so sketch membership decides exactly.
            if (later[j + 1].contains(entry.key_id)) continue;
            if (subpop && !(*subpop)(entry)) continue;
            selected += a;
        }
        estimate += known_weights.at(sketch.set_id) * (selected / all);
    }
    return estimate;
}

}  // namespace coordsketch
