#pragma once

#include <functional>
#include <map>
#include <span>

#include "coordsketch/combine.hpp"
#include "coordsketch/predicate.hpp"

namespace coordsketch {

// A strictly monotone equation f(x) = 0 with a root bracketed in (lo, hi).
// When pole_at_lo / pole_at_hi is set, f is not evaluated at that endpoint;
// the sign there is taken as the sign of the adjacent pole.
struct MonotoneEquation {
    std::function<double(double)> f;
    double lo = 0.0;
    double hi = 0.0;
    bool pole_at_lo = false;
    bool pole_at_hi = false;
};

// Bisection to the bracket's floating resolution, then secant polish.
double solve_monotone(const MonotoneEquation& eq, double rel_tol = 1e-12);

// ML estimate of w(U) from an SCS of ws sketches: the root of
// sum_{i=0..l} 1/(x - s_i) = r_{k+1}(S) with s_i the prefix weight sums of
// the SCS entries in rank order. An exhausted combination returns s_l exactly.
double ml_union_scs(const Combination& scs_combination);

// ML estimate of w(J) for the subpopulation J selected by the predicate:
// the root of sum_{i=0..m-1} 1/(x - s_i) = r_{k+1}(S) over the m selected
// entries. m = 0 gives 0.
double ml_subpop_scs(const Combination& scs_combination, const Predicate& subpop);

struct MlIntersectionResult {
    double intersection = 0.0;
    double union_weight = 0.0;
    double resemblance = 0.0;
    bool clamped = false;  // root fell outside [0, min(wA, wB)] and was clamped
};

// Two-set ML estimator with known set weights: solves
//   sum_{i<m} 1/(x - s_i) - sum_{i<m'} 1/(w(A)+w(B) - 2x - s'_i) = 0
// over the SCS entries split into intersection (m) and symmetric difference
// (m') parts. The search interval is pole-bounded:
// (s_{m-1}, (w(A)+w(B)-s'_{m'-1})/2).
MlIntersectionResult ml_intersection_known_weights(const Combination& scs_combination,
                                                   double weight_a, double weight_b);

// LCS union estimator with known per-set weights: sets sorted by ascending
// r_{k+1}; each contributes w(A_j) times the RC-weight fraction of its sketch
// falling in H_j = A_j minus all later sets (restricted by the optional
// attribute-based filter). The last set's fraction is exactly 1 without a
// filter, so its weight enters exactly.
double lcs_union_known_weights(const std::map<SetId, BottomKSketch>& sketches,
                               const std::map<SetId, double>& known_weights,
                               const std::function<bool(const SketchEntry&)>* subpop = nullptr);

}  // namespace coordsketch
