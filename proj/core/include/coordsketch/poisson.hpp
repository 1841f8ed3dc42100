#pragma once

#include <map>
#include <span>

#include "coordsketch/estimate_rc.hpp"
#include "coordsketch/poisson_fwd.hpp"
#include "coordsketch/sketch.hpp"

namespace coordsketch {

// The tau solving k = sum_i p(w(i), tau) over the set, so the Poisson sample
// has expected size k. Requires 1 <= k <= |A| (and k < |A| for ws ranks,
// where the sum stays strictly below |A| for every finite tau).
double solve_tau_for_expected_size(std::span<const Key> set, RankFamily family, int k);

PoissonSample build_poisson(SetId set_id, std::span<const Key> set,
                            const RankAssignment& assignment, double tau);

std::map<SetId, PoissonSample> build_coordinated_poisson(const WeightedSetCollection& collection,
                                                         RankFamily family, std::uint64_t seed,
                                                         const std::map<SetId, double>& taus);

// SCS-like rule: keep pooled keys with rank below tau_S = min_A tau_A, weight
// w(i)/p(w(i), tau_S). The kept keys form a Poisson sample of the union with
// tau_S, with full membership knowledge.
AdjustedWeightMap poisson_scs_like_weights(const std::map<SetId, PoissonSample>& samples);

// LCS-like rule: every pooled key i, weighted w(i)/p(w(i), tau_A) where A is
// the set with largest tau_A whose sample holds i.
AdjustedWeightMap poisson_lcs_like_weights(const std::map<SetId, PoissonSample>& samples);

}  // namespace coordsketch
