#include "coordsketch/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace coordsketch {

double solve_tau_for_expected_size(std::span<const Key> set, RankFamily family, int k) {
    if (set.empty()) throw std::invalid_argument("tau solve over an empty set");
    if (k < 1) throw std::invalid_argument("tau solve requires k >= 1");
    const std::size_t n = set.size();
    if (static_cast<std::size_t>(k) > n ||
        (family == RankFamily::ws && static_cast<std::size_t>(k) == n)) {
        throw std::invalid_argument("expected sample size unattainable for this set");
    }

    if (family == RankFamily::pri && static_cast<std::size_t>(k) == n) {
        // saturation point: min over tau with sum = n
        double tau = 0.0;
        for (const Key& key : set) tau = std::max(tau, 1.0 / key.weight);
        return tau;
    }

    const auto expected_size = [&](double tau) {
        double sum = 0.0;
        for (const Key& key : set) sum += inclusion_prob(family, key.weight, tau);
        return sum;
    };

    double lo = 0.0;
    double total_weight = 0.0;
    for (const Key& key : set) total_weight += key.weight;
    double hi = static_cast<double>(k) / total_weight;  // exact in the pri linear regime
    for (int i = 0; i < 128 && expected_size(hi) < k; ++i) hi *= 2.0;

    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (expected_size(mid) < k) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * hi) break;
    }
    double tau = 0.5 * (lo + hi);
    // secant polish against the residual
    for (int i = 0; i < 4; ++i) {
        const double f = expected_size(tau) - k;
        if (std::abs(f) <= 1e-12 * k) break;
        double slope = 0.0;
        for (const Key& key : set) {
            if (family == RankFamily::ws) {
                slope += key.weight * std::exp(-key.weight * tau);
            } else if (key.weight * tau < 1.0) {
                slope += key.weight;
            }
        }
        if (!(slope > 0.0)) break;
        tau = std::clamp(tau - f / slope, lo, hi);
    }
    return tau;
}

PoissonSample build_poisson(SetId set_id, std::span<const Key> set,
                            const RankAssignment& assignment, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("poisson sample requires tau >= 0");
    PoissonSample sample;
    sample.set_id = std::move(set_id);
    sample.family = assignment.family;
    sample.tau = tau;
    for (const Key& key : set) {
        const double r = assignment.rank_of(key);
        if (r < tau) sample.entries.push_back({key.id, r, key.weight});
    }
    std::sort(sample.entries.begin(), sample.entries.end(),
              [](const PoissonEntry& a, const PoissonEntry& b) {
                  return rank_less(a.rank, a.key_id, b.rank, b.key_id);
              });
    return sample;
}

std::map<SetId, PoissonSample> build_coordinated_poisson(const WeightedSetCollection& collection,
                                                         RankFamily family, std::uint64_t seed,
                                                         const std::map<SetId, double>& taus) {
    const RankAssignment assignment{family, seed};
    std::map<SetId, PoissonSample> samples;
    const auto ground = collection.ground();
    std::vector<Key> buffer;
    for (const auto& [set_id, tau] : taus) {
        buffer.clear();
        for (std::size_t idx : collection.members(set_id)) buffer.push_back(ground[idx]);
        samples.emplace(set_id, build_poisson(set_id, buffer, assignment, tau));
    }
    return samples;
}

namespace {

RankFamily common_family(const std::map<SetId, PoissonSample>& samples) {
    if (samples.empty()) throw std::invalid_argument("no poisson samples");
    const RankFamily family = samples.begin()->second.family;
    for (const auto& [id, sample] : samples) {
        if (sample.family != family) {
            throw std::invalid_argument("poisson samples with mismatched rank family");
        }
    }
    return family;
}

}  // namespace

AdjustedWeightMap poisson_scs_like_weights(const std::map<SetId, PoissonSample>& samples) {
    const RankFamily family = common_family(samples);
    double tau_s = kInfiniteRank;
    for (const auto& [id, sample] : samples) tau_s = std::min(tau_s, sample.tau);

    AdjustedWeightMap map;
    map.kind = EstimatorKind::poisson_scs_like;
    for (const auto& [id, sample] : samples) {
        for (const PoissonEntry& entry : sample.entries) {
            if (!(entry.rank < tau_s)) continue;
            if (map.index.contains(entry.key_id)) continue;
            const double a = entry.weight / inclusion_prob(family, entry.weight, tau_s);
            map.items.emplace_back(entry.key_id, a);
            map.index.emplace(entry.key_id, a);
        }
    }
    return map;
}

AdjustedWeightMap poisson_lcs_like_weights(const std::map<SetId, PoissonSample>& samples) {
    const RankFamily family = common_family(samples);

    // per pooled key, the largest tau over samples containing it
    std::unordered_map<std::uint64_t, std::pair<double, double>> best;  // id -> (tau, weight)
    for (const auto& [id, sample] : samples) {
        for (const PoissonEntry& entry : sample.entries) {
            auto [it, inserted] = best.emplace(entry.key_id, std::make_pair(sample.tau, entry.weight));
            if (!inserted && sample.tau > it->second.first) it->second.first = sample.tau;
        }
    }

    AdjustedWeightMap map;
    map.kind = EstimatorKind::poisson_lcs_like;
    map.items.reserve(best.size());
    for (const auto& [key_id, tau_weight] : best) {
        const auto [tau, weight] = tau_weight;
        map.items.emplace_back(key_id, weight / inclusion_prob(family, weight, tau));
    }
    std::sort(map.items.begin(), map.items.end());
    map.index.reserve(map.items.size());
    for (const auto& [id, a] : map.items) map.index.emplace(id, a);
    return map;
}

}  // namespace coordsketch
