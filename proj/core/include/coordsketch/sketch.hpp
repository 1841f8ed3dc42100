#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "coordsketch/rank.hpp"
#include "coordsketch/types.hpp"

namespace coordsketch {

struct SketchEntry {
    std::uint64_t key_id = 0;
    double rank = 0.0;
    double weight = 1.0;
    AttrsPtr attrs;
};

// Orders entries by (rank, key id); the id breaks the measure-zero ties that
// hashed ranks can still produce, giving a strict total order.
inline bool rank_less(double ra, std::uint64_t ida, double rb, std::uint64_t idb) {
    return ra < rb || (ra == rb && ida < idb);
}

inline bool entry_less(const SketchEntry& a, const SketchEntry& b) {
    return rank_less(a.rank, a.key_id, b.rank, b.key_id);
}

// Bottom-k sketch of one set: the min(k,|A|) least-ranked members in ascending
// rank order, plus the (k+1)-st smallest rank (+inf when the set is exhausted).
struct BottomKSketch {
    SetId set_id;
    RankFamily family = RankFamily::pri;
    int k = 0;
    std::vector<SketchEntry> entries;
    double threshold = kInfiniteRank;

    bool exhausted() const { return std::isinf(threshold); }
};

// k-mins sketch: per-coordinate minimum-rank member under k independent
// rank assignments.
struct KMinsSketch {
    SetId set_id;
    RankFamily family = RankFamily::pri;
    std::vector<std::pair<std::uint64_t, double>> coordinates;  // (key id, rank)
};

// RankSource is anything with a `double rank_of(const Key&) const`.
template <typename RankSource>
BottomKSketch build_bottom_k_with(SetId set_id, std::span<const Key> set,
                                  const RankSource& ranks, RankFamily family, int k) {
    if (k < 1) throw std::invalid_argument("bottom-k sketch requires k >= 1");
    BottomKSketch sketch;
    sketch.set_id = std::move(set_id);
    sketch.family = family;
    sketch.k = k;
    if (set.empty()) return sketch;  // degenerate: no entries, threshold +inf

    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) ranked.emplace_back(ranks.rank_of(set[i]), i);

    auto less = [&](const auto& a, const auto& b) {
        return rank_less(a.first, set[a.second].id, b.first, set[b.second].id);
    };
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
    if (ranked.size() > take) {
        std::nth_element(ranked.begin(), ranked.begin() + take, ranked.end(), less);
        sketch.threshold = ranked[take].first;
        ranked.resize(take);
    }
    std::sort(ranked.begin(), ranked.end(), less);

    sketch.entries.reserve(take);
    for (const auto& [rank, idx] : ranked) {
        sketch.entries.push_back({set[idx].id, rank, set[idx].weight, set[idx].attrs});
    }
    return sketch;
}

inline BottomKSketch build_bottom_k(SetId set_id, std::span<const Key> set,
                                    const RankAssignment& assignment, int k) {
    return build_bottom_k_with(std::move(set_id), set, assignment, assignment.family, k);
}

// Coordinated sketching: one rank assignment shared by every set, so a key
// common to two sets carries the same rank in both sketches.
inline std::map<SetId, BottomKSketch> build_coordinated(const WeightedSetCollection& collection,
                                                        RankFamily family, std::uint64_t seed,
                                                        int k) {
    const RankAssignment assignment{family, seed};
    std::map<SetId, BottomKSketch> sketches;
    const auto ground = collection.ground();
    std::vector<Key> buffer;
    for (const SetId& set_id : collection.set_ids()) {
        buffer.clear();
        for (std::size_t idx : collection.members(set_id)) buffer.push_back(ground[idx]);
        sketches.emplace(set_id, build_bottom_k(set_id, buffer, assignment, k));
    }
    return sketches;
}

template <typename RankSourceForSeed>
KMinsSketch build_kmins_with(SetId set_id, std::span<const Key> set, RankFamily family,
                             std::span<const std::uint64_t> seeds,
                             const RankSourceForSeed& make_source) {
    if (seeds.empty()) throw std::invalid_argument("k-mins sketch requires k >= 1 seeds");
    if (set.empty()) throw std::invalid_argument("k-mins sketch of an empty set");
    KMinsSketch sketch;
    sketch.set_id = std::move(set_id);
    sketch.family = family;
    sketch.coordinates.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
        const auto source = make_source(seed);
        double best_rank = kInfiniteRank;
        std::uint64_t best_id = 0;
        for (const Key& key : set) {
            const double r = source.rank_of(key);
            if (rank_less(r, key.id, best_rank, best_id)) {
                best_rank = r;
                best_id = key.id;
            }
        }
        sketch.coordinates.emplace_back(best_id, best_rank);
    }
    return sketch;
}

inline KMinsSketch build_kmins(SetId set_id, std::span<const Key> set, RankFamily family,
                               std::span<const std::uint64_t> seeds) {
    return build_kmins_with(std::move(set_id), set, family, seeds, [&](std::uint64_t seed) {
        return RankAssignment{family, seed};
    });
}

}  // namespace coordsketch
