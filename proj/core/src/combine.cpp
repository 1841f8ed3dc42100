#include "coordsketch/combine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace coordsketch {

const char* to_string(CombinationKind kind) {
    switch (kind) {
        case CombinationKind::union_sketch: return "UNION";
        case CombinationKind::scs: return "SCS";
        case CombinationKind::lcs: return "LCS";
    }
    return "?";
}

CombinationKind combination_kind_from_string(const std::string& s) {
    if (s == "UNION" || s == "union") return CombinationKind::union_sketch;
    if (s == "SCS" || s == "scs") return CombinationKind::scs;
    if (s == "LCS" || s == "lcs") return CombinationKind::lcs;
    throw std::invalid_argument("unknown combination kind: " + s);
}

const char* to_string(Membership m) {
    switch (m) {
        case Membership::in: return "IN";
        case Membership::out: return "OUT";
        case Membership::unknown: return "UNKNOWN";
    }
    return "?";
}

namespace {

struct Pooled {
    std::vector<SketchEntry> entries;                         // distinct, ascending (rank, id)
    std::unordered_map<std::uint64_t, std::size_t> index;     // key id -> entry slot
    std::vector<std::vector<bool>> in_sketch;                 // per source: entry in its sketch
};

// Pools the distinct sketch keys and validates that the sketches agree on k
// and on the rank/weight of every shared key (i.e. were coordinated).
Pooled pool_entries(std::span<const BottomKSketch> sketches) {
    if (sketches.empty()) throw std::invalid_argument("combination of zero sketches");
    const int k = sketches.front().k;
    const RankFamily family = sketches.front().family;
    Pooled pooled;
    for (const auto& sketch : sketches) {
        if (sketch.k != k) throw std::invalid_argument("combination of sketches with mismatched k");
        if (sketch.family != family) {
            throw std::invalid_argument("combination of sketches with mismatched rank family");
        }
        for (const auto& entry : sketch.entries) {
            auto [it, inserted] = pooled.index.emplace(entry.key_id, pooled.entries.size());
            if (inserted) {
                pooled.entries.push_back(entry);
            } else {
                const auto& seen = pooled.entries[it->second];
                if (seen.rank != entry.rank || seen.weight != entry.weight) {
                    throw std::invalid_argument("uncoordinated sketches: key " +
                                                std::to_string(entry.key_id) +
                                                " has conflicting rank or weight");
                }
            }
        }
    }
    std::sort(pooled.entries.begin(), pooled.entries.end(), entry_less);
    pooled.index.clear();
    for (std::size_t i = 0; i < pooled.entries.size(); ++i) {
        pooled.index.emplace(pooled.entries[i].key_id, i);
    }
    pooled.in_sketch.resize(sketches.size());
    for (std::size_t s = 0; s < sketches.size(); ++s) {
        pooled.in_sketch[s].assign(pooled.entries.size(), false);
        for (const auto& entry : sketches[s].entries) {
            pooled.in_sketch[s][pooled.index.at(entry.key_id)] = true;
        }
    }
    return pooled;
}

Combination init_combination(CombinationKind kind, std::span<const BottomKSketch> sketches) {
    Combination combo;
    combo.kind = kind;
    combo.family = sketches.front().family;
    combo.k = sketches.front().k;
    for (const auto& sketch : sketches) combo.sources.push_back(sketch.set_id);
    return combo;
}

}  // namespace

bool Combination::has_entry(std::uint64_t key_id) const {
    for (const auto& e : entries) {
        if (e.key_id == key_id) return true;
    }
    return false;
}

std::size_t Combination::entry_index(std::uint64_t key_id) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].key_id == key_id) return i;
    }
    throw std::invalid_argument("key " + std::to_string(key_id) + " not in combination");
}

std::size_t Combination::source_index(const SetId& set_id) const {
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (sources[i] == set_id) return i;
    }
    throw std::invalid_argument("set " + set_id + " not a combination source");
}

Combination union_sketch(std::span<const BottomKSketch> sketches) {
    Pooled pooled = pool_entries(sketches);
    Combination combo = init_combination(CombinationKind::union_sketch, sketches);

    const std::size_t take =
        std::min<std::size_t>(static_cast<std::size_t>(combo.k), pooled.entries.size());
    // r_{k+1} of the union: the least rank among pooled keys beyond the first
    // k and the per-set thresholds.
    double threshold = kInfiniteRank;
    if (pooled.entries.size() > take) threshold = std::min(threshold, pooled.entries[take].rank);
    for (const auto& sketch : sketches) threshold = std::min(threshold, sketch.threshold);
    combo.threshold = threshold;

    combo.entries.assign(pooled.entries.begin(), pooled.entries.begin() + take);
    combo.membership_.resize(combo.entries.size() * combo.sources.size());
    for (std::size_t i = 0; i < combo.entries.size(); ++i) {
        for (std::size_t s = 0; s < combo.sources.size(); ++s) {
            combo.membership_[i * combo.sources.size() + s] =
                pooled.in_sketch[s][i] ? Membership::in : Membership::out;
        }
    }
    return combo;
}

Combination scs(std::span<const BottomKSketch> sketches) {
    Pooled pooled = pool_entries(sketches);
    Combination combo = init_combination(CombinationKind::scs, sketches);

    double threshold = kInfiniteRank;
    for (const auto& sketch : sketches) threshold = std::min(threshold, sketch.threshold);
    combo.threshold = threshold;

    for (std::size_t i = 0; i < pooled.entries.size(); ++i) {
        if (!(pooled.entries[i].rank < threshold)) break;  // strict; pooled is rank-sorted
        combo.entries.push_back(pooled.entries[i]);
    }
    combo.membership_.resize(combo.entries.size() * combo.sources.size());
    for (std::size_t i = 0; i < combo.entries.size(); ++i) {
        for (std::size_t s = 0; s < combo.sources.size(); ++s) {
            combo.membership_[i * combo.sources.size() + s] =
                pooled.in_sketch[s][i] ? Membership::in : Membership::out;
        }
    }
    return combo;
}

Combination lcs(std::span<const BottomKSketch> sketches) {
    Pooled pooled = pool_entries(sketches);
    Combination combo = init_combination(CombinationKind::lcs, sketches);

    double threshold = kInfiniteRank;
    for (const auto& sketch : sketches) threshold = std::min(threshold, sketch.threshold);
    combo.threshold = threshold;
    combo.entries = std::move(pooled.entries);

    // Sources ordered by ascending (r_{k+1}, set id); tau(i) is the threshold
    // of the latest such set whose sketch contains i. Ties in r_{k+1} leave
    // tau unchanged whichever of the tied sets wins.
    std::vector<std::size_t> order(sketches.size());
    for (std::size_t s = 0; s < order.size(); ++s) order[s] = s;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sketches[a].threshold != sketches[b].threshold) {
            return sketches[a].threshold < sketches[b].threshold;
        }
        return sketches[a].set_id < sketches[b].set_id;
    });

    combo.entry_tau.assign(combo.entries.size(), 0.0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t s = order[pos];
        for (std::size_t i = 0; i < combo.entries.size(); ++i) {
            if (pooled.in_sketch[s][i]) combo.entry_tau[i] = sketches[s].threshold;
        }
    }

    combo.membership_.resize(combo.entries.size() * combo.sources.size());
    for (std::size_t i = 0; i < combo.entries.size(); ++i) {
        for (std::size_t s = 0; s < combo.sources.size(); ++s) {
            Membership m;
            if (pooled.in_sketch[s][i]) {
                m = Membership::in;
            } else if (combo.entries[i].rank < sketches[s].threshold) {
                m = Membership::out;
            } else {
                m = Membership::unknown;
            }
            combo.membership_[i * combo.sources.size() + s] = m;
        }
    }
    return combo;
}

Combination build_combination(CombinationKind kind, const std::map<SetId, BottomKSketch>& sketches,
                              std::span<const SetId> sets) {
    std::vector<BottomKSketch> selected;
    selected.reserve(sets.size());
    for (const SetId& id : sets) {
        auto it = sketches.find(id);
        if (it == sketches.end()) throw std::invalid_argument("no sketch for set " + id);
        selected.push_back(it->second);
    }
    switch (kind) {
        case CombinationKind::union_sketch: return union_sketch(selected);
        case CombinationKind::scs: return scs(selected);
        case CombinationKind::lcs: return lcs(selected);
    }
    throw std::logic_error("unreachable");
}

Membership membership_query(const Combination& combination, std::uint64_t key_id,
                            const SetId& set_id) {
    const std::size_t i = combination.entry_index(key_id);
    const std::size_t s = combination.source_index(set_id);
    return combination.membership_at(i, s);
}

}  // namespace coordsketch
