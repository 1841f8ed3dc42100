#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "coordsketch/sketch.hpp"

namespace coordsketch {

enum class CombinationKind { union_sketch, scs, lcs };

const char* to_string(CombinationKind kind);
CombinationKind combination_kind_from_string(const std::string& s);

enum class Membership : std::uint8_t { in, out, unknown };

const char* to_string(Membership m);

// A combination of coordinated bottom-k sketches.
//
//   union_sketch: the k least-ranked pooled keys; threshold = r_{k+1} of the
//                 union; membership fully known.
//   scs:          all pooled keys with rank below min_A r_{k+1}(A); threshold
//                 = that minimum; membership fully known.
//   lcs:          all pooled keys; threshold = min_A r_{k+1}(A) kept for
//                 reference; per-entry tau = r_{k+1} of the last set (largest
//                 threshold) whose sketch holds the key; membership unknown
//                 for (i, A) when i is outside A's sketch with rank >= r_{k+1}(A).
class Combination {
public:
    CombinationKind kind = CombinationKind::union_sketch;
    RankFamily family = RankFamily::pri;
    int k = 0;
    std::vector<SetId> sources;
    std::vector<SketchEntry> entries;  // ascending (rank, key id)
    double threshold = kInfiniteRank;
    std::vector<double> entry_tau;     // lcs only; parallel to entries

    std::size_t size() const { return entries.size(); }

    bool has_entry(std::uint64_t key_id) const;
    std::size_t entry_index(std::uint64_t key_id) const;  // throws if absent
    std::size_t source_index(const SetId& set_id) const;  // throws if absent

    Membership membership_at(std::size_t entry_idx, std::size_t source_idx) const {
        return membership_[entry_idx * sources.size() + source_idx];
    }

    // Per-entry tau used by the RC estimator: the combination threshold for
    // union/scs kinds, the entry's own tau for lcs.
    double tau_of(std::size_t entry_idx) const {
        return kind == CombinationKind::lcs ? entry_tau[entry_idx] : threshold;
    }

    friend Combination union_sketch(std::span<const BottomKSketch> sketches);
    friend Combination scs(std::span<const BottomKSketch> sketches);
    friend Combination lcs(std::span<const BottomKSketch> sketches);

private:
    std::vector<Membership> membership_;  // entries x sources, row-major
};

Combination union_sketch(std::span<const BottomKSketch> sketches);
Combination scs(std::span<const BottomKSketch> sketches);
Combination lcs(std::span<const BottomKSketch> sketches);

// Convenience over a keyed sketch map, selecting the named sources.
Combination build_combination(CombinationKind kind, const std::map<SetId, BottomKSketch>& sketches,
                              std::span<const SetId> sets);

// Membership of a combination entry in one source set. Never `unknown` for
// union/scs kinds. Throws if the key or set is not part of the combination.
Membership membership_query(const Combination& combination, std::uint64_t key_id,
                            const SetId& set_id);

}  // namespace coordsketch
