#pragma once

// Shared test fixtures: the ten-key/four-set worked example with its fixed
// priority ranks, a mid-size mixed-weight collection for Monte-Carlo checks,
// and small statistics helpers.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "coordsketch/sketch.hpp"
#include "coordsketch/types.hpp"

namespace fixtures {

using namespace coordsketch;

// Rank source with explicitly pinned rank values, keyed by id.
struct ExplicitRanks {
    std::unordered_map<std::uint64_t, double> ranks;
    double rank_of(const Key& key) const { return ranks.at(key.id); }
};

inline WeightedSetCollection ten_key_collection() {
    WeightedSetCollection coll;
    const double weights[10] = {1, 2, 1, 3, 1, 1, 1, 1, 1, 1};
    for (std::uint64_t id = 1; id <= 10; ++id) coll.add_key(Key{id, weights[id - 1], nullptr});
    for (std::uint64_t id : {1, 3, 5, 7, 9}) coll.add_member("A1", id);
    for (std::uint64_t id : {2, 5, 6, 9, 10}) coll.add_member("A2", id);
    for (std::uint64_t id : {3, 4, 5, 6, 7}) coll.add_member("A3", id);
    for (std::uint64_t id : {2, 4, 6, 8, 10}) coll.add_member("A4", id);
    return coll;
}

inline ExplicitRanks ten_key_ranks() {
    return ExplicitRanks{{{1, 0.487},
                          {2, 0.36},
                          {3, 0.3},
                          {4, 0.208},
                          {5, 0.765},
                          {6, 0.599},
                          {7, 0.131},
                          {8, 0.886},
                          {9, 0.73},
                          {10, 0.341}}};
}

// Bottom-3 priority sketches of the fixture under the pinned ranks.
inline std::map<SetId, BottomKSketch> ten_key_sketches(int k = 3) {
    const auto coll = ten_key_collection();
    const auto ranks = ten_key_ranks();
    std::map<SetId, BottomKSketch> sketches;
    for (const SetId& id : coll.set_ids()) {
        const auto keys = coll.set_keys(id);
        sketches.emplace(id, build_bottom_k_with(id, keys, ranks, RankFamily::pri, k));
    }
    return sketches;
}

// 200 mixed-weight keys in three overlapping sets; the workhorse for the
// unbiasedness / covariance / variance-ordering suites.
inline WeightedSetCollection mixed_collection() {
    WeightedSetCollection coll;
    for (std::uint64_t id = 1; id <= 200; ++id) {
        const double weight = 0.5 + static_cast<double>(id % 7) * 0.75;
        coll.add_key(Key{id, weight, nullptr});
    }
    for (std::uint64_t id = 1; id <= 90; ++id) coll.add_member("A1", id);
    for (std::uint64_t id = 61; id <= 150; ++id) coll.add_member("A2", id);
    for (std::uint64_t id = 121; id <= 200; ++id) coll.add_member("A3", id);
    for (std::uint64_t id = 1; id <= 30; ++id) coll.add_member("A3", id);  // wrap-around overlap
    return coll;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_and_se(std::span<const double> values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = values.size() > 1 ? var / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

// Online accumulator for per-key sums without storing every draw.
struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double variance() const {
        const double m = mean();
        return (sum_sq - static_cast<double>(n) * m * m) / (static_cast<double>(n) - 1.0);
    }
    double se() const { return std::sqrt(variance() / static_cast<double>(n)); }
};

}  // namespace fixtures
