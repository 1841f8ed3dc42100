#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coordsketch/predicate.hpp"
#include "coordsketch/types.hpp"

namespace coordsketch {

// Synthetic dataset description. Generator grammar:
//   pair(n, overlap)                        two sets of n keys sharing `overlap`
//   shared_core(sets, core, exclusive)      `core` common keys + `exclusive` own keys per set
//   heavy_overlap(sets, core, exclusive)    alias of shared_core (large-core presets)
//   disjoint(sets, size)                    pairwise disjoint sets
//   heterogeneous(sets, universe, base)     random subsets with Pareto-distributed sizes
// Weight models: uniform | pareto:<alpha>. Sets are named A1, A2, ...
// Every key carries a `label` attribute (id mod 10).
struct DatasetSpec {
    std::string generator;
    std::vector<double> params;
    std::string weights = "uniform";
    std::uint64_t seed = 1;

    std::string to_string() const;
};

// Parses "pair(10000,2000)" style text (generator and params only).
DatasetSpec parse_dataset_spec(const std::string& text);

WeightedSetCollection gen_dataset(const DatasetSpec& spec);

// Exact subpopulation weight by full scan. Deliberately independent of the
// sketch code paths: membership comes straight from the collection.
double oracle_weight(const WeightedSetCollection& collection, const Predicate& pred);

}  // namespace coordsketch
