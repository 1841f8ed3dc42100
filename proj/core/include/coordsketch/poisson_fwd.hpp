#pragma once

#include <cstdint>
#include <vector>

#include "coordsketch/rank.hpp"
#include "coordsketch/types.hpp"

namespace coordsketch {

struct PoissonEntry {
    std::uint64_t key_id = 0;
    double rank = 0.0;
    double weight = 1.0;
};

// Coordinated Poisson sample of one set: every member with rank below tau.
struct PoissonSample {
    SetId set_id;
    RankFamily family = RankFamily::pri;
    double tau = 0.0;
    std::vector<PoissonEntry> entries;  // ascending (rank, key id)
};

}  // namespace coordsketch
