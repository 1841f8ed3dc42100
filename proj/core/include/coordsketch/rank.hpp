#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "coordsketch/types.hpp"

namespace coordsketch {

// Rank distribution family f_w for weighted keys.
//   ws:  exponential with parameter w; rank = -ln(u)/w (ppswor).
//   pri: uniform on [0, 1/w];          rank = u/w (priority / sequential Poisson).
enum class RankFamily { ws, pri };

inline const char* to_string(RankFamily f) { return f == RankFamily::ws ? "ws" : "pri"; }

inline RankFamily rank_family_from_string(const std::string& s) {
    if (s == "ws" || s == "WS") return RankFamily::ws;
    if (s == "pri" || s == "PRI") return RankFamily::pri;
    throw std::invalid_argument("unknown rank family: " + s);
}

inline constexpr double kInfiniteRank = std::numeric_limits<double>::infinity();

namespace detail {

// splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Map a hash to u in the open interval (0,1); zero maps to the smallest
// positive representable value so that -ln(u) stays finite.
inline double unit_open(std::uint64_t h) {
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : std::numeric_limits<double>::denorm_min();
}

}  // namespace detail

// Deterministic splitmix64 stream; used wherever draws beyond the coordinated
// rank assignment are needed (generators, replacement sampling, Monte Carlo).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in (0,1)
    double next_unit() { return detail::unit_open(next()); }

    // uniform in {0, ..., n-1}
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

// Deterministic coordinated rank source: rank is a pure function of
// (seed, key id, key weight), so a key draws the same rank in every set.
struct RankAssignment {
    RankFamily family = RankFamily::pri;
    std::uint64_t seed = 0;

    double uniform_of(std::uint64_t key_id) const {
        return detail::unit_open(detail::mix64(detail::mix64(seed) ^ key_id));
    }

    double rank_of(const Key& key) const {
        if (!(key.weight > 0.0)) {
            throw std::invalid_argument("rank undefined for nonpositive weight");
        }
        const double u = uniform_of(key.id);
        return family == RankFamily::ws ? -std::log(u) / key.weight : u / key.weight;
    }
};

inline double draw_rank(const RankAssignment& assignment, const Key& key) {
    return assignment.rank_of(key);
}

// p(w, tau) = lim_{x->tau-} F_w(x): probability that a key of weight w draws
// a rank strictly below tau. tau = +inf gives 1, tau = 0 gives 0.
inline double inclusion_prob(RankFamily family, double w, double tau) {
    if (!(w > 0.0)) throw std::invalid_argument("inclusion_prob requires w > 0");
    if (tau < 0.0) throw std::invalid_argument("inclusion_prob requires tau >= 0");
    if (std::isinf(tau)) return 1.0;
    if (tau == 0.0) return 0.0;
    if (family == RankFamily::ws) return -std::expm1(-w * tau);
    return std::min(1.0, w * tau);
}

}  // namespace coordsketch
