#include "coordsketch/estimate_sel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "coordsketch/rank.hpp"

namespace coordsketch {

const char* to_string(StopRule rule) {
    switch (rule) {
        case StopRule::wsr: return "wsr";
        case StopRule::wsrd: return "wsrd";
        case StopRule::wsrc: return "wsrc";
    }
    return "?";
}

namespace {

struct WeightedDrawer {
    std::vector<double> cumulative;
    std::span<const Key> keys;

    explicit WeightedDrawer(std::span<const Key> ground) : keys(ground) {
        cumulative.reserve(ground.size());
        double sum = 0.0;
        for (const Key& key : ground) {
            if (!(key.weight > 0.0)) throw std::invalid_argument("nonpositive key weight");
            sum += key.weight;
            cumulative.push_back(sum);
        }
    }

    std::size_t draw(SplitMix64& rng) const {
        const double target = rng.next_unit() * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        return std::min<std::size_t>(it - cumulative.begin(), keys.size() - 1);
    }
};

ReplacementSample finish_sample(StopRule rule, int k, bool exhausted,
                                const std::vector<std::uint64_t>& multiplicity,
                                std::span<const Key> keys) {
    ReplacementSample sample;
    sample.rule = rule;
    sample.k = k;
    sample.exhausted = exhausted;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (multiplicity[i] == 0) continue;
        sample.counts.push_back({keys[i].id, multiplicity[i], keys[i].weight});
        sample.total += multiplicity[i];
    }
    std::sort(sample.counts.begin(), sample.counts.end(),
              [](const auto& a, const auto& b) { return a.key_id < b.key_id; });
    return sample;
}

}  // namespace

ReplacementSample draw_replacement_sample(std::span<const Key> ground, StopRule rule, int k,
                                          std::uint64_t seed) {
    if (ground.empty()) throw std::invalid_argument("replacement sample over an empty ground");
    if (k < 1) throw std::invalid_argument("replacement sample requires k >= 1");
    if (rule == StopRule::wsrc) {
        throw std::invalid_argument("wsrc needs a collection; use draw_replacement_sample_wsrc");
    }

    WeightedDrawer drawer(ground);
    SplitMix64 rng(seed);
    std::vector<std::uint64_t> multiplicity(ground.size(), 0);

    if (rule == StopRule::wsr) {
        for (int i = 0; i < k; ++i) multiplicity[drawer.draw(rng)]++;
        return finish_sample(rule, k, false, multiplicity, ground);
    }

    // wsrd: stop at the (k+1)-st distinct key, excluding the trigger draw so
    // the sample holds exactly k distinct keys. With |U| <= k the trigger can
    // never occur; we then stop once the support is exhausted.
    const bool can_trigger = ground.size() > static_cast<std::size_t>(k);
    std::size_t distinct = 0;
    while (true) {
        const std::size_t idx = drawer.draw(rng);
        if (multiplicity[idx] == 0) {
            ++distinct;
            if (can_trigger && distinct == static_cast<std::size_t>(k) + 1) break;
        }
        multiplicity[idx]++;
        if (!can_trigger && distinct == ground.size()) break;
    }
    return finish_sample(rule, k, !can_trigger, multiplicity, ground);
}

ReplacementSample draw_replacement_sample_wsrc(const WeightedSetCollection& collection,
                                               std::span<const SetId> sets, int k,
                                               std::uint64_t seed) {
    if (sets.empty()) throw std::invalid_argument("wsrc requires at least one set");
    if (k < 1) throw std::invalid_argument("replacement sample requires k >= 1");

    // ground = union of the sets, in ground order
    const auto ground_all = collection.ground();
    std::vector<char> in_union(ground_all.size(), 0);
    for (const SetId& id : sets) {
        for (std::size_t idx : collection.members(id)) in_union[idx] = 1;
    }
    std::vector<Key> ground;
    std::vector<std::size_t> ground_pos(ground_all.size(), 0);
    for (std::size_t i = 0; i < ground_all.size(); ++i) {
        if (in_union[i]) {
            ground_pos[i] = ground.size();
            ground.push_back(ground_all[i]);
        }
    }
    if (ground.empty()) throw std::invalid_argument("wsrc over empty union");

    // per union key, the sets containing it
    std::vector<std::vector<std::uint32_t>> key_sets(ground.size());
    std::vector<std::size_t> set_size(sets.size(), 0);
    bool can_trigger = false;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        for (std::size_t idx : collection.members(sets[s])) {
            key_sets[ground_pos[idx]].push_back(static_cast<std::uint32_t>(s));
            set_size[s]++;
        }
        if (set_size[s] > static_cast<std::size_t>(k)) can_trigger = true;
    }

    WeightedDrawer drawer(ground);
    SplitMix64 rng(seed);
    std::vector<std::uint64_t> multiplicity(ground.size(), 0);
    std::vector<std::size_t> set_distinct(sets.size(), 0);
    std::size_t distinct = 0;

    while (true) {
        const std::size_t idx = drawer.draw(rng);
        if (multiplicity[idx] == 0) {
            bool triggered = false;
            for (std::uint32_t s : key_sets[idx]) {
                if (++set_distinct[s] == static_cast<std::size_t>(k) + 1) triggered = true;
            }
            if (triggered) break;
            ++distinct;
        }
        multiplicity[idx]++;
        if (!can_trigger && distinct == ground.size()) break;
    }
    return finish_sample(StopRule::wsrc, k, !can_trigger, multiplicity, ground);
}

AdjustedSelectivityMap rho1(const ReplacementSample& sample) {
    if (sample.total == 0) throw std::invalid_argument("empty replacement sample");
    AdjustedSelectivityMap map;
    map.items.reserve(sample.counts.size());
    const double total = static_cast<double>(sample.total);
    for (const auto& count : sample.counts) {
        map.items.emplace_back(count.key_id, static_cast<double>(count.multiplicity) / total);
    }
    map.index.reserve(map.items.size());
    for (const auto& [id, rho] : map.items) map.index.emplace(id, rho);
    return map;
}

AdjustedSelectivityMap rho_scs_uniform(const Combination& combination) {
    if (combination.kind == CombinationKind::lcs) {
        throw std::invalid_argument("uniform selectivities need full membership (scs or union)");
    }
    if (combination.entries.empty()) throw std::invalid_argument("empty combination");
    const double w0 = combination.entries.front().weight;
    for (const SketchEntry& entry : combination.entries) {
        if (entry.weight != w0) {
            throw std::invalid_argument("rho_scs_uniform requires uniform key weights");
        }
    }
    AdjustedSelectivityMap map;
    const double rho = 1.0 / static_cast<double>(combination.size());
    map.items.reserve(combination.size());
    for (const SketchEntry& entry : combination.entries) map.items.emplace_back(entry.key_id, rho);
    map.index.reserve(map.items.size());
    for (const auto& [id, r] : map.items) map.index.emplace(id, r);
    return map;
}

namespace {

struct Frac {
    long long num = 0;
    long long den = 1;

    Frac reduced() const {
        const long long g = std::gcd(num, den);
        return {num / g, den / g};
    }
    Frac operator+(Frac other) const {
        return Frac{num * other.den + other.num * den, den * other.den}.reduced();
    }
    Frac operator*(Frac other) const { return Frac{num * other.num, den * other.den}.reduced(); }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

}  // namespace

JaccardBiasDemo jaccard_biased_demo() {
    // A1 = {i1,i2,i3}, A2 = {i1,i4}, w(i1) = 4, unit weights otherwise;
    // bottom-2 ws sketch of the union {i1..i4}, resemblance w(i1)/w(U).
    const long long w1 = 4;
    const long long unit_keys = 3;
    const long long total = w1 + unit_keys;

    // P(i1 among the bottom two) = w1/W + sum_j (1/W) * w1/(W-1)
    const Frac first{w1, total};
    const Frac second = Frac{unit_keys, total} * Frac{w1, total - 1};
    const Frac included = first + second;

    // given inclusion, the sketch is {i1, unit key}: weighted fraction w1/(w1+1)
    const Frac weighted_fraction{w1, w1 + 1};

    JaccardBiasDemo demo;
    demo.naive_expectation = (included * weighted_fraction).value();
    demo.true_resemblance = Frac{w1, total}.value();
    demo.naive_count_expectation = (included * Frac{1, 2}).value();
    return demo;
}

// ---------------------------------------------------------------------------
// rho2: conditional expectations over the multinomial of the "extra" draws.

namespace {

// C(o + n - 1, n - 1) without overflow; saturates at 2^63-1.
std::uint64_t composition_count(std::uint64_t o, std::uint64_t n) {
    const std::uint64_t cap = std::numeric_limits<std::int64_t>::max();
    long double c = 1.0L;
    for (std::uint64_t i = 1; i < n; ++i) {
        c *= static_cast<long double>(o + i) / static_cast<long double>(i);
        if (c > static_cast<long double>(cap)) return cap;
    }
    return static_cast<std::uint64_t>(c + 0.5L);
}

struct Rho2Accumulator {
    std::size_t n;
    std::vector<double> numerators;  // per part j: E[(1+m_j)/prod(1+m_h)]
    double denominator = 0.0;        // E[1/prod(1+m_h)]

    explicit Rho2Accumulator(std::size_t parts) : n(parts), numerators(parts, 0.0) {}

    void add(std::span<const std::uint64_t> m, double probability_weight) {
        double inv_prod = 1.0;
        for (std::size_t h = 0; h < n; ++h) inv_prod /= static_cast<double>(1 + m[h]);
        const double base = probability_weight * inv_prod;
        denominator += base;
        for (std::size_t j = 0; j < n; ++j) {
            numerators[j] += base * static_cast<double>(1 + m[j]);
        }
    }
};

void enumerate_compositions(std::uint64_t o, std::span<const double> log_p,
                            std::span<const double> log_fact, Rho2Accumulator& acc) {
    const std::size_t n = log_p.size();
    std::vector<std::uint64_t> m(n, 0);
    const double log_total = log_fact[o];
    auto recurse = [&](auto&& self, std::size_t part, std::uint64_t remaining,
                       double log_partial) -> void {
        if (part + 1 == n) {
            m[part] = remaining;
            const double log_coef = log_partial + remaining * log_p[part] - log_fact[remaining];
            acc.add(m, std::exp(log_total + log_coef));
            return;
        }
        for (std::uint64_t v = 0; v <= remaining; ++v) {
            m[part] = v;
            self(self, part + 1, remaining - v, log_partial + v * log_p[part] - log_fact[v]);
        }
    };
    recurse(recurse, 0, o, 0.0);
}

void sample_compositions(std::uint64_t o, std::span<const double> p, const Rho2Options& options,
                         Rho2Accumulator& acc) {
    const std::size_t n = p.size();
    std::vector<double> cumulative(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += p[i];
        cumulative[i] = sum;
    }
    SplitMix64 rng(options.monte_carlo_seed);
    std::vector<std::uint64_t> m(n);
    for (std::uint64_t draw = 0; draw < options.monte_carlo_draws; ++draw) {
        std::fill(m.begin(), m.end(), 0);
        for (std::uint64_t t = 0; t < o; ++t) {
            const double target = rng.next_unit() * sum;
            const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
            m[std::min<std::size_t>(it - cumulative.begin(), n - 1)]++;
        }
        acc.add(m, 1.0);
    }
}

}  // namespace

std::optional<AdjustedSelectivityMap> rho2(const ReplacementSample& sample,
                                           const Rho2Options& options) {
    if (sample.rule == StopRule::wsrc) {
        throw std::invalid_argument("rho2 is defined for wsr and wsrd samples");
    }
    if (sample.counts.empty()) throw std::invalid_argument("empty replacement sample");
    if (sample.rule == StopRule::wsrd && !sample.exhausted &&
        sample.counts.size() != static_cast<std::size_t>(sample.k)) {
        throw std::invalid_argument("wsrd sample must hold exactly k distinct keys");
    }

    const std::size_t n = sample.counts.size();
    const std::uint64_t total = sample.total;
    const std::uint64_t o = total - n;  // extra draws beyond one per distinct key

    Rho2Accumulator acc(n);
    if (composition_count(o, n) <= options.enumeration_budget) {
        std::vector<double> log_p(n);
        double weight_sum = 0.0;
        for (const auto& c : sample.counts) weight_sum += c.weight;
        for (std::size_t i = 0; i < n; ++i) {
            log_p[i] = std::log(sample.counts[i].weight / weight_sum);
        }
        std::vector<double> log_fact(o + 1, 0.0);
        for (std::uint64_t i = 2; i <= o; ++i) {
            log_fact[i] = log_fact[i - 1] + std::log(static_cast<double>(i));
        }
        enumerate_compositions(o, log_p, log_fact, acc);
    } else if (options.allow_monte_carlo) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = sample.counts[i].weight;
        sample_compositions(o, p, options, acc);
    } else {
        return std::nullopt;
    }

    AdjustedSelectivityMap map;
    map.items.reserve(n);
    const double t_total = static_cast<double>(total);
    for (std::size_t j = 0; j < n; ++j) {
        map.items.emplace_back(sample.counts[j].key_id,
                               acc.numerators[j] / acc.denominator / t_total);
    }
    map.index.reserve(n);
    for (const auto& [id, rho] : map.items) map.index.emplace(id, rho);
    return map;
}

}  // namespace coordsketch
