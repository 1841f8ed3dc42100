#include "coordsketch/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "coordsketch/rank.hpp"

namespace coordsketch {

std::string DatasetSpec::to_string() const {
    std::string out = generator + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out += ",";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", params[i]);
        out += buf;
    }
    out += ")";
    return out;
}

DatasetSpec parse_dataset_spec(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw std::invalid_argument("bad dataset spec (want name(p1,p2,...)): " + text);
    }
    DatasetSpec spec;
    spec.generator = text.substr(0, open);
    std::string args = text.substr(open + 1, close - open - 1);
    std::size_t pos = 0;
    while (pos < args.size()) {
        auto comma = args.find(',', pos);
        if (comma == std::string::npos) comma = args.size();
        const std::string token = args.substr(pos, comma - pos);
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end == token.c_str()) throw std::invalid_argument("bad dataset parameter: " + token);
        spec.params.push_back(v);
        pos = comma + 1;
    }
    return spec;
}

namespace {

struct WeightModel {
    bool uniform = true;
    double pareto_alpha = 1.0;

    static WeightModel parse(const std::string& text) {
        WeightModel model;
        if (text == "uniform") return model;
        if (text.rfind("pareto:", 0) == 0) {
            model.uniform = false;
            model.pareto_alpha = std::strtod(text.c_str() + 7, nullptr);
            if (!(model.pareto_alpha > 0.0)) {
                throw std::invalid_argument("pareto alpha must be positive");
            }
            return model;
        }
        throw std::invalid_argument("unknown weight model: " + text);
    }

    double weight_of(std::uint64_t key_id, std::uint64_t seed) const {
        if (uniform) return 1.0;
        const double u = detail::unit_open(detail::mix64(detail::mix64(seed ^ 0x77e1) ^ key_id));
        return std::pow(1.0 - u, -1.0 / pareto_alpha);  // Pareto with minimum 1
    }
};

AttrsPtr label_attrs(std::uint64_t id) {
    // ten cached label records; keys only differ in which they share
    static const std::vector<AttrsPtr> cache = [] {
        std::vector<AttrsPtr> labels;
        for (int i = 0; i < 10; ++i) {
            labels.push_back(
                std::make_shared<const Attrs>(Attrs{{"label", std::to_string(i)}}));
        }
        return labels;
    }();
    return cache[id % 10];
}

void add_keys(WeightedSetCollection& coll, std::uint64_t first_id, std::uint64_t count,
              const WeightModel& weights, std::uint64_t seed) {
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t id = first_id + i;
        coll.add_key(Key{id, weights.weight_of(id, seed), label_attrs(id)});
    }
}

void add_range(WeightedSetCollection& coll, const SetId& set, std::uint64_t first,
               std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) coll.add_member(set, first + i);
}

std::uint64_t param_count(const DatasetSpec& spec, std::size_t idx) {
    if (idx >= spec.params.size()) {
        throw std::invalid_argument("dataset spec " + spec.generator + " missing parameter " +
                                    std::to_string(idx + 1));
    }
    const double v = spec.params[idx];
    if (!(v >= 0.0) || v != std::floor(v)) {
        throw std::invalid_argument("dataset parameter must be a nonnegative integer");
    }
    return static_cast<std::uint64_t>(v);
}

}  // namespace

WeightedSetCollection gen_dataset(const DatasetSpec& spec) {
    const WeightModel weights = WeightModel::parse(spec.weights);
    WeightedSetCollection coll;

    if (spec.generator == "pair") {
        const std::uint64_t n = param_count(spec, 0);
        const std::uint64_t overlap = param_count(spec, 1);
        if (overlap > n) throw std::invalid_argument("pair: overlap exceeds set size");
        if (n == 0) throw std::invalid_argument("pair: empty sets");
        const std::uint64_t total = 2 * n - overlap;
        add_keys(coll, 1, total, weights, spec.seed);
        // A1 = [1, n]; A2 = [n-overlap+1, 2n-overlap]
        add_range(coll, "A1", 1, n);
        add_range(coll, "A2", n - overlap + 1, n);
        return coll;
    }

    if (spec.generator == "shared_core" || spec.generator == "heavy_overlap") {
        const std::uint64_t sets = param_count(spec, 0);
        const std::uint64_t core = param_count(spec, 1);
        const std::uint64_t exclusive = param_count(spec, 2);
        if (sets == 0 || core + exclusive == 0) {
            throw std::invalid_argument(spec.generator + ": empty sets");
        }
        add_keys(coll, 1, core + sets * exclusive, weights, spec.seed);
        for (std::uint64_t s = 0; s < sets; ++s) {
            const SetId id = "A" + std::to_string(s + 1);
            add_range(coll, id, 1, core);
            add_range(coll, id, core + s * exclusive + 1, exclusive);
        }
        return coll;
    }

    if (spec.generator == "disjoint") {
        const std::uint64_t sets = param_count(spec, 0);
        const std::uint64_t size = param_count(spec, 1);
        if (sets == 0 || size == 0) throw std::invalid_argument("disjoint: empty sets");
        add_keys(coll, 1, sets * size, weights, spec.seed);
        for (std::uint64_t s = 0; s < sets; ++s) {
            add_range(coll, "A" + std::to_string(s + 1), s * size + 1, size);
        }
        return coll;
    }

    if (spec.generator == "heterogeneous") {
        const std::uint64_t sets = param_count(spec, 0);
        const std::uint64_t universe = param_count(spec, 1);
        const std::uint64_t base = param_count(spec, 2);
        if (sets == 0 || universe == 0 || base == 0) {
            throw std::invalid_argument("heterogeneous: empty sets");
        }
        add_keys(coll, 1, universe, weights, spec.seed);
        for (std::uint64_t s = 0; s < sets; ++s) {
            // Pareto(alpha=1) set sizes, capped at half the universe
            SplitMix64 rng(detail::mix64(spec.seed ^ 0x48e7) ^ s);
            const double u = rng.next_unit();
            std::uint64_t size = static_cast<std::uint64_t>(
                std::min<double>(static_cast<double>(universe) / 2.0, base / u));
            size = std::max<std::uint64_t>(size, base);
            // Floyd's algorithm over [1, universe]
            std::unordered_set<std::uint64_t> chosen;
            for (std::uint64_t j = universe - size; j < universe; ++j) {
                const std::uint64_t t = 1 + rng.next_below(j + 1);
                if (!chosen.insert(t).second) chosen.insert(j + 1);
            }
            const SetId id = "A" + std::to_string(s + 1);
            std::vector<std::uint64_t> members(chosen.begin(), chosen.end());
            std::sort(members.begin(), members.end());
            for (std::uint64_t key_id : members) coll.add_member(id, key_id);
        }
        return coll;
    }

    throw std::invalid_argument("unknown dataset generator: " + spec.generator);
}

double oracle_weight(const WeightedSetCollection& collection, const Predicate& pred) {
    // membership straight from the collection, never via sketches
    std::unordered_map<std::uint64_t, std::unordered_set<std::size_t>> member_sets;
    std::vector<SetId> set_ids = collection.set_ids();
    std::unordered_map<std::string, std::size_t> set_pos;
    for (std::size_t s = 0; s < set_ids.size(); ++s) set_pos.emplace(set_ids[s], s);
    const auto ground = collection.ground();
    for (std::size_t s = 0; s < set_ids.size(); ++s) {
        for (std::size_t idx : collection.members(set_ids[s])) {
            member_sets[ground[idx].id].insert(s);
        }
    }

    double total = 0.0;
    for (const Key& key : ground) {
        const auto it = member_sets.find(key.id);
        PredicateContext ctx;
        ctx.key_id = key.id;
        ctx.weight = key.weight;
        ctx.attrs = &key.attrs;
        ctx.membership = [&](const SetId& set_id) {
            const auto pos = set_pos.find(set_id);
            if (pos == set_pos.end()) {
                throw std::invalid_argument("predicate references unknown set " + set_id);
            }
            const bool in = it != member_sets.end() && it->second.contains(pos->second);
            return in ? Membership::in : Membership::out;
        };
        if (pred.eval_bool(ctx)) total += key.weight;
    }
    return total;
}

}  // namespace coordsketch
