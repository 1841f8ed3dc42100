#include "coordsketch/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <unordered_set>

#include "coordsketch/combine.hpp"
#include "coordsketch/estimate_ml.hpp"
#include "coordsketch/estimate_rc.hpp"
#include "coordsketch/estimate_sel.hpp"
#include "coordsketch/io.hpp"
#include "coordsketch/poisson.hpp"
#include "coordsketch/sketch.hpp"

namespace coordsketch {

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(pos, comma - pos);
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first != std::string::npos) items.push_back(item.substr(first, last - first + 1));
        pos = comma + 1;
    }
    return items;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
    ExperimentConfig cfg;
    bool have_dataset = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "dataset") {
            cfg.dataset = parse_dataset_spec(value);
            have_dataset = true;
        } else if (key == "weights") {
            cfg.dataset.weights = value;
        } else if (key == "dataset_seed") {
            cfg.dataset.seed = std::stoull(value);
        } else if (key == "family") {
            cfg.family = rank_family_from_string(value);
        } else if (key == "k") {
            cfg.ks.clear();
            for (const std::string& item : split_list(value)) cfg.ks.push_back(std::stoi(item));
        } else if (key == "repetitions") {
            cfg.repetitions = std::stoi(value);
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "sets") {
            cfg.sets = split_list(value);
        } else if (key == "estimators") {
            cfg.estimators = split_list(value);
        } else if (key == "aggregates") {
            cfg.aggregates = split_list(value);
        } else if (key == "output") {
            cfg.output = value;
        } else if (key == "threads") {
            cfg.threads = std::stoi(value);
        } else {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key " + key);
        }
    }
    if (!have_dataset) throw std::invalid_argument("config missing dataset");
    if (cfg.ks.empty()) throw std::invalid_argument("config missing k");
    if (cfg.estimators.empty()) throw std::invalid_argument("config missing estimators");
    if (cfg.aggregates.empty()) throw std::invalid_argument("config missing aggregates");
    if (cfg.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    return parse(in);
}

namespace {

enum class AggregateKind { weight_union, weight_intersection, jaccard, hamming, predicate };

struct AggregateSpec {
    std::string name;
    AggregateKind kind;
    std::vector<SetId> scope;
    Predicate pred;  // union/intersection/predicate: the weight predicate
    double truth = 0.0;
};

Predicate union_pred(std::span<const SetId> sets) {
    Predicate p = Predicate::in_set(sets[0]);
    for (std::size_t i = 1; i < sets.size(); ++i) p = p || Predicate::in_set(sets[i]);
    return p;
}

Predicate intersection_pred(std::span<const SetId> sets) {
    Predicate p = Predicate::in_set(sets[0]);
    for (std::size_t i = 1; i < sets.size(); ++i) p = p && Predicate::in_set(sets[i]);
    return p;
}

AggregateSpec make_aggregate(const std::string& name, std::span<const SetId> scope,
                             const WeightedSetCollection& collection) {
    if (name == "union") {
        AggregateSpec agg{name, AggregateKind::weight_union, {scope.begin(), scope.end()},
                          union_pred(scope)};
        agg.truth = oracle_weight(collection, agg.pred);
        return agg;
    }
    if (name == "intersection") {
        AggregateSpec agg{name, AggregateKind::weight_intersection,
                          {scope.begin(), scope.end()}, intersection_pred(scope)};
        agg.truth = oracle_weight(collection, agg.pred);
        return agg;
    }
    if (name == "jaccard" || name == "hamming") {
        if (scope.size() != 2) {
            throw std::invalid_argument(name + " aggregate requires exactly two sets in scope");
        }
        AggregateSpec agg{name,
                          name == "jaccard" ? AggregateKind::jaccard : AggregateKind::hamming,
                          {scope.begin(), scope.end()},
                          union_pred(scope)};
        const double u = oracle_weight(collection, union_pred(scope));
        const double i = oracle_weight(collection, intersection_pred(scope));
        agg.truth = name == "jaccard" ? (u > 0.0 ? i / u : 0.0) : u - i;
        return agg;
    }
    if (name.rfind("predicate:", 0) == 0) {
        Predicate pred = Predicate::parse(name.substr(10));
        AggregateSpec agg{name, AggregateKind::predicate, pred.relevant_sets(), pred};
        agg.truth = oracle_weight(collection, agg.pred);
        return agg;
    }
    throw std::invalid_argument("unknown aggregate: " + name);
}

// Static applicability of an estimator to an aggregate under the config.
bool estimator_applicable(const std::string& estimator, const AggregateSpec& agg,
                          const ExperimentConfig& cfg) {
    const bool uniform = cfg.dataset.weights == "uniform";
    const bool ws = cfg.family == RankFamily::ws;
    const bool pairwise = agg.scope.size() == 2;
    switch (agg.kind) {
        case AggregateKind::weight_union:
            if (estimator == "rc_union" || estimator == "rc_scs" || estimator == "rc_lcs" ||
                estimator == "poisson_scs" || estimator == "poisson_lcs") {
                return true;
            }
            if (estimator == "ml_scs" || estimator == "lcs_known") return ws;
            if (estimator == "ml_known") return ws && pairwise;
            return false;
        case AggregateKind::weight_intersection:
            if (estimator == "rc_union" || estimator == "rc_scs" || estimator == "poisson_scs") {
                return true;
            }
            if (estimator == "ml_scs") return ws;
            if (estimator == "ml_known") return ws && pairwise;
            return false;
        case AggregateKind::jaccard:
            if (estimator == "sel_union" || estimator == "sel_scs") return uniform;
            if (estimator == "rc_ratio") return true;
            if (estimator == "ml_known") return ws;
            return false;
        case AggregateKind::hamming:
            return estimator == "rc_comb" || estimator == "rc_union";
        case AggregateKind::predicate: {
            const bool lcs_ok = agg.pred.lcs_applicable();
            if (estimator == "rc_union" || estimator == "rc_scs") return true;
            if (estimator == "rc_lcs") return lcs_ok;
            if (estimator == "poisson_scs") return agg.pred.attribute_free();
            if (estimator == "poisson_lcs") return lcs_ok && agg.pred.attribute_free();
            if (estimator == "ml_scs") return ws;
            return false;
        }
    }
    return false;
}

// Evaluates a membership-only predicate over the keys kept by the Poisson
// SCS-like rule (full membership knowledge below tau_S).
double poisson_predicate_estimate(const std::map<SetId, PoissonSample>& samples,
                                  const AdjustedWeightMap& weights, const Predicate& pred) {
    std::map<SetId, std::unordered_set<std::uint64_t>> members;
    for (const auto& [id, sample] : samples) {
        auto& set = members[id];
        for (const PoissonEntry& entry : sample.entries) set.insert(entry.key_id);
    }
    double sum = 0.0;
    for (const auto& [key_id, a] : weights.items) {
        PredicateContext ctx;
        ctx.key_id = key_id;
        ctx.membership = [&members, key_id = key_id](const SetId& set_id) {
            auto it = members.find(set_id);
            if (it == members.end()) {
                throw std::invalid_argument("predicate references unsampled set " + set_id);
            }
            return it->second.contains(key_id) ? Membership::in : Membership::out;
        };
        if (pred.eval_bool(ctx)) sum += a;
    }
    return sum;
}

// Per-repetition combination cache over one scope.
struct RepCombos {
    const std::map<SetId, BottomKSketch>* sketches = nullptr;
    std::span<const SetId> scope;
    std::optional<Combination> union_combo, scs_combo, lcs_combo;

    const Combination& get(CombinationKind kind) {
        auto& slot = kind == CombinationKind::union_sketch ? union_combo
                     : kind == CombinationKind::scs        ? scs_combo
                                                           : lcs_combo;
        if (!slot) slot = build_combination(kind, *sketches, scope);
        return *slot;
    }
};

struct RepOutcome {
    double estimate = 0.0;
    double size = 0.0;
};

RepOutcome apply_estimator(const std::string& estimator, const AggregateSpec& agg,
                           RepCombos& combos, const std::map<SetId, BottomKSketch>& sketches,
                           const std::map<SetId, PoissonSample>* poisson,
                           const std::map<SetId, double>& known_weights) {
    const auto weight_estimate = [&](CombinationKind kind) {
        const Combination& combo = combos.get(kind);
        const AdjustedWeightMap weights = rc_adjusted_weights(combo);
        double sum = 0.0;
        for (std::size_t i = 0; i < combo.size(); ++i) {
            const Tri v = agg.pred.eval(entry_context(combo, i));
            if (v == Tri::u) throw std::logic_error("unknown membership in runner");
            if (v == Tri::t) sum += weights.items[i].second;
        }
        return RepOutcome{sum, static_cast<double>(combo.size())};
    };

    const auto selectivity_estimate = [&](CombinationKind kind) {
        const Combination& combo = combos.get(kind);
        const AdjustedSelectivityMap rho = rho_scs_uniform(combo);
        const Predicate inter = intersection_pred(agg.scope);
        double sum = 0.0;
        for (std::size_t i = 0; i < combo.size(); ++i) {
            if (inter.eval_bool(entry_context(combo, i))) sum += rho.items[i].second;
        }
        return RepOutcome{sum, static_cast<double>(combo.size())};
    };

    if (estimator == "rc_union") {
        if (agg.kind == AggregateKind::hamming) {
            const Combination& combo = combos.get(CombinationKind::union_sketch);
            const AdjustedWeightMap weights = rc_adjusted_weights(combo);
            const Predicate inter = intersection_pred(agg.scope);
            double u = 0.0, i = 0.0;
            for (std::size_t e = 0; e < combo.size(); ++e) {
                u += weights.items[e].second;  // every union-sketch entry is in the union
                if (inter.eval_bool(entry_context(combo, e))) i += weights.items[e].second;
            }
            return RepOutcome{std::max(0.0, u - i), static_cast<double>(combo.size())};
        }
        return weight_estimate(CombinationKind::union_sketch);
    }
    if (estimator == "rc_scs") return weight_estimate(CombinationKind::scs);
    if (estimator == "rc_lcs") return weight_estimate(CombinationKind::lcs);
    if (estimator == "sel_union") return selectivity_estimate(CombinationKind::union_sketch);
    if (estimator == "sel_scs") return selectivity_estimate(CombinationKind::scs);
    if (estimator == "rc_ratio" || estimator == "rc_comb") {
        const PairAggregates pair = derived_aggregates(sketches, agg.scope[0], agg.scope[1]);
        const double size = static_cast<double>(combos.get(CombinationKind::lcs).size());
        if (estimator == "rc_ratio") return RepOutcome{pair.jaccard.value_or(0.0), size};
        return RepOutcome{pair.hamming, size};
    }
    if (estimator == "ml_scs") {
        const Combination& combo = combos.get(CombinationKind::scs);
        const double est = agg.kind == AggregateKind::weight_union
                               ? ml_union_scs(combo)
                               : ml_subpop_scs(combo, agg.pred);
        return RepOutcome{est, static_cast<double>(combo.size())};
    }
    if (estimator == "ml_known") {
        const Combination& combo = combos.get(CombinationKind::scs);
        const MlIntersectionResult r = ml_intersection_known_weights(
            combo, known_weights.at(agg.scope[0]), known_weights.at(agg.scope[1]));
        double est = r.intersection;
        if (agg.kind == AggregateKind::weight_union) est = r.union_weight;
        if (agg.kind == AggregateKind::jaccard) est = r.resemblance;
        return RepOutcome{est, static_cast<double>(combo.size())};
    }
    if (estimator == "lcs_known") {
        std::map<SetId, BottomKSketch> scoped;
        for (const SetId& id : agg.scope) scoped.emplace(id, sketches.at(id));
        const double est = lcs_union_known_weights(scoped, known_weights);
        return RepOutcome{est, static_cast<double>(combos.get(CombinationKind::lcs).size())};
    }
    if (estimator == "poisson_scs" || estimator == "poisson_lcs") {
        if (!poisson) throw std::logic_error("poisson samples not built");
        std::map<SetId, PoissonSample> scoped;
        for (const SetId& id : agg.scope) scoped.emplace(id, poisson->at(id));
        if (estimator == "poisson_lcs") {
            const AdjustedWeightMap weights = poisson_lcs_like_weights(scoped);
            return RepOutcome{weights.total(), static_cast<double>(weights.items.size())};
        }
        const AdjustedWeightMap weights = poisson_scs_like_weights(scoped);
        const double est = agg.kind == AggregateKind::weight_union
                               ? weights.total()
                               : poisson_predicate_estimate(scoped, weights, agg.pred);
        return RepOutcome{est, static_cast<double>(weights.items.size())};
    }
    throw std::invalid_argument("unknown estimator: " + estimator);
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    const WeightedSetCollection collection = gen_dataset(cfg.dataset);

    std::vector<SetId> scope = cfg.sets.empty() ? collection.set_ids() : cfg.sets;
    for (const SetId& id : scope) {
        if (!collection.has_set(id)) throw std::invalid_argument("unknown set in scope: " + id);
    }

    std::vector<AggregateSpec> aggregates;
    for (const std::string& name : cfg.aggregates) {
        aggregates.push_back(make_aggregate(name, scope, collection));
    }

    // sketches are built for the union of all aggregate scopes
    std::vector<SetId> sketch_sets = scope;
    for (const AggregateSpec& agg : aggregates) {
        for (const SetId& id : agg.scope) {
            if (!collection.has_set(id)) {
                throw std::invalid_argument("predicate references unknown set " + id);
            }
            if (std::find(sketch_sets.begin(), sketch_sets.end(), id) == sketch_sets.end()) {
                sketch_sets.push_back(id);
            }
        }
    }

    const bool need_poisson =
        std::any_of(cfg.estimators.begin(), cfg.estimators.end(),
                    [](const std::string& e) { return e.rfind("poisson", 0) == 0; });
    const bool need_known =
        std::any_of(cfg.estimators.begin(), cfg.estimators.end(), [](const std::string& e) {
            return e == "ml_known" || e == "lcs_known";
        });

    std::map<SetId, double> known_weights;
    if (need_known) {
        for (const SetId& id : sketch_sets) known_weights[id] = collection.set_weight(id);
    }

    std::vector<ResultRow> rows;
    const std::size_t reps = static_cast<std::size_t>(cfg.repetitions);

    for (int k : cfg.ks) {
        if (k < 1) throw std::invalid_argument("k must be >= 1");

        std::map<SetId, double> taus;
        if (need_poisson) {
            std::vector<Key> buffer;
            for (const SetId& id : sketch_sets) {
                buffer.clear();
                for (std::size_t idx : collection.members(id)) {
                    buffer.push_back(collection.ground()[idx]);
                }
                taus[id] = solve_tau_for_expected_size(buffer, cfg.family, k);
            }
        }

        // (aggregate, estimator) pairs that actually run
        struct Cell {
            std::size_t agg;
            std::string estimator;
            std::vector<double> estimates;
            std::vector<double> sizes;
        };
        std::vector<Cell> cells;
        for (std::size_t a = 0; a < aggregates.size(); ++a) {
            for (const std::string& est : cfg.estimators) {
                if (estimator_applicable(est, aggregates[a], cfg)) {
                    cells.push_back({a, est, std::vector<double>(reps), std::vector<double>(reps)});
                } else {
                    ResultRow row;
                    row.dataset = cfg.dataset.to_string();
                    row.aggregate = aggregates[a].name;
                    row.estimator = est;
                    row.family = to_string(cfg.family);
                    row.k = k;
                    row.repetitions = cfg.repetitions;
                    row.truth = aggregates[a].truth;
                    row.applicable = false;
                    rows.push_back(std::move(row));
                }
            }
        }

        const auto run_range = [&](std::size_t begin, std::size_t end) {
            for (std::size_t rep = begin; rep < end; ++rep) {
                const std::uint64_t rep_seed = cfg.seed + rep;
                std::map<SetId, BottomKSketch> sketches;
                {
                    const RankAssignment assignment{cfg.family, rep_seed};
                    std::vector<Key> buffer;
                    for (const SetId& id : sketch_sets) {
                        buffer.clear();
                        for (std::size_t idx : collection.members(id)) {
                            buffer.push_back(collection.ground()[idx]);
                        }
                        sketches.emplace(id, build_bottom_k(id, buffer, assignment, k));
                    }
                }
                std::map<SetId, PoissonSample> poisson;
                if (need_poisson) {
                    poisson = build_coordinated_poisson(collection, cfg.family, rep_seed, taus);
                }
                std::vector<RepCombos> combo_cache(aggregates.size());
                for (std::size_t a = 0; a < aggregates.size(); ++a) {
                    combo_cache[a].sketches = &sketches;
                    combo_cache[a].scope = aggregates[a].scope;
                }
                for (Cell& cell : cells) {
                    const RepOutcome out =
                        apply_estimator(cell.estimator, aggregates[cell.agg], combo_cache[cell.agg],
                                        sketches, need_poisson ? &poisson : nullptr, known_weights);
                    cell.estimates[rep] = out.estimate;
                    cell.sizes[rep] = out.size;
                }
            }
        };

        std::size_t thread_count = cfg.threads > 0
                                       ? static_cast<std::size_t>(cfg.threads)
                                       : std::max<std::size_t>(1, std::thread::hardware_concurrency());
        thread_count = std::min(thread_count, reps);
        if (thread_count <= 1) {
            run_range(0, reps);
        } else {
            std::vector<std::thread> workers;
            const std::size_t chunk = (reps + thread_count - 1) / thread_count;
            for (std::size_t t = 0; t < thread_count; ++t) {
                const std::size_t begin = t * chunk;
                const std::size_t end = std::min(reps, begin + chunk);
                if (begin < end) workers.emplace_back(run_range, begin, end);
            }
            for (std::thread& worker : workers) worker.join();
        }

        for (const Cell& cell : cells) {
            const AggregateSpec& agg = aggregates[cell.agg];
            ResultRow row;
            row.dataset = cfg.dataset.to_string();
            row.aggregate = agg.name;
            row.estimator = cell.estimator;
            row.family = to_string(cfg.family);
            row.k = k;
            row.repetitions = cfg.repetitions;
            row.truth = agg.truth;

            const double n = static_cast<double>(reps);
            double mean = 0.0;
            for (double e : cell.estimates) mean += e;
            mean /= n;
            double var = 0.0;
            for (double e : cell.estimates) var += (e - mean) * (e - mean);
            var = reps > 1 ? var / (n - 1.0) : 0.0;

            double mre = 0.0, mre_sq = 0.0, size_mean = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                const double rel =
                    agg.truth != 0.0 ? std::abs(cell.estimates[r] - agg.truth) / agg.truth
                                     : std::numeric_limits<double>::quiet_NaN();
                mre += rel;
                mre_sq += rel * rel;
                size_mean += cell.sizes[r];
            }
            mre /= n;
            mre_sq /= n;
            size_mean /= n;

            row.mean_estimate = mean;
            row.est_se = reps > 1 ? std::sqrt(var / n) : 0.0;
            row.mean_relative_error = mre;
            row.rel_err_se = reps > 1 ? std::sqrt(std::max(0.0, mre_sq - mre * mre) / (n - 1.0)) : 0.0;
            row.empirical_variance = var;
            row.mean_combination_size = size_mean;
            rows.push_back(std::move(row));
        }
    }

    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.dataset, a.aggregate, a.estimator, a.family, a.k) <
               std::tie(b.dataset, b.aggregate, b.estimator, b.family, b.k);
    });
    return rows;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string format_plain(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

}  // namespace

void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kResultSchema << '\n';
    out << "dataset,aggregate,estimator,family,k,repetitions,truth,mean_estimate,est_se,"
           "mean_relative_error,rel_err_se,empirical_variance,mean_combination_size,status\n";
    for (const ResultRow& row : rows) {
        out << csv_quote(row.dataset) << ',' << csv_quote(row.aggregate) << ','
            << row.estimator << ',' << row.family << ',' << row.k << ',' << row.repetitions << ','
            << format_plain(row.truth) << ',' << format_hex(row.mean_estimate) << ','
            << format_hex(row.est_se) << ',' << format_hex(row.mean_relative_error) << ','
            << format_hex(row.rel_err_se) << ',' << format_hex(row.empirical_variance) << ','
            << format_hex(row.mean_combination_size) << ','
            << (row.applicable ? "ok" : "inapplicable") << '\n';
    }
}

std::vector<ResultRow> read_result_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kResultSchema) {
        throw std::invalid_argument("unrecognized result CSV schema");
    }
    std::getline(in, line);  // header
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = csv_split(line);
        if (fields.size() != 14) throw std::invalid_argument("bad result row: " + line);
        ResultRow row;
        row.dataset = fields[0];
        row.aggregate = fields[1];
        row.estimator = fields[2];
        row.family = fields[3];
        row.k = std::stoi(fields[4]);
        row.repetitions = std::stoi(fields[5]);
        row.truth = parse_double(fields[6]);
        row.mean_estimate = parse_double(fields[7]);
        row.est_se = parse_double(fields[8]);
        row.mean_relative_error = parse_double(fields[9]);
        row.rel_err_se = parse_double(fields[10]);
        row.empirical_variance = parse_double(fields[11]);
        row.mean_combination_size = parse_double(fields[12]);
        row.applicable = fields[13] == "ok";
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ReportRow> summarize(const std::vector<ResultRow>& rows) {
    struct GroupKey {
        std::string dataset, aggregate, family;
        int k;
        auto operator<=>(const GroupKey&) const = default;
    };
    std::map<GroupKey, std::vector<const ResultRow*>> groups;
    for (const ResultRow& row : rows) {
        if (!row.applicable) continue;
        groups[{row.dataset, row.aggregate, row.family, row.k}].push_back(&row);
    }
    if (groups.empty()) throw std::invalid_argument("no applicable rows to summarize");

    std::vector<ReportRow> report;
    for (const auto& [key, members] : groups) {
        const ResultRow* baseline = nullptr;
        for (const ResultRow* row : members) {
            if (row->estimator == "rc_union") baseline = row;
        }
        if (!baseline) {
            for (const ResultRow* row : members) {
                if (row->estimator == "sel_union") baseline = row;
            }
        }
        if (!baseline) {
            throw std::invalid_argument("no union-sketch baseline for " + key.dataset + "/" +
                                        key.aggregate + "/k=" + std::to_string(key.k));
        }
        for (const ResultRow* row : members) {
            ReportRow r;
            r.dataset = key.dataset;
            r.aggregate = key.aggregate;
            r.family = key.family;
            r.k = key.k;
            r.estimator = row->estimator;
            if (row == baseline) {
                r.improvement_factor = 1.0;
                r.predicted_factor = 1.0;
                r.variance_ratio = 1.0;
                r.variance_ordering = "baseline";
            } else {
                r.improvement_factor = baseline->mean_relative_error / row->mean_relative_error;
                r.predicted_factor =
                    std::sqrt(row->mean_combination_size / baseline->mean_combination_size);
                r.variance_ratio = row->empirical_variance / baseline->empirical_variance;
                r.variance_ordering =
                    row->empirical_variance <= baseline->empirical_variance ? "ok" : "violated";
            }
            report.push_back(std::move(r));
        }
    }
    return report;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << kReportSchema << '\n';
    out << "dataset,aggregate,family,k,estimator,improvement_factor,predicted_factor,"
           "variance_ratio,variance_ordering\n";
    for (const ReportRow& row : rows) {
        out << csv_quote(row.dataset) << ',' << csv_quote(row.aggregate) << ',' << row.family
            << ',' << row.k << ',' << row.estimator << ',' << format_plain(row.improvement_factor)
            << ',' << format_plain(row.predicted_factor) << ','
            << format_plain(row.variance_ratio) << ',' << row.variance_ordering << '\n';
    }
}

}  // namespace coordsketch
