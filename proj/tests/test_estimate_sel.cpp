#include <doctest.h>

#include <cmath>
#include <map>

#include "coordsketch/estimate_sel.hpp"
#include "coordsketch/sketch.hpp"
#include "fixtures.hpp"

using namespace coordsketch;

namespace {

std::map<std::uint64_t, std::uint64_t> count_map(const ReplacementSample& sample) {
    std::map<std::uint64_t, std::uint64_t> out;
    for (const auto& c : sample.counts) out[c.key_id] = c.multiplicity;
    return out;
}

ReplacementSample make_sample(StopRule rule, int k,
                              std::initializer_list<std::pair<std::uint64_t, std::uint64_t>> counts,
                              std::initializer_list<double> weights) {
    ReplacementSample sample;
    sample.rule = rule;
    sample.k = k;
    auto w = weights.begin();
    for (const auto& [id, mult] : counts) {
        sample.counts.push_back({id, mult, *w++});
        sample.total += mult;
    }
    return sample;
}

}  // namespace

TEST_CASE("wsr over a singleton draws the same key k times") {
    const std::vector<Key> ground{{7, 3.0, nullptr}};
    const auto sample = draw_replacement_sample(ground, StopRule::wsr, 5, 42);
    CHECK(sample.total == 5);
    CHECK(count_map(sample) == std::map<std::uint64_t, std::uint64_t>{{7, 5}});
}

TEST_CASE("wsrd over two uniform keys with k=1 stops geometrically") {
    const std::vector<Key> ground{{1, 1.0, nullptr}, {2, 1.0, nullptr}};
    const std::size_t trials = 40000;
    double total_sum = 0.0;
    for (std::size_t seed = 0; seed < trials; ++seed) {
        const auto sample = draw_replacement_sample(ground, StopRule::wsrd, 1, seed);
        CHECK(sample.counts.size() == 1);
        CHECK(sample.total == sample.counts.front().multiplicity);
        total_sum += static_cast<double>(sample.total);
    }
    // total ~ Geometric(1/2) on {1,2,...}: mean 2
    CHECK(total_sum / trials == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("wsrd on an exhaustible ground sets the flag") {
    const std::vector<Key> ground{{1, 1.0, nullptr}, {2, 2.0, nullptr}};
    const auto sample = draw_replacement_sample(ground, StopRule::wsrd, 5, 3);
    CHECK(sample.exhausted);
    CHECK(sample.counts.size() == 2);  // full support returned
}

TEST_CASE("wsrc with a single set matches wsrd draw by draw") {
    WeightedSetCollection coll;
    for (std::uint64_t id = 1; id <= 12; ++id) coll.add_key(Key{id, 1.0 + (id % 3), nullptr});
    for (std::uint64_t id = 1; id <= 12; ++id) coll.add_member("A", id);
    const std::vector<SetId> sets{"A"};

    std::vector<Key> ground;
    for (const Key& key : coll.ground()) ground.push_back(key);

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto wsrc = draw_replacement_sample_wsrc(coll, sets, 4, seed);
        const auto wsrd = draw_replacement_sample(ground, StopRule::wsrd, 4, seed);
        CHECK(count_map(wsrc) == count_map(wsrd));
    }
}

TEST_CASE("rho1 arithmetic and normalization") {
    const auto sample =
        make_sample(StopRule::wsr, 4, {{1, 2}, {2, 1}, {3, 1}}, {1.0, 1.0, 1.0});
    const auto rho = rho1(sample);
    CHECK(rho.at(1) == 0.5);
    CHECK(rho.at(2) == 0.25);
    CHECK(rho.at(3) == 0.25);
    CHECK(rho.at(99) == 0.0);
    CHECK(rho.sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rho1 is unbiased under wsrd") {
    std::vector<Key> ground;
    for (std::uint64_t id = 1; id <= 6; ++id) ground.push_back(Key{id, static_cast<double>(id), nullptr});
    const double total_weight = 21.0;

    const std::size_t trials = 30000;
    fixtures::Accumulator acc;
    const std::uint64_t tracked = 4;
    for (std::size_t seed = 0; seed < trials; ++seed) {
        const auto sample = draw_replacement_sample(ground, StopRule::wsrd, 3, seed);
        acc.add(rho1(sample).at(tracked));
    }
    CHECK(std::abs(acc.mean() - 4.0 / total_weight) < 4.0 * acc.se());
}

TEST_CASE("the geometric series identity behind wsrd unbiasedness") {
    // sum_{t>=1} C(t+l-1, l-1) p^t (1-p)^l t/(t+l-1) = p, here l = 2, p = 0.3
    const double p = 0.3;
    const int l = 2;
    double sum = 0.0;
    for (int t = 1; t <= 200; ++t) {
        const double binom = static_cast<double>(t + l - 1);  // C(t+1, 1) = t+1
        sum += binom * std::pow(p, t) * std::pow(1 - p, l) * static_cast<double>(t) /
               static_cast<double>(t + l - 1);
    }
    CHECK(std::abs(sum - p) < 1e-12);
}

TEST_CASE("uniform scs selectivities") {
    WeightedSetCollection coll;  // unit-weight variant of the ten-key fixture
    for (std::uint64_t id = 1; id <= 10; ++id) coll.add_key(Key{id, 1.0, nullptr});
    for (std::uint64_t id : {1, 3, 5, 7, 9}) coll.add_member("A1", id);
    for (std::uint64_t id : {2, 5, 6, 9, 10}) coll.add_member("A2", id);
    for (std::uint64_t id : {3, 4, 5, 6, 7}) coll.add_member("A3", id);
    for (std::uint64_t id : {2, 4, 6, 8, 10}) coll.add_member("A4", id);
    const auto ranks = fixtures::ten_key_ranks();

    std::vector<BottomKSketch> all;
    for (const SetId& id : coll.set_ids()) {
        all.push_back(build_bottom_k_with(id, coll.set_keys(id), ranks, RankFamily::pri, 3));
    }
    const auto combo = scs(all);
    const auto rho = rho_scs_uniform(combo);
    CHECK(combo.size() == 6);
    for (const auto& [id, r] : rho.items) CHECK(r == doctest::Approx(1.0 / 6).epsilon(1e-15));
    CHECK(rho.sum() == doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("single set reduces to the classic 1/k rule") {
        const auto single = scs(std::vector<BottomKSketch>{all[0]});
        const auto rho_single = rho_scs_uniform(single);
        for (const auto& [id, r] : rho_single.items) CHECK(r == doctest::Approx(1.0 / 3));
    }

    SUBCASE("non-uniform weights are rejected") {
        const auto weighted = fixtures::ten_key_sketches();
        std::vector<BottomKSketch> two{weighted.at("A1"), weighted.at("A2")};
        CHECK_THROWS_AS(rho_scs_uniform(scs(two)), std::invalid_argument);
    }
}

TEST_CASE("scs jaccard estimator is unbiased on uniform weights") {
    WeightedSetCollection coll;
    for (std::uint64_t id = 1; id <= 30; ++id) coll.add_key(Key{id, 1.0, nullptr});
    for (std::uint64_t id = 1; id <= 20; ++id) coll.add_member("A", id);
    for (std::uint64_t id = 11; id <= 30; ++id) coll.add_member("B", id);
    const double true_jaccard = 10.0 / 30.0;

    const std::size_t trials = 30000;
    fixtures::Accumulator acc;
    for (std::size_t seed = 0; seed < trials; ++seed) {
        const auto sketches = build_coordinated(coll, RankFamily::ws, seed, 4);
        std::vector<BottomKSketch> two{sketches.at("A"), sketches.at("B")};
        const auto combo = scs(two);
        const auto rho = rho_scs_uniform(combo);
        double est = 0.0;
        for (std::size_t i = 0; i < combo.size(); ++i) {
            if (combo.membership_at(i, 0) == Membership::in &&
                combo.membership_at(i, 1) == Membership::in) {
                est += rho.items[i].second;
            }
        }
        acc.add(est);
    }
    CHECK(std::abs(acc.mean() - true_jaccard) < 4.0 * acc.se());
}

TEST_CASE("uniform scs selectivity variance identity") {
    // N^2 VAR[rho(i)] = N E[1/l] - 1, and at most N/k - 1
    WeightedSetCollection coll;
    const double n_keys = 30.0;
    for (std::uint64_t id = 1; id <= 30; ++id) coll.add_key(Key{id, 1.0, nullptr});
    for (std::uint64_t id = 1; id <= 20; ++id) coll.add_member("A", id);
    for (std::uint64_t id = 11; id <= 30; ++id) coll.add_member("B", id);
    const int k = 4;

    const std::size_t trials = 40000;
    fixtures::Accumulator rho_acc, inv_l_acc;
    for (std::size_t seed = 0; seed < trials; ++seed) {
        const auto sketches = build_coordinated(coll, RankFamily::ws, seed, k);
        std::vector<BottomKSketch> two{sketches.at("A"), sketches.at("B")};
        const auto combo = scs(two);
        const auto rho = rho_scs_uniform(combo);
        rho_acc.add(rho.at(7));
        inv_l_acc.add(1.0 / static_cast<double>(combo.size()));
    }
    const double lhs = n_keys * n_keys * rho_acc.variance();
    const double rhs = n_keys * inv_l_acc.mean() - 1.0;
    CHECK(lhs == doctest::Approx(rhs).epsilon(0.1));
    CHECK(lhs <= n_keys / k - 1.0);
}

TEST_CASE("the weighted jaccard bias demo") {
    const auto demo = jaccard_biased_demo();
    CHECK(demo.naive_expectation == 24.0 / 35.0);
    CHECK(demo.true_resemblance == 4.0 / 7.0);
    CHECK(demo.naive_count_expectation == 3.0 / 7.0);
    CHECK(demo.naive_expectation > demo.true_resemblance);
    CHECK(demo.naive_count_expectation < demo.true_resemblance);
}

TEST_CASE("rho2 degenerate cases give 1/k") {
    SUBCASE("wsr with k distinct keys") {
        const auto sample =
            make_sample(StopRule::wsr, 3, {{1, 1}, {2, 1}, {3, 1}}, {1.0, 5.0, 2.0});
        const auto rho = rho2(sample);
        REQUIRE(rho.has_value());
        for (const auto& [id, r] : rho->items) CHECK(r == doctest::Approx(1.0 / 3).epsilon(1e-12));
    }
    SUBCASE("wsrd with no repeats") {
        const auto sample =
            make_sample(StopRule::wsrd, 3, {{1, 1}, {2, 1}, {3, 1}}, {1.0, 5.0, 2.0});
        const auto rho = rho2(sample);
        REQUIRE(rho.has_value());
        for (const auto& [id, r] : rho->items) CHECK(r == doctest::Approx(1.0 / 3).epsilon(1e-12));
    }
}

TEST_CASE("rho2 matches brute force over labeled sequences") {
    // wsr, k = 3, two distinct keys of weights (1, 1): condition on both
    // keys appearing; expected count of key 1 over the 2^3 sequences
    const auto sample = make_sample(StopRule::wsr, 3, {{1, 2}, {2, 1}}, {1.0, 1.0});
    const auto rho = rho2(sample);
    REQUIRE(rho.has_value());

    double num1 = 0.0, den = 0.0;
    for (int bits = 0; bits < 8; ++bits) {
        int c1 = 0;
        for (int t = 0; t < 3; ++t) c1 += (bits >> t) & 1;
        if (c1 == 0 || c1 == 3) continue;  // both keys must appear
        num1 += c1;
        den += 1.0;
    }
    const double expected = num1 / den / 3.0;
    CHECK(rho->at(1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(rho->sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rho2 normalization holds with weighted keys and extras") {
    const auto sample =
        make_sample(StopRule::wsrd, 3, {{1, 3}, {2, 1}, {3, 2}}, {2.5, 1.0, 0.5});
    const auto rho = rho2(sample);
    REQUIRE(rho.has_value());
    CHECK(rho->sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho->at(1) > rho->at(2));  // heavier, more-often-seen key gets more mass
}

TEST_CASE("rho2 budget controls") {
    ReplacementSample sample;
    sample.rule = StopRule::wsrd;
    sample.k = 12;
    for (std::uint64_t id = 1; id <= 12; ++id) sample.counts.push_back({id, 8, 1.0});
    sample.total = 96;

    Rho2Options options;
    options.enumeration_budget = 10;
    options.allow_monte_carlo = false;
    CHECK(!rho2(sample, options).has_value());

    options.allow_monte_carlo = true;
    options.monte_carlo_draws = 2000;
    const auto rho = rho2(sample, options);
    REQUIRE(rho.has_value());
    CHECK(rho->sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rho2 monte carlo agrees with exact enumeration") {
    const auto sample = make_sample(StopRule::wsr, 5, {{1, 3}, {2, 2}}, {2.0, 1.0});
    const auto exact = rho2(sample);
    Rho2Options mc_options;
    mc_options.enumeration_budget = 0;
    mc_options.monte_carlo_draws = 200000;
    const auto mc = rho2(sample, mc_options);
    REQUIRE(exact.has_value());
    REQUIRE(mc.has_value());
    CHECK(mc->at(1) == doctest::Approx(exact->at(1)).epsilon(0.01));
}

TEST_CASE("wsrc is rejected by rho2") {
    const auto sample = make_sample(StopRule::wsrc, 3, {{1, 3}}, {1.0});
    CHECK_THROWS_AS(rho2(sample), std::invalid_argument);
}

TEST_CASE("variance ordering across stopping rules") {
    // var[rho1(J)] under wsrc <= wsrd <= wsr, within Monte-Carlo noise
    WeightedSetCollection coll;
    for (std::uint64_t id = 1; id <= 12; ++id) coll.add_key(Key{id, 1.0 + (id % 4) * 0.5, nullptr});
    for (std::uint64_t id = 1; id <= 8; ++id) coll.add_member("A", id);
    for (std::uint64_t id = 5; id <= 12; ++id) coll.add_member("B", id);
    const std::vector<SetId> sets{"A", "B"};
    std::vector<Key> ground;
    for (const Key& key : coll.ground()) ground.push_back(key);

    const std::vector<std::uint64_t> subpop{2, 3, 5, 8, 11};
    const auto subpop_rho = [&](const AdjustedSelectivityMap& rho) {
        double sum = 0.0;
        for (std::uint64_t id : subpop) sum += rho.at(id);
        return sum;
    };

    const std::size_t trials = 20000;
    fixtures::Accumulator wsr_acc, wsrd_acc, wsrc_acc;
    for (std::size_t seed = 0; seed < trials; ++seed) {
        wsr_acc.add(subpop_rho(rho1(draw_replacement_sample(ground, StopRule::wsr, 3, seed))));
        wsrd_acc.add(subpop_rho(rho1(draw_replacement_sample(ground, StopRule::wsrd, 3, seed))));
        wsrc_acc.add(subpop_rho(rho1(draw_replacement_sample_wsrc(coll, sets, 3, seed))));
    }
    // generous slack: independent runs, so compare with combined tolerance
    const double tol = 0.1;
    CHECK(wsrc_acc.variance() <= wsrd_acc.variance() * (1 + tol));
    CHECK(wsrd_acc.variance() <= wsr_acc.variance() * (1 + tol));
}

TEST_CASE("rho1 covariances are nonpositive (empirical)") {
    // stated without proof in the source material; checked empirically
    std::vector<Key> ground;
    for (std::uint64_t id = 1; id <= 8; ++id) ground.push_back(Key{id, 1.0 + (id % 3), nullptr});

    const std::size_t trials = 40000;
    for (const StopRule rule : {StopRule::wsr, StopRule::wsrd}) {
        std::vector<double> xi(trials), xj(trials);
        for (std::size_t seed = 0; seed < trials; ++seed) {
            const auto rho = rho1(draw_replacement_sample(ground, rule, 3, seed));
            xi[seed] = rho.at(2);
            xj[seed] = rho.at(7);
        }
        const auto mi = fixtures::mean_and_se(xi);
        const auto mj = fixtures::mean_and_se(xj);
        std::vector<double> products(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            products[t] = (xi[t] - mi.mean) * (xj[t] - mj.mean);
        }
        const auto cov = fixtures::mean_and_se(products);
        CHECK(cov.mean <= 4.0 * cov.se);
    }
}

TEST_CASE("equal weights make the naive count fraction unbiased") {
    // the weighted demo's sets with unit weights: resemblance 1/4
    std::vector<Key> keys{{1, 1.0, nullptr}, {2, 1.0, nullptr}, {3, 1.0, nullptr},
                          {4, 1.0, nullptr}};
    fixtures::Accumulator acc;
    for (std::uint64_t seed = 0; seed < 100000; ++seed) {
        const auto sketch = build_bottom_k("U", keys, RankAssignment{RankFamily::ws, seed}, 2);
        double inter = 0.0;
        for (const auto& e : sketch.entries) inter += e.key_id == 1 ? 1.0 : 0.0;
        acc.add(inter / 2.0);
    }
    CHECK(std::abs(acc.mean() - 0.25) < 4.0 * acc.se());
}

TEST_CASE("rho2 variance never exceeds rho1 on the same draws") {
    std::vector<Key> ground;
    for (std::uint64_t id = 1; id <= 8; ++id) ground.push_back(Key{id, 1.0 + (id % 3), nullptr});
    double total_weight = 0.0;
    for (const Key& key : ground) total_weight += key.weight;
    const std::uint64_t tracked = 5;
    const double truth = ground[4].weight / total_weight;

    const std::size_t trials = 15000;
    double d_sum = 0.0, d_sq = 0.0;
    for (std::size_t seed = 0; seed < trials; ++seed) {
        const auto sample = draw_replacement_sample(ground, StopRule::wsr, 4, seed);
        const double r1 = rho1(sample).at(tracked);
        const double r2 = rho2(sample)->at(tracked);
        const double d = (r1 - truth) * (r1 - truth) - (r2 - truth) * (r2 - truth);
        d_sum += d;
        d_sq += d * d;
    }
    const double mean_d = d_sum / trials;
    const double se_d = std::sqrt((d_sq / trials - mean_d * mean_d) / trials);
    CHECK(mean_d >= -2.0 * se_d);  // var[rho1] - var[rho2] >= 0 within noise
}
