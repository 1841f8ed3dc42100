#include <doctest.h>

#include <set>

#include "coordsketch/dataset.hpp"
#include "fixtures.hpp"

using namespace coordsketch;

TEST_CASE("pair generator") {
    const auto coll = gen_dataset(parse_dataset_spec("pair(10000,2000)"));
    CHECK(coll.ground_size() == 18000);
    CHECK(coll.members("A1").size() == 10000);
    CHECK(coll.members("A2").size() == 10000);
    CHECK(oracle_weight(coll, Predicate::parse("in(A1) & in(A2)")) == 2000.0);
    const double u = oracle_weight(coll, Predicate::parse("in(A1) | in(A2)"));
    CHECK(u == 18000.0);
    CHECK(2000.0 / u == doctest::Approx(0.1111).epsilon(0.001));
}

TEST_CASE("disjoint generator") {
    const auto coll = gen_dataset(parse_dataset_spec("disjoint(5,9906)"));
    CHECK(coll.ground_size() == 49530);
    CHECK(oracle_weight(coll, Predicate::parse("in(A1)&in(A2)")) == 0.0);
    Predicate all = Predicate::in_set("A1");
    for (int s = 2; s <= 5; ++s) all = all || Predicate::in_set("A" + std::to_string(s));
    CHECK(oracle_weight(coll, all) == 49530.0);
}

TEST_CASE("shared core generator") {
    const auto coll = gen_dataset(parse_dataset_spec("shared_core(3,1000,5000)"));
    CHECK(coll.ground_size() == 16000);
    CHECK(coll.members("A1").size() == 6000);
    CHECK(oracle_weight(coll, Predicate::parse("in(A1)&in(A2)&in(A3)")) == 1000.0);

    const auto heavy = gen_dataset(parse_dataset_spec("heavy_overlap(5,24765,4953)"));
    CHECK(heavy.ground_size() == 24765 + 5 * 4953);
    CHECK(heavy.members("A3").size() == 29718);
}

TEST_CASE("heterogeneous generator produces spread-out set sizes") {
    const auto coll = gen_dataset(parse_dataset_spec("heterogeneous(8,30000,500)"));
    std::size_t min_size = SIZE_MAX, max_size = 0;
    for (const SetId& id : coll.set_ids()) {
        min_size = std::min(min_size, coll.members(id).size());
        max_size = std::max(max_size, coll.members(id).size());
    }
    CHECK(coll.set_ids().size() == 8);
    CHECK(min_size >= 500);
    CHECK(max_size > 4 * min_size);  // heavy-tailed sizes
    CHECK(max_size <= 15000);
}

TEST_CASE("weight models") {
    auto spec = parse_dataset_spec("pair(500,100)");
    spec.weights = "pareto:1.5";
    const auto coll = gen_dataset(spec);
    double min_w = 1e300, max_w = 0.0;
    for (const Key& key : coll.ground()) {
        CHECK(key.weight >= 1.0);
        min_w = std::min(min_w, key.weight);
        max_w = std::max(max_w, key.weight);
    }
    CHECK(max_w > 5.0);  // heavy tail present

    SUBCASE("bad models rejected") {
        spec.weights = "zipf";
        CHECK_THROWS_AS(gen_dataset(spec), std::invalid_argument);
    }
}

TEST_CASE("keys carry the synthetic label attribute") {
    const auto coll = gen_dataset(parse_dataset_spec("pair(100,10)"));
    const auto& key = coll.key(17);
    const std::string* label = find_attr(key.attrs, "label");
    REQUIRE(label != nullptr);
    CHECK(*label == "7");
    CHECK(oracle_weight(coll, Predicate::parse("in(A1) & attr(label) == 7")) == 10.0);
}

TEST_CASE("generators are deterministic") {
    auto spec = parse_dataset_spec("heterogeneous(4,2000,100)");
    spec.weights = "pareto:1.0";
    spec.seed = 5;
    const auto a = gen_dataset(spec);
    const auto b = gen_dataset(spec);
    REQUIRE(a.ground_size() == b.ground_size());
    for (std::size_t i = 0; i < a.ground().size(); ++i) {
        CHECK(a.ground()[i].id == b.ground()[i].id);
        CHECK(a.ground()[i].weight == b.ground()[i].weight);
    }
    for (const SetId& id : a.set_ids()) {
        CHECK(a.members(id).size() == b.members(id).size());
    }
}

TEST_CASE("bad specs are rejected") {
    CHECK_THROWS_AS(gen_dataset(parse_dataset_spec("pair(100,200)")), std::invalid_argument);
    CHECK_THROWS_AS(gen_dataset(parse_dataset_spec("pair(100)")), std::invalid_argument);
    CHECK_THROWS_AS(gen_dataset(parse_dataset_spec("mystery(1,2)")), std::invalid_argument);
    CHECK_THROWS_AS(parse_dataset_spec("pair 100 200"), std::invalid_argument);
}

TEST_CASE("oracle on the ten-key fixture") {
    const auto coll = fixtures::ten_key_collection();
    const std::vector<SetId> sets{"A1", "A2", "A3", "A4"};

    // membership matrix: keys in at least two sets are
    // i2,i3,i4,i5,i6,i7,i9,i10 with weights 2+1+3+1+1+1+1+1
    CHECK(oracle_weight(coll, Predicate::at_least(2, sets)) == 11.0);
    CHECK(oracle_weight(coll, Predicate::parse("in(A1)")) == 5.0);
    CHECK(oracle_weight(coll, Predicate::parse("in(A1) & !in(A1)")) == 0.0);
    CHECK_THROWS_AS(oracle_weight(coll, Predicate::parse("in(A7)")), std::invalid_argument);
}
