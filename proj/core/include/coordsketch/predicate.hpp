#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "coordsketch/combine.hpp"
#include "coordsketch/types.hpp"

namespace coordsketch {

// Kleene three-valued logic over set membership; `unknown` propagates unless
// the other operand decides the connective.
enum class Tri : std::uint8_t { f, t, u };

Tri tri_and(Tri a, Tri b);
Tri tri_or(Tri a, Tri b);
Tri tri_not(Tri a);
inline Tri tri_of(bool b) { return b ? Tri::t : Tri::f; }

// The key-side view a predicate is evaluated against: identity, weight,
// attributes, and a membership oracle for set atoms.
struct PredicateContext {
    std::uint64_t key_id = 0;
    double weight = 0.0;
    const AttrsPtr* attrs = nullptr;
    std::function<Membership(const SetId&)> membership;
};

// Selection predicate: a boolean formula over `in(<set>)` membership atoms
// and attribute tests, conjoined with an optional programmatic filter.
//
// Text syntax (CLI): in(A) & in(B) | !in(C), attribute leaves
// `attr(<name>) <op> <value>` with op in {==,!=,<,<=,>,>=}; precedence
// ! > & > |; parentheses allowed.
class Predicate {
public:
    static Predicate parse(std::string_view text);

    static Predicate in_set(SetId set_id);
    static Predicate attr(std::string name, std::string op, std::string value);
    // Programmatic attribute-style leaf; treated as an attribute condition by
    // the combination analysis.
    static Predicate filter(std::function<bool(const PredicateContext&)> fn);

    Predicate operator&&(const Predicate& other) const;
    Predicate operator||(const Predicate& other) const;
    Predicate operator!() const;

    // At least `m` of the given membership atoms hold (expanded structurally).
    static Predicate at_least(std::size_t m, std::span<const SetId> sets);

    Tri eval(const PredicateContext& ctx) const;

    // Two-valued evaluation for contexts with complete membership knowledge
    // (oracle scans, union/scs combinations). Throws if the result is unknown.
    bool eval_bool(const PredicateContext& ctx) const;

    // The set ids appearing in the formula, sorted and deduplicated.
    std::vector<SetId> relevant_sets() const;

    // True when the formula contains no attribute or filter leaves.
    bool attribute_free() const;

    // True when the formula is, syntactically, a disjunction of positive
    // membership atoms covering every relevant set, possibly conjoined with
    // attribute-only conditions: the shape for which LCS membership knowledge
    // always suffices.
    bool lcs_applicable() const;

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    explicit Predicate(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
};

struct PredicateAnalysis {
    std::vector<SetId> relevant_sets;
    CombinationKind best;  // scs or lcs
};

// Chooses the most inclusive applicable combination: LCS for attribute-based
// selections from the union of the relevant sets, SCS otherwise. Rejects
// formulas without membership atoms.
PredicateAnalysis analyze_predicate(const Predicate& pred);

}  // namespace coordsketch
