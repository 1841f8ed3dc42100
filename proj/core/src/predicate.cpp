#include "coordsketch/predicate.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <stdexcept>

namespace coordsketch {

Tri tri_and(Tri a, Tri b) {
    if (a == Tri::f || b == Tri::f) return Tri::f;
    if (a == Tri::u || b == Tri::u) return Tri::u;
    return Tri::t;
}

Tri tri_or(Tri a, Tri b) {
    if (a == Tri::t || b == Tri::t) return Tri::t;
    if (a == Tri::u || b == Tri::u) return Tri::u;
    return Tri::f;
}

Tri tri_not(Tri a) {
    if (a == Tri::u) return Tri::u;
    return a == Tri::t ? Tri::f : Tri::t;
}

namespace {

enum class AttrOp { eq, ne, lt, le, gt, ge };

AttrOp attr_op_from_string(const std::string& s) {
    if (s == "==" || s == "=") return AttrOp::eq;
    if (s == "!=") return AttrOp::ne;
    if (s == "<") return AttrOp::lt;
    if (s == "<=") return AttrOp::le;
    if (s == ">") return AttrOp::gt;
    if (s == ">=") return AttrOp::ge;
    throw std::invalid_argument("unknown attribute operator: " + s);
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

struct Predicate::Node {
    enum class Kind { in_set, attr, filter, logical_not, logical_and, logical_or } kind;
    SetId set_id;
    // attr leaf
    std::string attr_name;
    AttrOp op = AttrOp::eq;
    std::string value;
    double value_num = 0.0;
    bool value_is_num = false;
    // filter leaf
    std::function<bool(const PredicateContext&)> fn;
    std::shared_ptr<const Node> left, right;

    Tri eval(const PredicateContext& ctx) const {
        switch (kind) {
            case Kind::in_set: {
                switch (ctx.membership(set_id)) {
                    case Membership::in: return Tri::t;
                    case Membership::out: return Tri::f;
                    case Membership::unknown: return Tri::u;
                }
                return Tri::u;
            }
            case Kind::attr: return tri_of(eval_attr(ctx));
            case Kind::filter: return tri_of(fn(ctx));
            case Kind::logical_not: return tri_not(left->eval(ctx));
            case Kind::logical_and: {
                // short-circuit only on a definite false
                Tri a = left->eval(ctx);
                if (a == Tri::f) return Tri::f;
                return tri_and(a, right->eval(ctx));
            }
            case Kind::logical_or: {
                Tri a = left->eval(ctx);
                if (a == Tri::t) return Tri::t;
                return tri_or(a, right->eval(ctx));
            }
        }
        return Tri::u;
    }

    bool eval_attr(const PredicateContext& ctx) const {
        std::string actual;
        if (attr_name == "id") {
            actual = std::to_string(ctx.key_id);
        } else if (attr_name == "weight") {
            actual = std::to_string(ctx.weight);
        } else {
            const std::string* found =
                ctx.attrs ? find_attr(*ctx.attrs, attr_name) : nullptr;
            if (!found) return false;  // missing attribute satisfies nothing
            actual = *found;
        }
        double actual_num = 0.0;
        const bool both_num = value_is_num && parse_number(actual, actual_num);
        if (attr_name == "weight") {
            actual_num = ctx.weight;  // avoid round-tripping through text
        } else if (attr_name == "id") {
            actual_num = static_cast<double>(ctx.key_id);
        }
        switch (op) {
            case AttrOp::eq: return both_num ? actual_num == value_num : actual == value;
            case AttrOp::ne: return both_num ? actual_num != value_num : actual != value;
            case AttrOp::lt: return both_num && actual_num < value_num;
            case AttrOp::le: return both_num && actual_num <= value_num;
            case AttrOp::gt: return both_num && actual_num > value_num;
            case AttrOp::ge: return both_num && actual_num >= value_num;
        }
        return false;
    }

    void collect_sets(std::vector<SetId>& out) const {
        switch (kind) {
            case Kind::in_set: out.push_back(set_id); break;
            case Kind::attr:
            case Kind::filter: break;
            case Kind::logical_not: left->collect_sets(out); break;
            case Kind::logical_and:
            case Kind::logical_or:
                left->collect_sets(out);
                right->collect_sets(out);
                break;
        }
    }

    bool attr_only() const {
        switch (kind) {
            case Kind::in_set: return false;
            case Kind::attr:
            case Kind::filter: return true;
            case Kind::logical_not: return left->attr_only();
            case Kind::logical_and:
            case Kind::logical_or: return left->attr_only() && right->attr_only();
        }
        return false;
    }

    bool membership_only() const {
        switch (kind) {
            case Kind::in_set: return true;
            case Kind::attr:
            case Kind::filter: return false;
            case Kind::logical_not: return left->membership_only();
            case Kind::logical_and:
            case Kind::logical_or:
                return left->membership_only() && right->membership_only();
        }
        return false;
    }

    // Is this subtree a (flattened) disjunction of positive in(...) atoms,
    // ignoring attribute-only conjuncts? Collects the atoms it covers.
    bool positive_disjunction(std::vector<SetId>& atoms) const {
        switch (kind) {
            case Kind::in_set:
                atoms.push_back(set_id);
                return true;
            case Kind::logical_or:
                return left->positive_disjunction(atoms) && right->positive_disjunction(atoms);
            case Kind::logical_and: {
                if (left->attr_only()) return right->positive_disjunction(atoms);
                if (right->attr_only()) return left->positive_disjunction(atoms);
                return false;
            }
            case Kind::attr:
            case Kind::filter:
            case Kind::logical_not: return false;
        }
        return false;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Predicate::Node>;
using NodeKind = Predicate::Node::Kind;

NodePtr make_binary(NodeKind kind, NodePtr l, NodePtr r) {
    auto node = std::make_shared<Predicate::Node>();
    node->kind = kind;
    node->left = std::move(l);
    node->right = std::move(r);
    return node;
}

}  // namespace

Predicate Predicate::in_set(SetId set_id) {
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::in_set;
    node->set_id = std::move(set_id);
    return Predicate(node);
}

Predicate Predicate::attr(std::string name, std::string op, std::string value) {
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::attr;
    node->attr_name = std::move(name);
    node->op = attr_op_from_string(op);
    node->value = std::move(value);
    node->value_is_num = parse_number(node->value, node->value_num);
    return Predicate(node);
}

Predicate Predicate::filter(std::function<bool(const PredicateContext&)> fn) {
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::filter;
    node->fn = std::move(fn);
    return Predicate(node);
}

Predicate Predicate::operator&&(const Predicate& other) const {
    return Predicate(make_binary(Node::Kind::logical_and, root_, other.root_));
}

Predicate Predicate::operator||(const Predicate& other) const {
    return Predicate(make_binary(Node::Kind::logical_or, root_, other.root_));
}

Predicate Predicate::operator!() const {
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::logical_not;
    node->left = root_;
    return Predicate(node);
}

Predicate Predicate::at_least(std::size_t m, std::span<const SetId> sets) {
    if (m == 0 || m > sets.size()) throw std::invalid_argument("at_least: bad m");
    // disjunction over all m-subsets of conjunctions
    std::vector<std::size_t> pick(m);
    std::vector<Predicate> terms;
    auto expand = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
        if (depth == m) {
            Predicate term = in_set(sets[pick[0]]);
            for (std::size_t i = 1; i < m; ++i) term = term && in_set(sets[pick[i]]);
            terms.push_back(term);
            return;
        }
        for (std::size_t i = start; i + (m - depth) <= sets.size(); ++i) {
            pick[depth] = i;
            self(self, i + 1, depth + 1);
        }
    };
    expand(expand, 0, 0);
    Predicate result = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) result = result || terms[i];
    return result;
}

Tri Predicate::eval(const PredicateContext& ctx) const { return root_->eval(ctx); }

bool Predicate::eval_bool(const PredicateContext& ctx) const {
    const Tri v = eval(ctx);
    if (v == Tri::u) throw std::logic_error("predicate undecidable: unknown membership reached");
    return v == Tri::t;
}

std::vector<SetId> Predicate::relevant_sets() const {
    std::vector<SetId> sets;
    root_->collect_sets(sets);
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    return sets;
}

bool Predicate::attribute_free() const { return root_->membership_only(); }

bool Predicate::lcs_applicable() const {
    std::vector<SetId> atoms;
    if (!root_->positive_disjunction(atoms)) return false;
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    return atoms == relevant_sets();
}

PredicateAnalysis analyze_predicate(const Predicate& pred) {
    PredicateAnalysis analysis;
    analysis.relevant_sets = pred.relevant_sets();
    if (analysis.relevant_sets.empty()) {
        throw std::invalid_argument("predicate has no membership atoms: no relevant sets");
    }
    analysis.best = pred.lcs_applicable() ? CombinationKind::lcs : CombinationKind::scs;
    return analysis;
}

// ---------------------------------------------------------------------------
// Text parser: expr := term ('|' term)*, term := factor ('&' factor)*,
// factor := '!' factor | '(' expr ')' | in(<set>) | attr(<name>) <op> <value>.

namespace {

struct Parser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("predicate parse error at offset " + std::to_string(pos) +
                                    ": " + what);
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                text[pos] == '.' || text[pos] == '-' || text[pos] == '+')) {
            ++pos;
        }
        if (pos == start) fail("expected identifier");
        return std::string(text.substr(start, pos - start));
    }

    std::string comparison_op() {
        skip_ws();
        if (pos >= text.size()) fail("expected comparison operator");
        const char c = text[pos];
        if (c == '=' || c == '<' || c == '>' || c == '!') {
            std::size_t len = (pos + 1 < text.size() && text[pos + 1] == '=') ? 2 : 1;
            std::string op(text.substr(pos, len));
            pos += len;
            return op;
        }
        fail("expected comparison operator");
    }

    Predicate parse_expr() {
        Predicate left = parse_term();
        while (consume('|')) left = left || parse_term();
        return left;
    }

    Predicate parse_term() {
        Predicate left = parse_factor();
        while (true) {
            skip_ws();
            if (pos < text.size() && text[pos] == '&') {
                ++pos;
                left = left && parse_factor();
            } else {
                return left;
            }
        }
    }

    Predicate parse_factor() {
        skip_ws();
        if (consume('!')) return !parse_factor();
        if (consume('(')) {
            Predicate inner = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return inner;
        }
        const std::string name = ident();
        if (name == "in") {
            if (!consume('(')) fail("expected '(' after in");
            std::string set_id = ident();
            if (!consume(')')) fail("expected ')' after set id");
            return Predicate::in_set(std::move(set_id));
        }
        if (name == "attr") {
            if (!consume('(')) fail("expected '(' after attr");
            std::string attr_name = ident();
            if (!consume(')')) fail("expected ')' after attribute name");
            std::string op = comparison_op();
            std::string value = ident();
            return Predicate::attr(std::move(attr_name), op, std::move(value));
        }
        fail("expected in(...) or attr(...)");
    }
};

}  // namespace

Predicate Predicate::parse(std::string_view text) {
    Parser parser{text};
    Predicate result = parser.parse_expr();
    parser.skip_ws();
    if (parser.pos != text.size()) parser.fail("trailing input");
    return result;
}

}  // namespace coordsketch
