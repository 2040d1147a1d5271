// quelim :: the ordered-field language
//
// Terms over {0, 1, +, *}, atoms t = u and t <= u, concrete syntax, and
// exact rational evaluation of quantifier-free formulas.  The connective
// and quantifier layer is the shared Formula template; only the atoms and
// terms differ from the arithmetic side.
//
// Grammar (RCF):
//   formula  := iff
//   iff      := imp ('<->' imp)*                 left-assoc
//   imp      := or ('->' imp)?                   right-assoc
//   or       := and ('|' and)*                   left-assoc
//   and      := neg ('&' neg)*                   left-assoc
//   neg      := '~' neg | quant | primary
//   quant    := ('E' | 'A') ident '.' formula    body extends as far as possible
//   primary  := atom | '(' formula ')' | relapp
//   atom     := term ('=' | '!=' | '<=' | '<') term
//   relapp   := uident '(' term (',' term)* ')'
//   term     := summand ('+' summand)*           left-assoc
//   summand  := factor ('*' factor)*             left-assoc
//   factor   := ident | number | '(' term ')'
//
// The order is dense, so 't < u' desugars to '~(u <= t)', not to the
// discrete 't+1 <= u' of the arithmetic grammar.  Numerals are sugar for
// left-nested sums of 1 and are never printed back.
#pragma once

#include "quelim/bigint.hpp"
#include "quelim/formula.hpp"
#include "quelim/text.hpp"

#include <cassert>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace quelim::rcf {

class RTerm {
public:
    enum class Kind { Zero, One, Var, Add, Mul };

    RTerm() : RTerm(zero()) {}

    static RTerm zero() { return RTerm(std::make_shared<Node>(Node{Kind::Zero, {}, nullptr, nullptr})); }
    static RTerm one() { return RTerm(std::make_shared<Node>(Node{Kind::One, {}, nullptr, nullptr})); }
    static RTerm var(std::string name) {
        return RTerm(std::make_shared<Node>(Node{Kind::Var, std::move(name), nullptr, nullptr}));
    }
    static RTerm add(RTerm l, RTerm r) {
        return RTerm(std::make_shared<Node>(Node{Kind::Add, {}, l.n_, r.n_}));
    }
    static RTerm mul(RTerm l, RTerm r) {
        return RTerm(std::make_shared<Node>(Node{Kind::Mul, {}, l.n_, r.n_}));
    }
    // k as a left-nested sum of 1: the language has no numerals of its own,
    // and none of the families here need large ones.
    static RTerm num(uint64_t k) {
        if (k == 0) return zero();
        RTerm t = one();
        for (uint64_t i = 1; i < k; ++i) t = add(t, one());
        return t;
    }

    Kind kind() const { return n_->kind; }
    const std::string& name() const { assert(kind() == Kind::Var); return n_->name; }
    RTerm lhs() const { assert(kind() == Kind::Add || kind() == Kind::Mul); return RTerm(n_->a); }
    RTerm rhs() const { assert(kind() == Kind::Add || kind() == Kind::Mul); return RTerm(n_->b); }

    // Physical identity, used to short-circuit structural equality.
    const void* id() const { return n_.get(); }

private:
    struct Node {
        Kind kind;
        std::string name;
        std::shared_ptr<const Node> a, b;
    };
    explicit RTerm(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
};

inline bool operator==(const RTerm& a, const RTerm& b) {
    if (a.id() == b.id()) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case RTerm::Kind::Zero:
        case RTerm::Kind::One: return true;
        case RTerm::Kind::Var: return a.name() == b.name();
        case RTerm::Kind::Add:
        case RTerm::Kind::Mul: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
    return false;
}
inline bool operator!=(const RTerm& a, const RTerm& b) { return !(a == b); }

inline void collect_vars(const RTerm& t, std::set<std::string>& out) {
    switch (t.kind()) {
        case RTerm::Kind::Var: out.insert(t.name()); break;
        case RTerm::Kind::Add:
        case RTerm::Kind::Mul: collect_vars(t.lhs(), out); collect_vars(t.rhs(), out); break;
        default: break;
    }
}

inline std::set<std::string> term_vars(const RTerm& t) {
    std::set<std::string> s;
    collect_vars(t, s);
    return s;
}

inline uint64_t term_node_count(const RTerm& t) {
    switch (t.kind()) {
        case RTerm::Kind::Zero:
        case RTerm::Kind::One:
        case RTerm::Kind::Var: return 1;
        case RTerm::Kind::Add:
        case RTerm::Kind::Mul: return 1 + term_node_count(t.lhs()) + term_node_count(t.rhs());
    }
    return 0;
}

inline BigUint term_symbols(const RTerm& t) {
    switch (t.kind()) {
        case RTerm::Kind::Zero:
        case RTerm::Kind::One:
        case RTerm::Kind::Var: return BigUint(1);
        case RTerm::Kind::Add:
        case RTerm::Kind::Mul:
            return term_symbols(t.lhs()) + BigUint(1) + term_symbols(t.rhs());
    }
    return BigUint(0);
}

inline RTerm subst_term(const RTerm& t, const std::map<std::string, RTerm>& m) {
    switch (t.kind()) {
        case RTerm::Kind::Var: {
            auto it = m.find(t.name());
            return it == m.end() ? t : it->second;
        }
        case RTerm::Kind::Add:
        case RTerm::Kind::Mul: {
            RTerm l = subst_term(t.lhs(), m), r = subst_term(t.rhs(), m);
            if (l.id() == t.lhs().id() && r.id() == t.rhs().id()) return t;
            return t.kind() == RTerm::Kind::Add ? RTerm::add(l, r) : RTerm::mul(l, r);
        }
        default: return t;
    }
}

inline size_t term_hash(const RTerm& t) {
    auto mix = [](size_t h, size_t v) { return h * 1000003u ^ v; };
    switch (t.kind()) {
        case RTerm::Kind::Zero: return 0x61;
        case RTerm::Kind::One: return 0x62;
        case RTerm::Kind::Var: return mix(0x63, std::hash<std::string>{}(t.name()));
        case RTerm::Kind::Add: return mix(mix(0x64, term_hash(t.lhs())), term_hash(t.rhs()));
        case RTerm::Kind::Mul: return mix(mix(0x65, term_hash(t.lhs())), term_hash(t.rhs()));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Exact rationals over machine words, for spot-checking generated formulas
// at small sample points.  Overflow throws instead of wrapping.

namespace detail {

inline int64_t rat_add(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
}
inline int64_t rat_mul(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
}

} // namespace detail

struct Rat {
    int64_t num = 0;
    int64_t den = 1; // > 0 and coprime to num

    Rat() = default;
    Rat(int64_t n) : num(n) {}
    Rat(int64_t n, int64_t d) {
        if (d == 0) throw std::invalid_argument("rational with zero denominator");
        if (d < 0) { n = detail::rat_mul(n, -1); d = detail::rat_mul(d, -1); }
        int64_t g = std::gcd(n, d);
        num = n / g;
        den = d / g;
    }

    std::string to_string() const {
        return den == 1 ? std::to_string(num)
                        : std::to_string(num) + "/" + std::to_string(den);
    }

    friend Rat operator+(const Rat& a, const Rat& b) {
        return Rat(detail::rat_add(detail::rat_mul(a.num, b.den), detail::rat_mul(b.num, a.den)),
                   detail::rat_mul(a.den, b.den));
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        return Rat(detail::rat_mul(a.num, b.num), detail::rat_mul(a.den, b.den));
    }
    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    // Denominators are positive, so a/b <= c/d iff ad <= cb.
    friend bool operator<=(const Rat& a, const Rat& b) {
        return detail::rat_mul(a.num, b.den) <= detail::rat_mul(b.num, a.den);
    }
    friend bool operator<(const Rat& a, const Rat& b) { return a <= b && a != b; }
};

inline Rat eval_term(const RTerm& t, const std::map<std::string, Rat>& env) {
    switch (t.kind()) {
        case RTerm::Kind::Zero: return Rat(0);
        case RTerm::Kind::One: return Rat(1);
        case RTerm::Kind::Var: {
            auto it = env.find(t.name());
            if (it == env.end())
                throw std::invalid_argument("unbound variable " + t.name());
            return it->second;
        }
        case RTerm::Kind::Add: return eval_term(t.lhs(), env) + eval_term(t.rhs(), env);
        case RTerm::Kind::Mul: return eval_term(t.lhs(), env) * eval_term(t.rhs(), env);
    }
    return Rat(0);
}

// ---------------------------------------------------------------------------
// Atoms of the ordered field: t = u and t <= u.  The order enters the
// language only through the shorthand t <= u := E z. t + z*z = u, which
// fixes the symbol accounting below.

struct RcfAtom {
    enum class Rel { Eq, Le };
    using term_type = RTerm;

    Rel rel = Rel::Eq;
    RTerm lhs, rhs;

    static RcfAtom eq(RTerm l, RTerm r) { return {Rel::Eq, std::move(l), std::move(r)}; }
    static RcfAtom le(RTerm l, RTerm r) { return {Rel::Le, std::move(l), std::move(r)}; }
    static RcfAtom truth() { return eq(RTerm::zero(), RTerm::zero()); }

    uint64_t node_count() const { return 1 + term_node_count(lhs) + term_node_count(rhs); }

    // t = u costs |t| + 1 + |u|.  t <= u expands to E z. t + z*z = u, so it
    // costs |t| + |u| + 7.
    BigUint paper_symbols() const {
        BigUint t = term_symbols(lhs), u = term_symbols(rhs);
        return rel == Rel::Eq ? t + BigUint(1) + u : t + u + BigUint(7);
    }

    std::set<std::string> vars() const {
        std::set<std::string> s = term_vars(lhs);
        collect_vars(rhs, s);
        return s;
    }

    RcfAtom substituted(const std::map<std::string, RTerm>& m) const {
        return {rel, subst_term(lhs, m), subst_term(rhs, m)};
    }

    // The order is dense and the language has no strict atom, so no
    // negation normalizes to an atom.
    std::optional<RcfAtom> negated() const { return std::nullopt; }

    size_t hash() const {
        auto mix = [](size_t h, size_t v) { return h * 1000003u ^ v; };
        size_t h = static_cast<size_t>(rel) + 0x41;
        return mix(mix(h, term_hash(lhs)), term_hash(rhs));
    }

    friend bool operator==(const RcfAtom& a, const RcfAtom& b) {
        return a.rel == b.rel && a.lhs == b.lhs && a.rhs == b.rhs;
    }

    static std::set<std::string> term_vars_of(const RTerm& t) { return term_vars(t); }
    static uint64_t term_node_count_of(const RTerm& t) { return term_node_count(t); }
    static BigUint term_symbols_of(const RTerm& t) { return term_symbols(t); }
    static RTerm term_substituted(const RTerm& t, const std::map<std::string, RTerm>& m) {
        return subst_term(t, m);
    }
    static RTerm term_var(const std::string& v) { return RTerm::var(v); }
    static size_t term_hash_of(const RTerm& t) { return term_hash(t); }
};

using RFormula = Formula<RcfAtom>;

inline RFormula fold_and(const std::vector<RFormula>& fs) {
    RFormula acc = fs.at(0);
    for (size_t i = 1; i < fs.size(); ++i) acc = RFormula::and_(acc, fs[i]);
    return acc;
}
inline RFormula fold_or(const std::vector<RFormula>& fs) {
    RFormula acc = fs.at(0);
    for (size_t i = 1; i < fs.size(); ++i) acc = RFormula::or_(acc, fs[i]);
    return acc;
}

inline void and_spine(const RFormula& f, std::vector<RFormula>& out) {
    if (f.kind() == RFormula::Kind::And) {
        and_spine(f.lhs(), out);
        and_spine(f.rhs(), out);
    } else {
        out.push_back(f);
    }
}

// ---------------------------------------------------------------------------
// Parsing.  The connective layer matches the arithmetic grammar; the term
// layer adds the general product and drops scaled factors and '=_m'.

namespace detail {

class RcfParser {
public:
    RcfParser(std::string_view src, ParseOptions opts)
        : toks_(tok::lex(src)), opts_(opts) {}

    RFormula parse_formula_all() {
        RFormula f = formula();
        expect(tok::Type::End, "trailing input after formula");
        return f;
    }
    RTerm parse_term_all() {
        RTerm t = term();
        expect(tok::Type::End, "trailing input after term");
        return t;
    }

private:
    using T = tok::Type;

    const tok::Token& cur() const { return toks_[i_]; }
    bool at(T t) const { return cur().type == t; }
    bool accept(T t) {
        if (!at(t)) return false;
        ++i_;
        return true;
    }
    void expect(T t, const char* msg) {
        if (!accept(t)) throw parse_error(msg, cur().pos);
    }
    [[noreturn]] void fail(const std::string& msg) { throw parse_error(msg, cur().pos); }

    RFormula formula() { return iff(); }

    RFormula iff() {
        RFormula f = imp();
        while (accept(T::DArrow)) f = RFormula::iff(f, imp());
        return f;
    }
    RFormula imp() {
        RFormula f = disj();
        if (accept(T::Arrow)) return RFormula::implies(f, imp());
        return f;
    }
    RFormula disj() {
        RFormula f = conj();
        while (accept(T::Bar)) f = RFormula::or_(f, conj());
        return f;
    }
    RFormula conj() {
        RFormula f = neg();
        while (accept(T::Amp)) f = RFormula::and_(f, neg());
        return f;
    }
    RFormula neg() {
        if (accept(T::Tilde)) return RFormula::not_(neg());
        if (at(T::UIdent) && (cur().text == "E" || cur().text == "A")) {
            bool ex = cur().text == "E";
            ++i_;
            if (!at(T::Ident)) fail("expected variable after quantifier");
            std::string v = cur().text;
            ++i_;
            expect(T::Dot, "expected '.' after quantified variable");
            RFormula body = formula();
            return ex ? RFormula::exists(v, body) : RFormula::forall(v, body);
        }
        return primary();
    }

    RFormula primary() {
        if (at(T::UIdent)) return relapp();
        if (at(T::LParen)) {
            // Could open a parenthesized term (then an atom follows) or a
            // parenthesized formula.  Try the atom reading first.
            size_t save = i_;
            try {
                return atom();
            } catch (const parse_error&) {
                i_ = save;
            }
            expect(T::LParen, "expected '('");
            RFormula f = formula();
            expect(T::RParen, "expected ')'");
            return f;
        }
        return atom();
    }

    RFormula relapp() {
        if (!opts_.allow_relations) fail("relation symbols are not allowed here");
        std::string name = cur().text;
        ++i_;
        expect(T::LParen, "expected '(' after relation symbol");
        std::vector<RTerm> args;
        args.push_back(term());
        while (accept(T::Comma)) args.push_back(term());
        expect(T::RParen, "expected ')' after relation arguments");
        return RFormula::rel(std::move(name), std::move(args));
    }

    RFormula atom() {
        RTerm l = term();
        if (accept(T::Eq)) return RFormula::atom(RcfAtom::eq(l, term()));
        if (accept(T::Le)) return RFormula::atom(RcfAtom::le(l, term()));
        if (accept(T::Lt))
            return RFormula::not_(RFormula::atom(RcfAtom::le(term(), l)));
        if (accept(T::Neq)) return RFormula::not_(RFormula::atom(RcfAtom::eq(l, term())));
        fail("expected relation in atom");
    }

    RTerm term() {
        RTerm t = summand();
        while (accept(T::Plus)) t = RTerm::add(t, summand());
        return t;
    }
    RTerm summand() {
        RTerm t = factor();
        while (accept(T::Star)) t = RTerm::mul(t, factor());
        return t;
    }
    RTerm factor() {
        if (at(T::Ident)) {
            std::string v = cur().text;
            ++i_;
            return RTerm::var(v);
        }
        if (at(T::Number)) {
            uint64_t v = cur().number;
            ++i_;
            return RTerm::num(v);
        }
        if (accept(T::LParen)) {
            RTerm t = term();
            expect(T::RParen, "expected ')' in term");
            return t;
        }
        fail("expected term");
    }

    std::vector<tok::Token> toks_;
    size_t i_ = 0;
    ParseOptions opts_;
};

} // namespace detail

inline RFormula parse_rcf(std::string_view src, ParseOptions opts = {}) {
    return detail::RcfParser(src, opts).parse_formula_all();
}
inline RTerm parse_rcf_term(std::string_view src) {
    return detail::RcfParser(src, {}).parse_term_all();
}

// Definition-template bodies use the grammar extended with relation
// applications R(t1, ..., tk); this is the only entry point that admits
// them on the field side.
inline RFormula parse_rcf_body(const std::string& s) {
    ParseOptions o;
    o.allow_relations = true;
    return parse_rcf(s, o);
}

// ---------------------------------------------------------------------------
// Printing.  Connective conventions match the arithmetic printer.  Terms:
// the product binds tighter than the sum, both associate to the left, and
// right-nested chains keep their parentheses.

namespace detail {

// ctx: 0 bare, 1 right operand of '+', 2 left operand of '*', 3 right
// operand of '*'.  Sums parenthesize from 1 up, products only at 3.
inline void print_rterm_into(const RTerm& t, std::string& out, int ctx) {
    switch (t.kind()) {
        case RTerm::Kind::Zero: out += '0'; return;
        case RTerm::Kind::One: out += '1'; return;
        case RTerm::Kind::Var: out += t.name(); return;
        case RTerm::Kind::Add: {
            bool parens = ctx >= 1;
            if (parens) out += '(';
            print_rterm_into(t.lhs(), out, 0);
            out += " + ";
            print_rterm_into(t.rhs(), out, 1);
            if (parens) out += ')';
            return;
        }
        case RTerm::Kind::Mul: {
            bool parens = ctx >= 3;
            if (parens) out += '(';
            print_rterm_into(t.lhs(), out, 2);
            out += '*';
            print_rterm_into(t.rhs(), out, 3);
            if (parens) out += ')';
            return;
        }
    }
}

// level: 1 iff, 2 implies, 3 or, 4 and, 5 not, 6 primary
inline void print_rcf_into(const RFormula& f, std::string& out, int level) {
    using K = RFormula::Kind;
    auto wrap = [&](int mine, auto&& body) {
        bool parens = mine < level;
        if (parens) out += '(';
        body();
        if (parens) out += ')';
    };
    switch (f.kind()) {
        case K::Atom: {
            const RcfAtom& a = f.as_atom();
            print_rterm_into(a.lhs, out, 0);
            out += a.rel == RcfAtom::Rel::Eq ? " = " : " <= ";
            print_rterm_into(a.rhs, out, 0);
            return;
        }
        case K::RelApp: {
            out += f.rel_name();
            out += '(';
            bool first = true;
            for (const RTerm& t : f.rel_args()) {
                if (!first) out += ", ";
                first = false;
                print_rterm_into(t, out, 0);
            }
            out += ')';
            return;
        }
        case K::Not:
            wrap(5, [&] {
                out += '~';
                const RFormula c = f.child();
                if (c.kind() == K::Not || c.kind() == K::RelApp) {
                    print_rcf_into(c, out, 5);
                } else {
                    out += '(';
                    print_rcf_into(c, out, 0);
                    out += ')';
                }
            });
            return;
        case K::And:
            wrap(4, [&] {
                print_rcf_into(f.lhs(), out, 4);
                out += " & ";
                print_rcf_into(f.rhs(), out, 5);
            });
            return;
        case K::Or:
            wrap(3, [&] {
                print_rcf_into(f.lhs(), out, 3);
                out += " | ";
                print_rcf_into(f.rhs(), out, 4);
            });
            return;
        case K::Implies:
            wrap(2, [&] {
                print_rcf_into(f.lhs(), out, 3);
                out += " -> ";
                print_rcf_into(f.rhs(), out, 2);
            });
            return;
        case K::Iff:
            wrap(1, [&] {
                print_rcf_into(f.lhs(), out, 1);
                out += " <-> ";
                print_rcf_into(f.rhs(), out, 2);
            });
            return;
        case K::Exists:
        case K::Forall: {
            // The body extends as far as possible, so anywhere but the top
            // level the whole quantified formula is parenthesized.
            bool parens = level > 0;
            if (parens) out += '(';
            out += f.kind() == K::Exists ? "E " : "A ";
            out += f.var();
            out += ". ";
            print_rcf_into(f.body(), out, 0);
            if (parens) out += ')';
            return;
        }
    }
}

} // namespace detail

inline std::string print_rcf_term(const RTerm& t) {
    std::string out;
    detail::print_rterm_into(t, out, 0);
    return out;
}

inline std::string print_rcf(const RFormula& f) {
    std::string out;
    detail::print_rcf_into(f, out, 0);
    return out;
}

inline SizeReport size(const RFormula& f) {
    return {paper_symbols(f), node_count(f), print_rcf(f).size()};
}

// ---------------------------------------------------------------------------
// Truth of a quantifier-free formula at a rational point.  Quantifiers and
// relation applications have no finite evaluation here and throw.

inline bool eval_qf(const RFormula& f, const std::map<std::string, Rat>& env) {
    using K = RFormula::Kind;
    switch (f.kind()) {
        case K::Atom: {
            const RcfAtom& a = f.as_atom();
            Rat l = eval_term(a.lhs, env), r = eval_term(a.rhs, env);
            return a.rel == RcfAtom::Rel::Eq ? l == r : l <= r;
        }
        case K::Not: return !eval_qf(f.child(), env);
        case K::And: return eval_qf(f.lhs(), env) && eval_qf(f.rhs(), env);
        case K::Or: return eval_qf(f.lhs(), env) || eval_qf(f.rhs(), env);
        case K::Implies: return !eval_qf(f.lhs(), env) || eval_qf(f.rhs(), env);
        case K::Iff: return eval_qf(f.lhs(), env) == eval_qf(f.rhs(), env);
        case K::RelApp:
            throw std::invalid_argument("relation application in quantifier-free evaluation");
        default:
            throw std::invalid_argument("quantifier in quantifier-free evaluation");
    }
}

} // namespace quelim::rcf
