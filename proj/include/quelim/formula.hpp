// quelim :: first-order formulas, generic over the atom type
//
// Formula<A> is a shared immutable tree: atoms, the usual connectives,
// quantifiers over named variables, and applications R(t1, ..., tk) of an
// uninterpreted relation symbol.  An atom type supplies its term type, sizes,
// free variables, substitution, and an optional builtin negation used by nnf.
#pragma once

#include "quelim/bigint.hpp"
#include "quelim/term.hpp"

#include <cassert>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace quelim {

// Thrown wherever a size or search budget is exhausted before an answer.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& msg) : std::runtime_error(msg) {}
};

template <class A>
class Formula {
public:
    enum class Kind { Atom, Not, And, Or, Implies, Iff, Exists, Forall, RelApp };
    using atom_type = A;
    using term_type = typename A::term_type;

    Formula() : Formula(atom(A::truth())) {}

    static Formula atom(A a) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Atom;
        n->atom.emplace(std::move(a));
        return Formula(std::move(n));
    }
    static Formula rel(std::string name, std::vector<term_type> args) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::RelApp;
        n->name = std::move(name);
        n->args = std::move(args);
        return Formula(std::move(n));
    }
    static Formula not_(Formula f) { return unary(Kind::Not, std::move(f)); }
    static Formula and_(Formula l, Formula r) { return binary(Kind::And, std::move(l), std::move(r)); }
    static Formula or_(Formula l, Formula r) { return binary(Kind::Or, std::move(l), std::move(r)); }
    static Formula implies(Formula l, Formula r) { return binary(Kind::Implies, std::move(l), std::move(r)); }
    static Formula iff(Formula l, Formula r) { return binary(Kind::Iff, std::move(l), std::move(r)); }
    static Formula exists(std::string v, Formula body) { return quant(Kind::Exists, std::move(v), std::move(body)); }
    static Formula forall(std::string v, Formula body) { return quant(Kind::Forall, std::move(v), std::move(body)); }

    static Formula quantifier(Kind k, std::string v, Formula body) {
        assert(k == Kind::Exists || k == Kind::Forall);
        return quant(k, std::move(v), std::move(body));
    }
    static Formula connective(Kind k, Formula l, Formula r) {
        assert(k == Kind::And || k == Kind::Or || k == Kind::Implies || k == Kind::Iff);
        return binary(k, std::move(l), std::move(r));
    }

    Kind kind() const { return n_->kind; }
    const A& as_atom() const { assert(kind() == Kind::Atom); return *n_->atom; }
    Formula child() const { assert(kind() == Kind::Not); return Formula(n_->a); }
    Formula lhs() const { assert(is_binary()); return Formula(n_->a); }
    Formula rhs() const { assert(is_binary()); return Formula(n_->b); }
    const std::string& var() const { assert(is_quantifier()); return n_->name; }
    Formula body() const { assert(is_quantifier()); return Formula(n_->a); }
    const std::string& rel_name() const { assert(kind() == Kind::RelApp); return n_->name; }
    const std::vector<term_type>& rel_args() const { assert(kind() == Kind::RelApp); return n_->args; }

    bool is_binary() const {
        Kind k = kind();
        return k == Kind::And || k == Kind::Or || k == Kind::Implies || k == Kind::Iff;
    }
    bool is_quantifier() const { return kind() == Kind::Exists || kind() == Kind::Forall; }

    const void* id() const { return n_.get(); }

private:
    struct Node {
        Kind kind;
        std::optional<A> atom;
        std::shared_ptr<const Node> a, b;
        std::string name;              // quantifier variable or relation symbol
        std::vector<term_type> args;   // RelApp only
    };
    explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    static Formula unary(Kind k, Formula f) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->a = f.n_;
        return Formula(std::move(n));
    }
    static Formula binary(Kind k, Formula l, Formula r) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->a = l.n_;
        n->b = r.n_;
        return Formula(std::move(n));
    }
    static Formula quant(Kind k, std::string v, Formula body) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->name = std::move(v);
        n->a = body.n_;
        return Formula(std::move(n));
    }
    std::shared_ptr<const Node> n_;
};

template <class A>
bool operator==(const Formula<A>& f, const Formula<A>& g) {
    using K = typename Formula<A>::Kind;
    if (f.id() == g.id()) return true;
    if (f.kind() != g.kind()) return false;
    switch (f.kind()) {
        case K::Atom: return f.as_atom() == g.as_atom();
        case K::Not: return f.child() == g.child();
        case K::And:
        case K::Or:
        case K::Implies:
        case K::Iff: return f.lhs() == g.lhs() && f.rhs() == g.rhs();
        case K::Exists:
        case K::Forall: return f.var() == g.var() && f.body() == g.body();
        case K::RelApp: {
            if (f.rel_name() != g.rel_name()) return false;
            const auto& a = f.rel_args();
            const auto& b = g.rel_args();
            if (a.size() != b.size()) return false;
            for (size_t i = 0; i < a.size(); ++i)
                if (!(a[i] == b[i])) return false;
            return true;
        }
    }
    return false;
}
template <class A>
bool operator!=(const Formula<A>& f, const Formula<A>& g) { return !(f == g); }

template <class A>
size_t formula_hash(const Formula<A>& f) {
    using K = typename Formula<A>::Kind;
    auto mix = [](size_t h, size_t v) { return h * 1000003u ^ v; };
    size_t h = static_cast<size_t>(f.kind()) + 0x9e;
    switch (f.kind()) {
        case K::Atom: return mix(h, f.as_atom().hash());
        case K::Not: return mix(h, formula_hash(f.child()));
        case K::And:
        case K::Or:
        case K::Implies:
        case K::Iff: return mix(mix(h, formula_hash(f.lhs())), formula_hash(f.rhs()));
        case K::Exists:
        case K::Forall: return mix(mix(h, std::hash<std::string>{}(f.var())), formula_hash(f.body()));
        case K::RelApp: {
            h = mix(h, std::hash<std::string>{}(f.rel_name()));
            for (const auto& t : f.rel_args()) h = mix(h, A::term_hash_of(t));
            return h;
        }
    }
    return h;
}

template <class A>
void free_vars_into(const Formula<A>& f, std::set<std::string>& bound, std::set<std::string>& out) {
    using K = typename Formula<A>::Kind;
    switch (f.kind()) {
        case K::Atom: {
            for (const auto& v : f.as_atom().vars())
                if (!bound.count(v)) out.insert(v);
            return;
        }
        case K::Not: free_vars_into(f.child(), bound, out); return;
        case K::And:
        case K::Or:
        case K::Implies:
        case K::Iff:
            free_vars_into(f.lhs(), bound, out);
            free_vars_into(f.rhs(), bound, out);
            return;
        case K::Exists:
        case K::Forall: {
            bool added = bound.insert(f.var()).second;
            free_vars_into(f.body(), bound, out);
            if (added) bound.erase(f.var());
            return;
        }
        case K::RelApp: {
            for (const auto& t : f.rel_args())
                for (const auto& v : A::term_vars_of(t))
                    if (!bound.count(v)) out.insert(v);
            return;
        }
    }
}

template <class A>
std::set<std::string> free_vars(const Formula<A>& f) {
    std::set<std::string> bound, out;
    free_vars_into(f, bound, out);
    return out;
}

template <class A>
void all_names_into(const Formula<A>& f, std::set<std::string>& out) {
    using K = typename Formula<A>::Kind;
    switch (f.kind()) {
        case K::Atom: {
            auto vs = f.as_atom().vars();
            out.insert(vs.begin(), vs.end());
            return;
        }
        case K::Not: all_names_into(f.child(), out); return;
        case K::And:
        case K::Or:
        case K::Implies:
        case K::Iff:
            all_names_into(f.lhs(), out);
            all_names_into(f.rhs(), out);
            return;
        case K::Exists:
        case K::Forall:
            out.insert(f.var());
            all_names_into(f.body(), out);
            return;
        case K::RelApp:
            for (const auto& t : f.rel_args()) {
                auto vs = A::term_vars_of(t);
                out.insert(vs.begin(), vs.end());
            }
            return;
    }
}

// Every identifier occurring anywhere in f, free or bound.
template <class A>
std::set<std::string> all_names(const Formula<A>& f) {
    std::set<std::string> out;
    all_names_into(f, out);
    return out;
}

template <class A>
uint64_t node_count(const Formula<A>& f) {
    using K = typename Formula<A>::Kind;
    switch (f.kind()) {
        case K::Atom: return f.as_atom().node_count();
        case K::Not: return 1 + node_count(f.child());
        case K::And:
        case K::Or:
        case K::Implies:
        case K::Iff: return 1 + node_count(f.lhs()) + node_count(f.rhs());
        case K::Exists:
        case K::Forall: return 1 + node_count(f.body());
        case K::RelApp: {
            uint64_t n = 1;
            for (const auto& t : f.rel_args()) n += A::term_node_count_of(t);
            return n;
        }
    }
    return 0;
}

// Symbol count of the formula written out in the measured core language.
template <class A>
BigUint paper_symbols(const Formula<A>& f) {
    using K = typename Formula<A>::Kind;
    switch (f.kind()) {
        case K::Atom: return f.as_atom().paper_symbols();
        case K::Not: return BigUint(1) + paper_symbols(f.child());
        case K::And:
        case K::Or:
        case K::Implies:
        case K::Iff: return paper_symbols(f.lhs()) + BigUint(1) + paper_symbols(f.rhs());
        case K::Exists:
        case K::Forall: return BigUint(2) + paper_symbols(f.body());
        case K::RelApp: {
            BigUint n(1);
            for (const auto& t : f.rel_args()) n = n + A::term_symbols_of(t);
            return n;
        }
    }
    return BigUint(0);
}

// Capture-avoiding parallel substitution of terms for free variables.
template <class A>
Formula<A> substitute(const Formula<A>& f, const std::map<std::string, typename A::term_type>& m) {
    using K = typename Formula<A>::Kind;
    using F = Formula<A>;
    if (m.empty()) return f;
    switch (f.kind()) {
        case K::Atom: return F::atom(f.as_atom().substituted(m));
        case K::Not: return F::not_(substitute(f.child(), m));
        case K::And:
        case K::Or:
        case K::Implies:
        case K::Iff: return F::connective(f.kind(), substitute(f.lhs(), m), substitute(f.rhs(), m));
        case K::RelApp: {
            std::vector<typename A::term_type> args;
            args.reserve(f.rel_args().size());
            for (const auto& t : f.rel_args()) args.push_back(A::term_substituted(t, m));
            return F::rel(f.rel_name(), std::move(args));
        }
        case K::Exists:
        case K::Forall: {
            std::map<std::string, typename A::term_type> inner = m;
            inner.erase(f.var());
            if (inner.empty()) return f;
            // Rename the binder if any replacement term would be captured.
            bool capture = false;
            for (const auto& [v, t] : inner) {
                (void)v;
                if (A::term_vars_of(t).count(f.var())) { capture = true; break; }
            }
            std::string bv = f.var();
            F body = f.body();
            if (capture) {
                std::set<std::string> avoid = all_names(body);
                for (const auto& [v, t] : inner) {
                    avoid.insert(v);
                    auto tv = A::term_vars_of(t);
                    avoid.insert(tv.begin(), tv.end());
                }
                std::string fresh = fresh_name(f.var(), avoid);
                std::map<std::string, typename A::term_type> ren;
                ren.emplace(f.var(), A::term_var(fresh));
                body = substitute(body, ren);
                bv = fresh;
            }
            return F::quantifier(f.kind(), bv, substitute(body, inner));
        }
    }
    return f;
}

template <class A>
Formula<A> substitute(const Formula<A>& f, const std::string& v, const typename A::term_type& t) {
    std::map<std::string, typename A::term_type> m;
    m.emplace(v, t);
    return substitute(f, m);
}

// Negation normal form.  Implies and Iff are expanded, negation is pushed to
// atoms; an atom with a builtin negation (supplied by A) absorbs it.
template <class A>
Formula<A> nnf(const Formula<A>& f, bool negated = false) {
    using K = typename Formula<A>::Kind;
    using F = Formula<A>;
    switch (f.kind()) {
        case K::Atom: {
            if (!negated) return f;
            if (auto neg = f.as_atom().negated()) return F::atom(*neg);
            return F::not_(f);
        }
        case K::RelApp: return negated ? F::not_(f) : f;
        case K::Not: return nnf(f.child(), !negated);
        case K::And:
            return negated ? F::or_(nnf(f.lhs(), true), nnf(f.rhs(), true))
                           : F::and_(nnf(f.lhs(), false), nnf(f.rhs(), false));
        case K::Or:
            return negated ? F::and_(nnf(f.lhs(), true), nnf(f.rhs(), true))
                           : F::or_(nnf(f.lhs(), false), nnf(f.rhs(), false));
        case K::Implies:
            return negated ? F::and_(nnf(f.lhs(), false), nnf(f.rhs(), true))
                           : F::or_(nnf(f.lhs(), true), nnf(f.rhs(), false));
        case K::Iff: {
            // (l & r) | (~l & ~r), negated: (l & ~r) | (~l & r)
            F ll = nnf(f.lhs(), false), ln = nnf(f.lhs(), true);
            F rl = nnf(f.rhs(), false), rn = nnf(f.rhs(), true);
            if (negated) return F::or_(F::and_(ll, rn), F::and_(ln, rl));
            return F::or_(F::and_(ll, rl), F::and_(ln, rn));
        }
        case K::Exists:
            return negated ? F::forall(f.var(), nnf(f.body(), true))
                           : F::exists(f.var(), nnf(f.body(), false));
        case K::Forall:
            return negated ? F::exists(f.var(), nnf(f.body(), true))
                           : F::forall(f.var(), nnf(f.body(), false));
    }
    return f;
}

template <class A>
bool is_quantifier_free(const Formula<A>& f) {
    using K = typename Formula<A>::Kind;
    switch (f.kind()) {
        case K::Atom:
        case K::RelApp: return true;
        case K::Not: return is_quantifier_free(f.child());
        case K::Exists:
        case K::Forall: return false;
        default: return is_quantifier_free(f.lhs()) && is_quantifier_free(f.rhs());
    }
}

template <class A>
bool is_sentence(const Formula<A>& f) { return free_vars(f).empty(); }

// Applications of the named relation symbol, in depth-first order.
template <class A>
void collect_rel_args(const Formula<A>& f, const std::string& name,
                      std::vector<std::vector<typename A::term_type>>& out) {
    using K = typename Formula<A>::Kind;
    switch (f.kind()) {
        case K::Atom: return;
        case K::RelApp:
            if (f.rel_name() == name) out.push_back(f.rel_args());
            return;
        case K::Not: collect_rel_args(f.child(), name, out); return;
        case K::Exists:
        case K::Forall: collect_rel_args(f.body(), name, out); return;
        default:
            collect_rel_args(f.lhs(), name, out);
            collect_rel_args(f.rhs(), name, out);
            return;
    }
}

template <class A>
uint64_t count_rel(const Formula<A>& f, const std::string& name) {
    std::vector<std::vector<typename A::term_type>> v;
    collect_rel_args(f, name, v);
    return v.size();
}

// Occurrences of g among the subtrees of f, compared structurally.  A
// matching node still has its children searched, so nested matches count.
template <class A>
uint64_t count_subformula(const Formula<A>& f, const Formula<A>& g) {
    using K = typename Formula<A>::Kind;
    uint64_t n = f == g ? 1 : 0;
    switch (f.kind()) {
        case K::Atom:
        case K::RelApp: return n;
        case K::Not: return n + count_subformula(f.child(), g);
        case K::Exists:
        case K::Forall: return n + count_subformula(f.body(), g);
        default:
            return n + count_subformula(f.lhs(), g) + count_subformula(f.rhs(), g);
    }
}

// Replace every application of the named relation by build(args).  Calls to
// build are sequenced depth-first left to right, so stateful builds may
// number the occurrences.
template <class A>
Formula<A> replace_rel(const Formula<A>& f, const std::string& name,
                       const std::function<Formula<A>(const std::vector<typename A::term_type>&)>& build) {
    using K = typename Formula<A>::Kind;
    using F = Formula<A>;
    switch (f.kind()) {
        case K::Atom: return f;
        case K::RelApp: return f.rel_name() == name ? build(f.rel_args()) : f;
        case K::Not: return F::not_(replace_rel(f.child(), name, build));
        case K::Exists:
        case K::Forall: return F::quantifier(f.kind(), f.var(), replace_rel(f.body(), name, build));
        default: {
            F l = replace_rel(f.lhs(), name, build);
            F r = replace_rel(f.rhs(), name, build);
            return F::connective(f.kind(), l, r);
        }
    }
}

// ---------------------------------------------------------------------------
// Atoms of arithmetic over the naturals: t = u, t <= u, t =_m u.

struct PraAtom {
    enum class Rel { Eq, Le, Mod };
    using term_type = Term;

    Rel rel = Rel::Eq;
    uint64_t modulus = 0; // >= 1 exactly when rel == Mod
    Term lhs, rhs;

    static PraAtom eq(Term l, Term r) { return {Rel::Eq, 0, std::move(l), std::move(r)}; }
    static PraAtom le(Term l, Term r) { return {Rel::Le, 0, std::move(l), std::move(r)}; }
    static PraAtom mod(uint64_t m, Term l, Term r) {
        assert(m >= 1);
        return {Rel::Mod, m, std::move(l), std::move(r)};
    }
    static PraAtom truth() { return eq(Term::zero(), Term::zero()); }

    uint64_t node_count() const { return 1 + term_node_count(lhs) + term_node_count(rhs); }

    // t = u costs |t| + 1 + |u|.  t <= u abbreviates E z. t + z = u, so it
    // costs |t| + |u| + 5.  t =_m u abbreviates E z. z + ... + z + u = t with
    // m copies of z, so it costs 2m + 3 + |t| + |u|.
    BigUint paper_symbols() const {
        BigUint t = term_symbols(lhs), u = term_symbols(rhs);
        switch (rel) {
            case Rel::Eq: return t + BigUint(1) + u;
            case Rel::Le: return t + u + BigUint(5);
            case Rel::Mod:
                return BigUint(2) * BigUint(modulus) + BigUint(3) + t + u;
        }
        return BigUint(0);
    }

    std::set<std::string> vars() const {
        std::set<std::string> s = term_vars(lhs);
        collect_vars(rhs, s);
        return s;
    }

    PraAtom substituted(const std::map<std::string, Term>& m) const {
        return {rel, modulus, subst_term(lhs, m), subst_term(rhs, m)};
    }

    // Builtin negation over the naturals: ~(t <= u) is u + 1 <= t.
    std::optional<PraAtom> negated() const {
        if (rel == Rel::Le) return le(Term::add(rhs, Term::one()), lhs);
        return std::nullopt;
    }

    size_t hash() const {
        auto mix = [](size_t h, size_t v) { return h * 1000003u ^ v; };
        size_t h = static_cast<size_t>(rel) + 0x31;
        h = mix(h, static_cast<size_t>(modulus));
        return mix(mix(h, term_hash(lhs)), term_hash(rhs));
    }

    friend bool operator==(const PraAtom& a, const PraAtom& b) {
        return a.rel == b.rel && a.modulus == b.modulus && a.lhs == b.lhs && a.rhs == b.rhs;
    }

    static std::set<std::string> term_vars_of(const Term& t) { return term_vars(t); }
    static uint64_t term_node_count_of(const Term& t) { return term_node_count(t); }
    static BigUint term_symbols_of(const Term& t) { return term_symbols(t); }
    static Term term_substituted(const Term& t, const std::map<std::string, Term>& m) {
        return subst_term(t, m);
    }
    static Term term_var(const std::string& v) { return Term::var(v); }
    static size_t term_hash_of(const Term& t) { return term_hash(t); }
};

using PraFormula = Formula<PraAtom>;

inline PraFormula pra_true() { return PraFormula::atom(PraAtom::eq(Term::zero(), Term::zero())); }
inline PraFormula pra_false() { return PraFormula::atom(PraAtom::eq(Term::zero(), Term::one())); }

inline bool is_pra_true(const PraFormula& f) {
    return f.kind() == PraFormula::Kind::Atom && f.as_atom() == PraAtom::eq(Term::zero(), Term::zero());
}
inline bool is_pra_false(const PraFormula& f) {
    return f.kind() == PraFormula::Kind::Atom && f.as_atom() == PraAtom::eq(Term::zero(), Term::one());
}

// Left-folded chains; empty input yields the unit.
inline PraFormula fold_and(const std::vector<PraFormula>& fs) {
    if (fs.empty()) return pra_true();
    PraFormula acc = fs[0];
    for (size_t i = 1; i < fs.size(); ++i) acc = PraFormula::and_(acc, fs[i]);
    return acc;
}
inline PraFormula fold_or(const std::vector<PraFormula>& fs) {
    if (fs.empty()) return pra_false();
    PraFormula acc = fs[0];
    for (size_t i = 1; i < fs.size(); ++i) acc = PraFormula::or_(acc, fs[i]);
    return acc;
}

// Flatten a chain of the matching connective; any other node is one leaf.
inline void and_spine(const PraFormula& f, std::vector<PraFormula>& out) {
    if (f.kind() == PraFormula::Kind::And) {
        and_spine(f.lhs(), out);
        and_spine(f.rhs(), out);
    } else {
        out.push_back(f);
    }
}
inline void or_spine(const PraFormula& f, std::vector<PraFormula>& out) {
    if (f.kind() == PraFormula::Kind::Or) {
        or_spine(f.lhs(), out);
        or_spine(f.rhs(), out);
    } else {
        out.push_back(f);
    }
}

// Rewrite the extended language into the core one: Numeral and Scale are
// expanded into sums, t <= u into E z. t + z = u, and t =_m u into the
// m-fold shorthand E z. z + ... + z + u = t.  The result mentions only = atoms over
// {0, 1, +} terms; paper_symbols is preserved.
inline Term expand_term_sugar(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Zero:
        case Term::Kind::One:
        case Term::Kind::Var: return t;
        case Term::Kind::Numeral: {
            Term acc = Term::one();
            for (uint64_t i = 1; i < t.value(); ++i) acc = Term::add(acc, Term::one());
            return acc;
        }
        case Term::Kind::Add: return Term::add(expand_term_sugar(t.lhs()), expand_term_sugar(t.rhs()));
        case Term::Kind::Scale: {
            Term base = expand_term_sugar(t.scaled());
            Term acc = base;
            for (uint64_t i = 1; i < t.factor(); ++i) acc = Term::add(acc, base);
            return acc;
        }
    }
    return t;
}

inline PraFormula expand_sugar(const PraFormula& f) {
    using K = PraFormula::Kind;
    switch (f.kind()) {
        case K::Atom: {
            const PraAtom& a = f.as_atom();
            Term l = expand_term_sugar(a.lhs), r = expand_term_sugar(a.rhs);
            switch (a.rel) {
                case PraAtom::Rel::Eq: return PraFormula::atom(PraAtom::eq(l, r));
                case PraAtom::Rel::Le: {
                    std::set<std::string> avoid = term_vars(l);
                    collect_vars(r, avoid);
                    std::string z = fresh_name("z", avoid);
                    return PraFormula::exists(
                        z, PraFormula::atom(PraAtom::eq(Term::add(l, Term::var(z)), r)));
                }
                case PraAtom::Rel::Mod: {
                    // Metric normal form E z. z + ... + z + u = t with m copies
                    // of z.  Equivalent to the congruence whenever congruence
                    // forces u <= t, which holds for the residue atoms the
                    // generators emit (u below the modulus).
                    std::set<std::string> avoid = term_vars(l);
                    collect_vars(r, avoid);
                    std::string w = fresh_name("z", avoid);
                    Term chain = expand_term_sugar(Term::scale(a.modulus, Term::var(w)));
                    return PraFormula::exists(
                        w, PraFormula::atom(PraAtom::eq(Term::add(chain, r), l)));
                }
            }
            return f;
        }
        case K::Not: return PraFormula::not_(expand_sugar(f.child()));
        case K::Exists:
        case K::Forall: return PraFormula::quantifier(f.kind(), f.var(), expand_sugar(f.body()));
        case K::RelApp: {
            std::vector<Term> args;
            args.reserve(f.rel_args().size());
            for (const Term& t : f.rel_args()) args.push_back(expand_term_sugar(t));
            return PraFormula::rel(f.rel_name(), std::move(args));
        }
        default:
            return PraFormula::connective(f.kind(), expand_sugar(f.lhs()), expand_sugar(f.rhs()));
    }
}

// Symbol count of a core formula, rejecting anything expand_sugar removes.
inline BigUint count_core_symbols(const PraFormula& f) {
    using K = PraFormula::Kind;
    switch (f.kind()) {
        case K::Atom: {
            const PraAtom& a = f.as_atom();
            if (a.rel != PraAtom::Rel::Eq)
                throw std::invalid_argument("count_core_symbols: non-core atom");
            std::function<BigUint(const Term&)> ct = [&](const Term& t) -> BigUint {
                switch (t.kind()) {
                    case Term::Kind::Zero:
                    case Term::Kind::One:
                    case Term::Kind::Var: return BigUint(1);
                    case Term::Kind::Add: return ct(t.lhs()) + BigUint(1) + ct(t.rhs());
                    default: throw std::invalid_argument("count_core_symbols: non-core term");
                }
            };
            return ct(a.lhs) + BigUint(1) + ct(a.rhs);
        }
        case K::Not: return BigUint(1) + count_core_symbols(f.child());
        case K::Exists:
        case K::Forall: return BigUint(2) + count_core_symbols(f.body());
        case K::RelApp: throw std::invalid_argument("count_core_symbols: relation application");
        default:
            return count_core_symbols(f.lhs()) + BigUint(1) + count_core_symbols(f.rhs());
    }
}

} // namespace quelim
