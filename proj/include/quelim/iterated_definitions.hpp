// quelim :: iterated relational definitions with single-occurrence bodies
//
// A definition template is a base formula phi_0 together with a body Phi
// that mentions an uninterpreted relation R; the sequence it defines is
// phi_{n+1} = Phi(phi_n).  Substituting phi_n literally at every R
// occurrence multiplies sizes by the occurrence count, so k >= 2 gives
// exponential growth.  compress() rewrites Phi into an equivalent formula
// with exactly one R occurrence: each R(t_i) becomes a flag test e_i = 1,
// and a single universally quantified lookup forces every flag to agree
// with R at its argument tuple.  Equivalence needs only 0 != 1, which holds
// in every structure this library interprets.  Iterating the compressed
// body grows sizes by the same constant every step.
//
// The construction is generic over the atom type: it needs equality atoms
// and the constant terms 0 and 1 (A::eq, term zero()/one()), nothing else.
#pragma once

#include "quelim/formula.hpp"
#include "quelim/term.hpp"
#include "quelim/text.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace quelim::definitions {

// Template bodies use the plain formula grammar extended with relation
// applications R(t1, ..., tk); this is the only entry point that admits
// them.
inline PraFormula parse_body(const std::string& s) {
    ParseOptions o;
    o.allow_relations = true;
    return parse_pra(s, o);
}

// ---------------------------------------------------------------------------
// Prenexing.  The lookup gadget quantifies over all R argument tuples at a
// single point, so every R occurrence must be in scope there: quantifiers
// are pulled to an outer prefix first.  Biconditionals with a quantified
// side are split into two implications beforehand; all other connectives
// admit direct extraction once bound names are distinct.

template <class A>
struct Binder {
    typename Formula<A>::Kind kind; // Exists or Forall
    std::string var;
};

template <class A>
struct PrenexForm {
    std::vector<Binder<A>> prefix; // outermost first
    Formula<A> matrix;             // quantifier free
};

namespace detail {

// Rename bound variables so that all binders are distinct from each other,
// from every free variable, and from everything in avoid.
template <class A>
Formula<A> rectify_walk(const Formula<A>& f, std::set<std::string>& used) {
    using K = typename Formula<A>::Kind;
    using F = Formula<A>;
    switch (f.kind()) {
        case K::Atom:
        case K::RelApp: return f;
        case K::Not: return F::not_(rectify_walk(f.child(), used));
        case K::Exists:
        case K::Forall: {
            std::string v = f.var();
            F body = f.body();
            if (used.count(v)) {
                std::string nv = fresh_name(v, used);
                body = substitute(body, v, A::term_var(nv));
                v = nv;
            }
            used.insert(v);
            body = rectify_walk(body, used);
            return F::quantifier(f.kind(), v, body);
        }
        default: {
            F l = rectify_walk(f.lhs(), used);
            F r = rectify_walk(f.rhs(), used);
            return F::connective(f.kind(), l, r);
        }
    }
}

// Rewrite every biconditional with a quantified side as a conjunction of
// implications, bottom up.
template <class A>
Formula<A> split_quantified_iff(const Formula<A>& f) {
    using K = typename Formula<A>::Kind;
    using F = Formula<A>;
    switch (f.kind()) {
        case K::Atom:
        case K::RelApp: return f;
        case K::Not: return F::not_(split_quantified_iff(f.child()));
        case K::Exists:
        case K::Forall:
            return F::quantifier(f.kind(), f.var(), split_quantified_iff(f.body()));
        default: {
            F l = split_quantified_iff(f.lhs());
            F r = split_quantified_iff(f.rhs());
            if (f.kind() == K::Iff && !(is_quantifier_free(l) && is_quantifier_free(r)))
                return F::and_(F::implies(l, r), F::implies(r, l));
            return F::connective(f.kind(), l, r);
        }
    }
}

// Delete quantifiers in place, recording them outermost first; a binder
// under an odd number of negations or antecedent positions flips kind.
template <class A>
Formula<A> strip_prefix(const Formula<A>& f, bool flip, std::vector<Binder<A>>& out) {
    using K = typename Formula<A>::Kind;
    using F = Formula<A>;
    switch (f.kind()) {
        case K::Atom:
        case K::RelApp: return f;
        case K::Not: return F::not_(strip_prefix(f.child(), !flip, out));
        case K::Exists:
        case K::Forall: {
            bool ex = (f.kind() == K::Exists) != flip;
            out.push_back({ex ? K::Exists : K::Forall, f.var()});
            return strip_prefix(f.body(), flip, out);
        }
        case K::Implies: {
            F l = strip_prefix(f.lhs(), !flip, out);
            F r = strip_prefix(f.rhs(), flip, out);
            return F::implies(l, r);
        }
        case K::Iff:
            // quantified biconditionals were split beforehand
            if (!is_quantifier_free(f))
                throw std::logic_error("strip_prefix: quantified biconditional");
            return f;
        default: {
            F l = strip_prefix(f.lhs(), flip, out);
            F r = strip_prefix(f.rhs(), flip, out);
            return F::connective(f.kind(), l, r);
        }
    }
}

} // namespace detail

template <class A>
Formula<A> rectify(const Formula<A>& f, std::set<std::string> avoid = {}) {
    for (const std::string& v : free_vars(f)) avoid.insert(v);
    return detail::rectify_walk(f, avoid);
}

template <class A>
PrenexForm<A> prenex_parts(const Formula<A>& f, std::set<std::string> avoid = {}) {
    Formula<A> r = rectify(detail::split_quantified_iff(f), std::move(avoid));
    PrenexForm<A> out{{}, r};
    out.matrix = detail::strip_prefix(r, false, out.prefix);
    return out;
}

template <class A>
Formula<A> assemble(const PrenexForm<A>& p) {
    Formula<A> acc = p.matrix;
    for (auto it = p.prefix.rbegin(); it != p.prefix.rend(); ++it)
        acc = Formula<A>::quantifier(it->kind, it->var, acc);
    return acc;
}

template <class A>
Formula<A> prenex(const Formula<A>& f) {
    return assemble(prenex_parts(f));
}

// ---------------------------------------------------------------------------
// Single-occurrence compression.
//
// With occurrences R(t_1), ..., R(t_k) in the matrix, the result is
//
//   prefix . E e1 ... E ek (
//       /\_i (e_i = 0 \/ e_i = 1)
//     & matrix[R(t_i) := e_i = 1]
//     & A u1 ... A um A f ( \/_i (u = t_i & f = e_i) -> (f = 1 <-> R(u)) ) )
//
// For any fixed prefix values each R(t_i) has a definite truth value, and
// instantiating the lookup at u := t_i, f := e_i forces e_i = 1 exactly
// when R(t_i) holds; since e_i is 0 or 1 and 0 != 1, the flag assignment
// exists, is unique, and makes the rewritten matrix agree with the
// original.  Mixed polarities need no special handling.

template <class A>
Formula<A> compress(const Formula<A>& body, const std::string& rel, size_t arity,
                    const std::set<std::string>& extra_avoid = {}) {
    using F = Formula<A>;
    using T = typename A::term_type;
    using K = typename F::Kind;

    std::vector<std::vector<T>> occ0;
    collect_rel_args(body, rel, occ0);
    if (occ0.empty())
        throw std::invalid_argument("compress: no occurrence of " + rel + " in the body");
    for (const auto& a : occ0)
        if (a.size() != arity)
            throw std::invalid_argument("compress: " + rel + " occurrence with wrong arity");

    std::set<std::string> avoid = extra_avoid;
    avoid.insert(rel);
    PrenexForm<A> p = prenex_parts(body, avoid);

    std::vector<std::vector<T>> occ;
    collect_rel_args(p.matrix, rel, occ);
    size_t k = occ.size();

    std::set<std::string> used = all_names(p.matrix);
    for (const Binder<A>& b : p.prefix) used.insert(b.var);
    used.insert(extra_avoid.begin(), extra_avoid.end());
    auto claim = [&used](const std::string& base) {
        std::string n = used.count(base) ? fresh_name(base, used) : base;
        used.insert(n);
        return n;
    };
    std::vector<std::string> flags, probes;
    for (size_t i = 1; i <= k; ++i) flags.push_back(claim("e" + std::to_string(i)));
    for (size_t j = 1; j <= arity; ++j) probes.push_back(claim("u" + std::to_string(j)));
    std::string fv = claim("f");

    auto eq = [](T l, T r) { return F::atom(A::eq(std::move(l), std::move(r))); };

    F bits = eq(T::var(flags[0]), T::zero());
    bits = F::or_(bits, eq(T::var(flags[0]), T::one()));
    for (size_t i = 1; i < k; ++i) {
        F two = F::or_(eq(T::var(flags[i]), T::zero()), eq(T::var(flags[i]), T::one()));
        bits = F::and_(bits, two);
    }

    size_t idx = 0;
    F flagged = replace_rel<A>(p.matrix, rel, [&](const std::vector<T>&) {
        return eq(T::var(flags[idx++]), T::one());
    });

    F ante;
    for (size_t i = 0; i < k; ++i) {
        F branch = eq(T::var(probes[0]), occ[i][0]);
        for (size_t j = 1; j < arity; ++j)
            branch = F::and_(branch, eq(T::var(probes[j]), occ[i][j]));
        branch = F::and_(branch, eq(T::var(fv), T::var(flags[i])));
        ante = i == 0 ? branch : F::or_(ante, branch);
    }
    std::vector<T> probe_terms;
    for (const std::string& u : probes) probe_terms.push_back(T::var(u));
    F look = F::implies(ante, F::iff(eq(T::var(fv), T::one()), F::rel(rel, probe_terms)));
    look = F::quantifier(K::Forall, fv, look);
    for (size_t j = arity; j-- > 0;) look = F::quantifier(K::Forall, probes[j], look);

    F core = F::and_(F::and_(bits, flagged), look);
    for (size_t i = k; i-- > 0;) core = F::quantifier(K::Exists, flags[i], core);
    p.matrix = core;
    return assemble(p);
}

// ---------------------------------------------------------------------------
// Definition templates and their iterates.

template <class A>
struct Template {
    Formula<A> base; // phi_0; must not mention rel
    Formula<A> body; // Phi; mentions rel at least once
    std::string rel = "R";
    std::vector<std::string> args; // designated argument variables of base
    size_t arity() const { return args.size(); }
};

template <class A>
class IteratedDefinition {
public:
    explicit IteratedDefinition(Template<A> t) : tpl_(std::move(t)) {
        if (tpl_.args.empty())
            throw std::invalid_argument("iterated definition: no argument variables");
        std::set<std::string> distinct(tpl_.args.begin(), tpl_.args.end());
        if (distinct.size() != tpl_.args.size())
            throw std::invalid_argument("iterated definition: duplicate argument variable");
        if (count_rel(tpl_.base, tpl_.rel) != 0)
            throw std::invalid_argument("iterated definition: base mentions " + tpl_.rel);
        std::vector<std::vector<typename A::term_type>> occ;
        collect_rel_args(tpl_.body, tpl_.rel, occ);
        if (occ.empty())
            throw std::invalid_argument("iterated definition: body never mentions " + tpl_.rel);
        for (const auto& a : occ)
            if (a.size() != tpl_.args.size())
                throw std::invalid_argument("iterated definition: arity mismatch in body");
        // Binders must stay clear of the base formula's free variables, or
        // plugging phi_n into the body would capture its parameters.
        std::set<std::string> avoid = free_vars(tpl_.base);
        avoid.insert(tpl_.args.begin(), tpl_.args.end());
        compressed_ = compress(tpl_.body, tpl_.rel, tpl_.args.size(), avoid);
        naive_body_ = rectify(detail::split_quantified_iff(tpl_.body), avoid);
        cache_.push_back(tpl_.base);
    }

    const Template<A>& tpl() const { return tpl_; }
    const Formula<A>& compressed_body() const { return compressed_; }

    // phi_n through the compressed body: linear size growth, cached.
    Formula<A> iterate(uint64_t n) {
        while (cache_.size() <= n) cache_.push_back(plug(compressed_, cache_.back()));
        return cache_[n];
    }

    // phi_n by substitution at every occurrence of the original body: the
    // exponential reference object the compression avoids.
    Formula<A> expand_naive(uint64_t n, uint64_t node_budget = uint64_t(1) << 22) const {
        Formula<A> acc = tpl_.base;
        for (uint64_t i = 0; i < n; ++i) {
            acc = plug(naive_body_, acc);
            if (node_count(acc) > node_budget)
                throw budget_error("naive expansion exceeds the node budget");
        }
        return acc;
    }

private:
    // host with every rel occurrence replaced by phi at the occurrence's
    // argument terms, capture-avoidingly.
    Formula<A> plug(const Formula<A>& host, const Formula<A>& phi) const {
        return replace_rel<A>(host, tpl_.rel,
                              [&](const std::vector<typename A::term_type>& ts) {
                                  std::map<std::string, typename A::term_type> m;
                                  for (size_t i = 0; i < tpl_.args.size(); ++i)
                                      m.emplace(tpl_.args[i], ts[i]);
                                  return substitute(phi, m);
                              });
    }

    Template<A> tpl_;
    Formula<A> compressed_;
    Formula<A> naive_body_;
    std::vector<Formula<A>> cache_;
};

} // namespace quelim::definitions
