#pragma once
// Quantifier elimination for linear arithmetic over N with order and
// congruence atoms, done as five literal-level rewrite steps per eliminated
// variable, plus the closed-sentence decision procedure built on top of it.
//
// The transformation per existential variable x:
//   NNF    negation normal form; negated order atoms rewritten away
//   Step1  cancel x from one side of each literal (cancellative semigroup)
//   Step2  scale literals so every x-coefficient equals C = lcm of them
//   Step3  add companion terms so every x-side reads Cx + t, t the sum of all
//   Step4  swap Cx + t for a fresh y guarded by t <= y and y ==_C t
//   Step5  replace E y with a finite disjunction over candidate values t + r
// followed by a recorded boolean simplification pass.  Universals go through
// the double negation of their existential dual.  Every rewrite is logged as
// a whole-formula snapshot so consecutive trace entries chain exactly.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "quelim/formula.hpp"
#include "quelim/oracle.hpp"
#include "quelim/primes.hpp"
#include "quelim/term.hpp"

namespace quelim::qe {

enum class StepTag { NNF, Step1, Step2, Step3, Step4, Step5, BooleanSimplify };

inline const char* step_tag_name(StepTag t) {
    switch (t) {
        case StepTag::NNF: return "NNF";
        case StepTag::Step1: return "Step1";
        case StepTag::Step2: return "Step2";
        case StepTag::Step3: return "Step3";
        case StepTag::Step4: return "Step4";
        case StepTag::Step5: return "Step5";
        case StepTag::BooleanSimplify: return "BooleanSimplify";
    }
    return "?";
}

struct TraceEntry {
    StepTag tag = StepTag::NNF;
    PraFormula before, after;
    std::string note;
};
using RewriteTrace = std::vector<TraceEntry>;

struct ElimResult {
    PraFormula result;               // free of the eliminated variable
    uint64_t big_C = 1;              // lcm of the x-coefficients
    uint64_t big_D = 1;              // lcm of the moduli in the guarded form
    std::vector<LinearTerm> term_set_T; // candidate base terms, 0 first
    RewriteTrace trace;
};

struct QeBudget {
    uint64_t node_budget = uint64_t(1) << 22;
};

struct EliminationRun {
    PraFormula result;
    RewriteTrace trace;
};

namespace detail {

// Literals are atoms or negated atoms.  Everything else is walked through,
// which keeps the helpers total; the steps rely on NNF input regardless.
template <class Fn>
PraFormula map_literals(const PraFormula& f, const Fn& fn) {
    using K = PraFormula::Kind;
    switch (f.kind()) {
        case K::Atom: return fn(f);
        case K::Not:
            if (f.child().kind() == K::Atom) return fn(f);
            return PraFormula::not_(map_literals(f.child(), fn));
        case K::Exists:
        case K::Forall:
            return PraFormula::quantifier(f.kind(), f.var(), map_literals(f.body(), fn));
        case K::RelApp: return f;
        default: {
            // sequenced explicitly so stateful fns see literals left to right
            PraFormula l = map_literals(f.lhs(), fn);
            PraFormula r = map_literals(f.rhs(), fn);
            return PraFormula::connective(f.kind(), l, r);
        }
    }
}

template <class Fn>
void for_each_literal(const PraFormula& f, const Fn& fn) {
    using K = PraFormula::Kind;
    switch (f.kind()) {
        case K::Atom: fn(f.as_atom(), false); return;
        case K::Not:
            if (f.child().kind() == K::Atom) fn(f.child().as_atom(), true);
            else for_each_literal(f.child(), fn);
            return;
        case K::Exists:
        case K::Forall: for_each_literal(f.body(), fn); return;
        case K::RelApp: return;
        default:
            for_each_literal(f.lhs(), fn);
            for_each_literal(f.rhs(), fn);
            return;
    }
}

inline bool has_relapp(const PraFormula& f) {
    using K = PraFormula::Kind;
    switch (f.kind()) {
        case K::Atom: return false;
        case K::RelApp: return true;
        case K::Not: return has_relapp(f.child());
        case K::Exists:
        case K::Forall: return has_relapp(f.body());
        default: return has_relapp(f.lhs()) || has_relapp(f.rhs());
    }
}

inline LinearTerm lt_scale(const LinearTerm& l, uint64_t s) {
    LinearTerm out;
    out.add(l, s);
    return out;
}

// total - part, defined because part was summed into total coefficient-wise.
inline LinearTerm lt_sub(const LinearTerm& total, const LinearTerm& part) {
    LinearTerm out;
    out.constant = total.constant - part.constant;
    for (const auto& [v, c] : total.coeff) {
        uint64_t p = part.coeff_of(v);
        if (c > p) out.coeff[v] = c - p;
    }
    return out;
}

inline PraFormula rebuild_literal(const PraAtom& a, bool negated) {
    PraFormula lit = PraFormula::atom(a);
    return negated ? PraFormula::not_(lit) : lit;
}

} // namespace detail

// Truth of an atom decidable from its linearizations alone, over N.
inline std::optional<bool> literal_truth(const PraAtom& a) {
    LinearTerm l = linearize(a.lhs), r = linearize(a.rhs);
    if (a.rel == PraAtom::Rel::Mod && a.modulus == 1) return true;
    if (l == r) return true; // reflexivity for =, <=, ==_m
    auto pointwise_le = [](const LinearTerm& s, const LinearTerm& t) {
        if (s.constant > t.constant) return false;
        for (const auto& [v, c] : s.coeff)
            if (c > t.coeff_of(v)) return false;
        return true;
    };
    switch (a.rel) {
        case PraAtom::Rel::Eq:
            if (l.coeff == r.coeff) return false; // constants differ, sides never meet
            return std::nullopt;
        case PraAtom::Rel::Le:
            if (pointwise_le(l, r)) return true;
            if (pointwise_le(r, l) && l.constant > r.constant) return false;
            return std::nullopt;
        case PraAtom::Rel::Mod:
            if (l.coeff == r.coeff) {
                uint64_t diff = l.constant > r.constant ? l.constant - r.constant
                                                        : r.constant - l.constant;
                return diff % a.modulus == 0;
            }
            return std::nullopt;
    }
    return std::nullopt;
}

// Constant folding plus duplicate-disjunct removal.
inline PraFormula simplify_bool(const PraFormula& f) {
    using K = PraFormula::Kind;
    switch (f.kind()) {
        case K::Atom: {
            if (auto t = literal_truth(f.as_atom())) return *t ? pra_true() : pra_false();
            return f;
        }
        case K::RelApp: return f;
        case K::Not: {
            PraFormula c = simplify_bool(f.child());
            if (is_pra_true(c)) return pra_false();
            if (is_pra_false(c)) return pra_true();
            return PraFormula::not_(c);
        }
        case K::And: {
            PraFormula a = simplify_bool(f.lhs()), b = simplify_bool(f.rhs());
            if (is_pra_false(a) || is_pra_false(b)) return pra_false();
            if (is_pra_true(a)) return b;
            if (is_pra_true(b)) return a;
            return PraFormula::and_(a, b);
        }
        case K::Or: {
            std::vector<PraFormula> spine;
            or_spine(f, spine);
            std::vector<std::pair<size_t, PraFormula>> kept;
            for (const PraFormula& d : spine) {
                PraFormula s = simplify_bool(d);
                if (is_pra_true(s)) return pra_true();
                if (is_pra_false(s)) continue;
                size_t h = formula_hash(s);
                bool dup = false;
                for (const auto& [kh, kf] : kept)
                    if (kh == h && kf == s) { dup = true; break; }
                if (!dup) kept.emplace_back(h, s);
            }
            if (kept.empty()) return pra_false();
            std::vector<PraFormula> out;
            out.reserve(kept.size());
            for (auto& [h, g] : kept) out.push_back(std::move(g));
            return fold_or(out);
        }
        case K::Implies: {
            PraFormula a = simplify_bool(f.lhs()), b = simplify_bool(f.rhs());
            if (is_pra_false(a) || is_pra_true(b)) return pra_true();
            if (is_pra_true(a)) return b;
            if (is_pra_false(b)) return PraFormula::not_(a);
            return PraFormula::implies(a, b);
        }
        case K::Iff: {
            PraFormula a = simplify_bool(f.lhs()), b = simplify_bool(f.rhs());
            if (is_pra_true(a)) return b;
            if (is_pra_true(b)) return a;
            if (is_pra_false(a) && is_pra_false(b)) return pra_true();
            return PraFormula::iff(a, b);
        }
        case K::Exists:
        case K::Forall: {
            PraFormula b = simplify_bool(f.body());
            // the domain is nonempty, so a constant body passes through
            if (is_pra_true(b) || is_pra_false(b)) return b;
            return PraFormula::quantifier(f.kind(), f.var(), b);
        }
    }
    return f;
}

// Cancel min(coeff_left, coeff_right) occurrences of x from both sides of
// one literal; sound by cancellativity of + over N, for congruences by
// additive cancellation mod m.
inline PraFormula step1_isolate(const PraFormula& literal, const std::string& x) {
    using K = PraFormula::Kind;
    if (literal.kind() == K::Not)
        return PraFormula::not_(step1_isolate(literal.child(), x));
    const PraAtom& a = literal.as_atom();
    LinearTerm l = linearize(a.lhs), r = linearize(a.rhs);
    uint64_t c = std::min(l.coeff_of(x), r.coeff_of(x));
    if (c == 0) return literal;
    auto drop = [&](LinearTerm& s) {
        if (s.coeff[x] == c) s.coeff.erase(x);
        else s.coeff[x] -= c;
    };
    drop(l);
    drop(r);
    PraAtom out = a;
    out.lhs = to_term(l);
    out.rhs = to_term(r);
    return PraFormula::atom(out);
}

// Scale every x-literal so its x-coefficient becomes C = lcm of all of them;
// order and equality atoms are scaled on both sides, congruences also in the
// modulus.  C = 1 when x occurs in no literal.
inline std::pair<PraFormula, uint64_t> step2_unify(const PraFormula& f, const std::string& x) {
    uint64_t C = 1;
    detail::for_each_literal(f, [&](const PraAtom& a, bool) {
        LinearTerm l = linearize(a.lhs), r = linearize(a.rhs);
        uint64_t k = l.coeff_of(x) + r.coeff_of(x); // one side is x-free here
        if (k > 0) C = lcm_or_throw(C, k);
    });
    PraFormula out = detail::map_literals(f, [&](const PraFormula& lit) {
        bool neg = lit.kind() == PraFormula::Kind::Not;
        const PraAtom& a = (neg ? lit.child() : lit).as_atom();
        LinearTerm l = linearize(a.lhs), r = linearize(a.rhs);
        uint64_t k = l.coeff_of(x) + r.coeff_of(x);
        if (k == 0) return lit;
        uint64_t s = C / k;
        PraAtom b = a;
        b.lhs = to_term(detail::lt_scale(l, s));
        b.rhs = to_term(detail::lt_scale(r, s));
        if (b.rel == PraAtom::Rel::Mod) b.modulus = checked_mul_u64(b.modulus, s);
        return detail::rebuild_literal(b, neg);
    });
    return {out, C};
}

// Add to each x-literal the companion terms of all the others, so that every
// x-side reads Cx + t with one shared t; the x-side is then abbreviated by
// the fresh variable y.  Returns the formula in y together with t.
inline std::pair<PraFormula, LinearTerm> step3_align(const PraFormula& f, const std::string& x,
                                                     uint64_t C, const std::string& y) {
    (void)C;
    std::vector<LinearTerm> companions;
    detail::for_each_literal(f, [&](const PraAtom& a, bool) {
        LinearTerm l = linearize(a.lhs), r = linearize(a.rhs);
        if (l.coeff_of(x) == 0 && r.coeff_of(x) == 0) return;
        LinearTerm side = l.coeff_of(x) > 0 ? l : r;
        side.coeff.erase(x);
        companions.push_back(std::move(side));
    });
    LinearTerm t;
    for (const LinearTerm& c : companions) t.add(c);
    size_t idx = 0;
    PraFormula out = detail::map_literals(f, [&](const PraFormula& lit) {
        bool neg = lit.kind() == PraFormula::Kind::Not;
        const PraAtom& a = (neg ? lit.child() : lit).as_atom();
        LinearTerm l = linearize(a.lhs), r = linearize(a.rhs);
        if (l.coeff_of(x) == 0 && r.coeff_of(x) == 0) return lit;
        bool x_left = l.coeff_of(x) > 0;
        LinearTerm rest = detail::lt_sub(t, companions[idx++]);
        LinearTerm other = x_left ? r : l;
        other.add(rest);
        PraAtom b = a;
        (x_left ? b.lhs : b.rhs) = Term::var(y);
        (x_left ? b.rhs : b.lhs) = to_term(other);
        return detail::rebuild_literal(b, neg);
    });
    return {out, t};
}

// t <= y and y ==_C t express exactly that y = Cx + t for some natural x.
inline PraFormula step4_guard(const PraFormula& f_y, const LinearTerm& t, uint64_t C,
                              const std::string& y) {
    PraFormula lower = PraFormula::atom(PraAtom::le(to_term(t), Term::var(y)));
    PraFormula cong = PraFormula::atom(PraAtom::mod(C, Term::var(y), to_term(t)));
    return PraFormula::and_(PraFormula::and_(lower, cong), f_y);
}

// Replace E y F(y) by the disjunction of F(t + r) over all base terms t in T
// and remainders 0 <= r <= D.  T holds 0 and the y-free sides of order and
// equality atoms of either polarity; D is the lcm of all moduli.
inline ElimResult step5_expand(const PraFormula& f3, const std::string& y, uint64_t big_C = 1,
                               uint64_t max_nodes = UINT64_MAX) {
    ElimResult er;
    er.big_C = big_C;
    uint64_t D = 1;
    std::vector<LinearTerm> T;
    T.push_back(LinearTerm{});
    detail::for_each_literal(f3, [&](const PraAtom& a, bool) {
        if (a.rel == PraAtom::Rel::Mod) {
            D = lcm_or_throw(D, a.modulus);
            return;
        }
        const Term* other = nullptr;
        if (a.lhs.kind() == Term::Kind::Var && a.lhs.name() == y) other = &a.rhs;
        else if (a.rhs.kind() == Term::Kind::Var && a.rhs.name() == y) other = &a.lhs;
        if (!other) return;
        LinearTerm u = linearize(*other);
        if (u.coeff_of(y) != 0) return;
        if (std::find(T.begin(), T.end(), u) == T.end()) T.push_back(std::move(u));
    });
    std::vector<PraFormula> disjuncts;
    uint64_t nodes = 0;
    for (const LinearTerm& t : T) {
        for (uint64_t r = 0; r <= D; ++r) {
            LinearTerm cand = t;
            cand.constant = checked_add_u64(cand.constant, r);
            PraFormula d = substitute(f3, y, to_term(cand));
            nodes += node_count(d);
            if (nodes > max_nodes)
                throw budget_error("candidate expansion exceeds the node budget");
            disjuncts.push_back(std::move(d));
        }
    }
    er.result = fold_or(disjuncts);
    er.big_D = D;
    er.term_set_T = std::move(T);
    er.trace.push_back({StepTag::Step5, PraFormula::exists(y, f3), er.result,
                        "expanded over " + std::to_string(er.term_set_T.size()) +
                            " base terms and remainders 0.." + std::to_string(D)});
    return er;
}

namespace detail {

using Plug = std::function<PraFormula(const PraFormula&)>;

class Eliminator {
public:
    explicit Eliminator(const QeBudget& budget) : budget_(budget) {}

    PraFormula run(const PraFormula& f) {
        Plug id = [](const PraFormula& h) { return h; };
        check(f);
        return walk(f, id);
    }

    RewriteTrace take_trace() { return std::move(trace_); }
    const ElimResult* last_details() const { return last_ ? &*last_ : nullptr; }

private:
    using K = PraFormula::Kind;

    void check(const PraFormula& whole) {
        if (node_count(whole) > budget_.node_budget)
            throw budget_error("formula exceeds the elimination node budget");
    }

    void record(StepTag tag, const Plug& plug, const PraFormula& before,
                const PraFormula& after, std::string note) {
        PraFormula wa = plug(after);
        check(wa);
        trace_.push_back({tag, plug(before), std::move(wa), std::move(note)});
    }

    PraFormula walk(const PraFormula& f, const Plug& plug) {
        switch (f.kind()) {
            case K::Atom:
            case K::RelApp: return f;
            case K::Not: {
                Plug p = [plug](const PraFormula& h) { return plug(PraFormula::not_(h)); };
                return PraFormula::not_(walk(f.child(), p));
            }
            case K::And:
            case K::Or:
            case K::Implies:
            case K::Iff: {
                K k = f.kind();
                PraFormula rhs = f.rhs();
                Plug pl = [plug, k, rhs](const PraFormula& h) {
                    return plug(PraFormula::connective(k, h, rhs));
                };
                PraFormula a = walk(f.lhs(), pl);
                Plug pr = [plug, k, a](const PraFormula& h) {
                    return plug(PraFormula::connective(k, a, h));
                };
                PraFormula b = walk(f.rhs(), pr);
                return PraFormula::connective(k, a, b);
            }
            case K::Exists: {
                std::string x = f.var();
                Plug pb = [plug, x](const PraFormula& h) {
                    return plug(PraFormula::exists(x, h));
                };
                PraFormula body = walk(f.body(), pb);
                return eliminate_one(x, body, plug);
            }
            case K::Forall: {
                std::string x = f.var();
                Plug pb = [plug, x](const PraFormula& h) {
                    return plug(PraFormula::forall(x, h));
                };
                PraFormula body = walk(f.body(), pb);
                PraFormula negb = nnf(PraFormula::not_(body));
                record(StepTag::NNF, plug, PraFormula::forall(x, body),
                       PraFormula::not_(PraFormula::exists(x, negb)),
                       "A " + x + " rewritten as the negated existential dual");
                Plug pn = [plug](const PraFormula& h) { return plug(PraFormula::not_(h)); };
                PraFormula h = eliminate_one(x, negb, pn);
                PraFormula pushed = nnf(PraFormula::not_(h));
                record(StepTag::NNF, plug, PraFormula::not_(h), pushed,
                       "outer negation pushed inward");
                PraFormula s = simplify_bool(pushed);
                record(StepTag::BooleanSimplify, plug, pushed, s,
                       "constant folding after the double negation");
                return s;
            }
        }
        return f;
    }

    // One existential over a quantifier-free body, with every stage recorded
    // in the surrounding context.
    PraFormula eliminate_one(const std::string& x, const PraFormula& body, const Plug& plug) {
        if (has_relapp(body))
            throw std::invalid_argument(
                "quantifier elimination is not defined over relation applications");
        PraFormula b1 = nnf(body);
        record(StepTag::NNF, plug, PraFormula::exists(x, body), PraFormula::exists(x, b1),
               "negation normal form; negated order atoms rewritten");
        PraFormula b2 = map_literals(b1, [&](const PraFormula& lit) {
            return step1_isolate(lit, x);
        });
        record(StepTag::Step1, plug, PraFormula::exists(x, b1), PraFormula::exists(x, b2),
               x + " cancelled onto one side of each literal");
        auto [b3, C] = step2_unify(b2, x);
        record(StepTag::Step2, plug, PraFormula::exists(x, b2), PraFormula::exists(x, b3),
               "coefficients of " + x + " unified to " + std::to_string(C));
        std::set<std::string> avoid = all_names(b3);
        avoid.insert(x);
        std::string y = fresh_name("y", avoid);
        auto [fy, t] = step3_align(b3, x, C, y);
        Term cx_t = [&] {
            LinearTerm s = t;
            s.add_var(x, C);
            return to_term(s);
        }();
        PraFormula aligned_x = substitute(fy, y, cx_t);
        record(StepTag::Step3, plug, PraFormula::exists(x, b3), PraFormula::exists(x, aligned_x),
               "every " + x + "-side aligned to the shared companion sum");
        PraFormula b5 = step4_guard(fy, t, C, y);
        record(StepTag::Step4, plug, PraFormula::exists(x, aligned_x), PraFormula::exists(y, b5),
               y + " = " + std::to_string(C) + "*" + x +
                   " + t introduced with its range and congruence guard");
        ElimResult er = step5_expand(b5, y, C, budget_.node_budget);
        record(StepTag::Step5, plug, PraFormula::exists(y, b5), er.result,
               er.trace.front().note);
        PraFormula s = simplify_bool(er.result);
        record(StepTag::BooleanSimplify, plug, er.result, s,
               "constant folding and duplicate disjunct removal");
        er.trace.clear();
        er.result = s;
        last_ = std::move(er);
        return s;
    }

    QeBudget budget_;
    RewriteTrace trace_;
    std::optional<ElimResult> last_;
};

} // namespace detail

// Eliminate every quantifier, innermost first, returning the quantifier-free
// result and the full chained rewrite trace.
inline EliminationRun eliminate_all(const PraFormula& f, const QeBudget& budget = {}) {
    detail::Eliminator e(budget);
    PraFormula r = e.run(f);
    return {std::move(r), e.take_trace()};
}

// Convenience for a single top-level existential: full trace plus the C, D
// and T of its expansion; the result is the simplified eliminated formula.
inline ElimResult eliminate_exists(const PraFormula& exists_node, const QeBudget& budget = {}) {
    if (exists_node.kind() != PraFormula::Kind::Exists)
        throw std::invalid_argument("eliminate_exists expects an existential formula");
    if (!is_quantifier_free(exists_node.body()))
        throw std::invalid_argument("eliminate_exists expects a quantifier-free body");
    detail::Eliminator e(budget);
    PraFormula r = e.run(exists_node);
    ElimResult out = *e.last_details();
    out.result = std::move(r);
    out.trace = e.take_trace();
    return out;
}

// Truth of a closed quantifier-free formula through the closed-literal rules.
inline bool decide_closed_by_rules(const PraFormula& f) {
    using K = PraFormula::Kind;
    switch (f.kind()) {
        case K::Atom: return decide_closed_literal(f.as_atom(), false);
        case K::Not:
            if (f.child().kind() == K::Atom)
                return decide_closed_literal(f.child().as_atom(), true);
            return !decide_closed_by_rules(f.child());
        case K::And: return decide_closed_by_rules(f.lhs()) && decide_closed_by_rules(f.rhs());
        case K::Or: return decide_closed_by_rules(f.lhs()) || decide_closed_by_rules(f.rhs());
        case K::Implies:
            return !decide_closed_by_rules(f.lhs()) || decide_closed_by_rules(f.rhs());
        case K::Iff: return decide_closed_by_rules(f.lhs()) == decide_closed_by_rules(f.rhs());
        default: throw std::logic_error("decide_closed_by_rules needs a quantifier-free input");
    }
}

// Decide a closed sentence: eliminate everything, then evaluate the closed
// remainder literal by literal.
inline bool decide(const PraFormula& sentence, const QeBudget& budget = {}) {
    if (!is_sentence(sentence))
        throw std::invalid_argument("decide requires a sentence without free variables");
    EliminationRun run = eliminate_all(sentence, budget);
    return decide_closed_by_rules(run.result);
}

} // namespace quelim::qe
