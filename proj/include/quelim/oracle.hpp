// quelim :: bounded evaluation over the naturals
//
// Three-valued brute-force semantics for formulas of arithmetic over N.  A
// quantifier is searched over an initial segment; the verdict is exact (True
// or False) whenever the searched segment provably determines the formula,
// and Unknown otherwise.  The determination argument: every atom containing
// the searched variable v is linear in v, so beyond a computable threshold B
// its truth value freezes (order and equality atoms) or becomes periodic with
// period dividing its modulus (congruence atoms).  Beyond B the whole body is
// therefore L-periodic in v, L = lcm of the in-scope moduli, and searching
// [0, B + W] with W >= L covers one full period past every threshold.  When B
// is not computable (an atom mixes v with a variable that ranges over all of
// N, or v occurs under an uninterpreted relation) the search is a heuristic
// and exhaustion yields Unknown, unless the closed_world policy is set, in
// which case exhaustion is read as domain exhaustion.  Enlarging the witness
// bound never flips a True verdict to False or vice versa.
#pragma once

#include "quelim/formula.hpp"
#include "quelim/primes.hpp"
#include "quelim/term.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace quelim {

enum class Truth : uint8_t { False = 0, True = 1, Unknown = 2 };

inline Truth neg3(Truth t) {
    if (t == Truth::Unknown) return Truth::Unknown;
    return t == Truth::True ? Truth::False : Truth::True;
}

struct Verdict {
    Truth truth = Truth::Unknown;
    std::string reason; // populated when truth == Unknown

    bool is_true() const { return truth == Truth::True; }
    bool is_false() const { return truth == Truth::False; }
    bool is_unknown() const { return truth == Truth::Unknown; }
};

struct Budget {
    // Width of the search window past the computed stabilization point.  A
    // searched variable with atom thresholds at most B and congruence periods
    // dividing W is decided exactly; the default 60 = lcm(2..6) covers all
    // moduli up to 6.
    uint64_t witness_bound = 60;
    // Cap for uncertified universal counterexample scans.  Kept separate so a
    // closed-world check can scan universals shallowly while still reaching
    // existential witnesses that grow with the universally bound values.
    uint64_t universal_bound = 60;
    // Expand a universal block whose antecedent is a disjunction of full
    // variable pins into the finitely many pinned instances.
    bool guard_aware = true;
    // Hard cap on the node count of an evaluated formula.
    uint64_t node_budget = uint64_t(1) << 22;
    // Treat search exhaustion as domain exhaustion instead of Unknown.  Only
    // sound when the caller knows witnesses fit under the bound.
    bool closed_world = false;
};

// Interpretation of uninterpreted relation symbols, for formulas that apply
// them.  Must be total on the tuples it is queried with.
using RelInterp = std::function<bool(const std::string&, const std::vector<uint64_t>&)>;

namespace detail {

// Scoped name-to-value bindings; lookup scans innermost-first so shadowing
// just works.
template <class V>
class ScopedBindings {
public:
    const V* lookup(const std::string& name) const {
        for (size_t i = v_.size(); i-- > 0;)
            if (v_[i].first == name) return &v_[i].second;
        return nullptr;
    }
    void push(const std::string& name, V val) { v_.emplace_back(name, std::move(val)); }
    void pop() { v_.pop_back(); }
    size_t mark() const { return v_.size(); }
    void rewind(size_t m) { v_.resize(m); }

private:
    std::vector<std::pair<std::string, V>> v_;
};

// Interval over N with an optional open upper end.
struct Ival {
    uint64_t lo = 0;
    uint64_t hi = 0;
    bool top = false; // no finite upper bound

    static Ival point(uint64_t v) { return {v, v, false}; }
    static Ival whole() { return {0, 0, true}; }
    static Ival range(uint64_t lo, uint64_t hi) { return {lo, hi, false}; }
    bool is_point() const { return !top && lo == hi; }
};

inline Ival iv_add(const Ival& a, const Ival& b) {
    Ival r;
    r.lo = checked_add_u64(a.lo, b.lo);
    r.top = a.top || b.top;
    if (!r.top) r.hi = checked_add_u64(a.hi, b.hi);
    return r;
}
inline Ival iv_scale(uint64_t k, const Ival& a) {
    if (k == 0) return Ival::point(0);
    Ival r;
    r.lo = checked_mul_u64(k, a.lo);
    r.top = a.top;
    if (!r.top) r.hi = checked_mul_u64(k, a.hi);
    return r;
}

} // namespace detail

struct GridReport {
    bool equivalent = true; // no point with opposite definite verdicts
    uint64_t points_checked = 0;
    uint64_t unknowns = 0;
    std::optional<std::map<std::string, uint64_t>> first_mismatch;
    std::optional<std::map<std::string, uint64_t>> first_unknown;
};

namespace detail {

class Evaluator {
public:
    Evaluator(const Budget& budget, const RelInterp* rels) : budget_(budget), rels_(rels) {}

    Verdict run(const PraFormula& f, const std::map<std::string, uint64_t>& env) {
        if (node_count(f) > budget_.node_budget)
            throw budget_error("formula exceeds evaluation node budget");
        for (const auto& [k, v] : env) {
            env_.push(k, v);
            ivals_.push(k, Ival::point(v));
        }
        unknown_reason_.clear();
        Truth t = ev(f);
        Verdict out;
        out.truth = t;
        if (t == Truth::Unknown)
            out.reason = unknown_reason_.empty() ? "undetermined" : unknown_reason_;
        return out;
    }

private:
    using K = PraFormula::Kind;

    // ---- exact term and atom evaluation --------------------------------

    uint64_t tval(const Term& t) {
        switch (t.kind()) {
            case Term::Kind::Zero: return 0;
            case Term::Kind::One: return 1;
            case Term::Kind::Var: {
                const uint64_t* v = env_.lookup(t.name());
                if (!v) throw std::invalid_argument("unbound variable: " + t.name());
                return *v;
            }
            case Term::Kind::Numeral: return t.value();
            case Term::Kind::Add: return checked_add_u64(tval(t.lhs()), tval(t.rhs()));
            case Term::Kind::Scale: return checked_mul_u64(t.factor(), tval(t.scaled()));
        }
        return 0;
    }

    bool atom_truth(const PraAtom& a) {
        uint64_t l = tval(a.lhs), r = tval(a.rhs);
        switch (a.rel) {
            case PraAtom::Rel::Eq: return l == r;
            case PraAtom::Rel::Le: return l <= r;
            case PraAtom::Rel::Mod: return l % a.modulus == r % a.modulus;
        }
        return false;
    }

    // ---- three-valued evaluation ---------------------------------------

    Truth ev(const PraFormula& f) {
        switch (f.kind()) {
            case K::Atom: return atom_truth(f.as_atom()) ? Truth::True : Truth::False;
            case K::Not: return neg3(ev(f.child()));
            case K::And: {
                Truth a = ev(f.lhs());
                if (a == Truth::False) return Truth::False;
                Truth b = ev(f.rhs());
                if (b == Truth::False) return Truth::False;
                return (a == Truth::True && b == Truth::True) ? Truth::True : Truth::Unknown;
            }
            case K::Or: {
                Truth a = ev(f.lhs());
                if (a == Truth::True) return Truth::True;
                Truth b = ev(f.rhs());
                if (b == Truth::True) return Truth::True;
                return (a == Truth::False && b == Truth::False) ? Truth::False : Truth::Unknown;
            }
            case K::Implies: {
                Truth a = ev(f.lhs());
                if (a == Truth::False) return Truth::True;
                Truth b = ev(f.rhs());
                if (b == Truth::True) return Truth::True;
                return (a == Truth::True && b == Truth::False) ? Truth::False : Truth::Unknown;
            }
            case K::Iff: {
                Truth a = ev(f.lhs());
                if (a == Truth::Unknown) return Truth::Unknown;
                Truth b = ev(f.rhs());
                if (b == Truth::Unknown) return Truth::Unknown;
                return a == b ? Truth::True : Truth::False;
            }
            case K::RelApp: {
                if (!rels_) throw std::invalid_argument(
                    "uninterpreted relation in evaluation: " + f.rel_name());
                std::vector<uint64_t> args;
                args.reserve(f.rel_args().size());
                for (const Term& t : f.rel_args()) args.push_back(tval(t));
                return (*rels_)(f.rel_name(), args) ? Truth::True : Truth::False;
            }
            case K::Exists:
            case K::Forall: {
                if (budget_.guard_aware && f.kind() == K::Forall) {
                    if (auto pins = match_pin_forall(f)) return eval_pins_exact(*pins);
                }
                return eval_block(f);
            }
        }
        return Truth::Unknown;
    }

    // ---- pinned universal blocks ---------------------------------------

    struct PinExpansion {
        std::vector<std::string> vars;
        std::vector<std::vector<Term>> tuples; // one tuple per guard disjunct
        PraFormula psi;
    };

    // Match  A v1...A vk. (G -> psi)  where G is a disjunction of guards,
    // each guard a conjunction of equations pinning every vi to a term free
    // of all the vi.  Such a block is equivalent to the conjunction of psi
    // at the pinned tuples.
    static std::optional<PinExpansion> match_pin_forall(const PraFormula& f) {
        PinExpansion out;
        PraFormula cur = f;
        while (cur.kind() == K::Forall) {
            out.vars.push_back(cur.var());
            cur = cur.body();
        }
        if (out.vars.size() < 1 || cur.kind() != K::Implies) return std::nullopt;
        for (size_t i = 0; i < out.vars.size(); ++i)
            for (size_t j = i + 1; j < out.vars.size(); ++j)
                if (out.vars[i] == out.vars[j]) return std::nullopt;
        out.psi = cur.rhs();

        std::vector<PraFormula> disjuncts;
        or_spine(cur.lhs(), disjuncts);
        for (const PraFormula& d : disjuncts) {
            std::vector<PraFormula> eqs;
            and_spine(d, eqs);
            std::vector<std::optional<Term>> pin(out.vars.size());
            for (const PraFormula& e : eqs) {
                if (e.kind() != K::Atom) return std::nullopt;
                const PraAtom& a = e.as_atom();
                if (a.rel != PraAtom::Rel::Eq) return std::nullopt;
                const Term* var_side = nullptr;
                const Term* term_side = nullptr;
                if (a.lhs.kind() == Term::Kind::Var) { var_side = &a.lhs; term_side = &a.rhs; }
                else if (a.rhs.kind() == Term::Kind::Var) { var_side = &a.rhs; term_side = &a.lhs; }
                else return std::nullopt;
                size_t idx = out.vars.size();
                for (size_t i = 0; i < out.vars.size(); ++i)
                    if (out.vars[i] == var_side->name()) { idx = i; break; }
                if (idx == out.vars.size()) return std::nullopt;
                if (pin[idx]) return std::nullopt;
                std::set<std::string> tv = term_vars(*term_side);
                for (const std::string& v : out.vars)
                    if (tv.count(v)) return std::nullopt;
                pin[idx] = *term_side;
            }
            std::vector<Term> tuple;
            tuple.reserve(out.vars.size());
            for (auto& p : pin) {
                if (!p) return std::nullopt;
                tuple.push_back(*p);
            }
            out.tuples.push_back(std::move(tuple));
        }
        return out;
    }

    Truth eval_pins_exact(const PinExpansion& p) {
        Truth acc = Truth::True;
        for (const auto& tuple : p.tuples) {
            std::vector<uint64_t> vals;
            vals.reserve(tuple.size());
            for (const Term& t : tuple) vals.push_back(tval(t));
            size_t me = env_.mark(), mi = ivals_.mark();
            for (size_t i = 0; i < p.vars.size(); ++i) {
                env_.push(p.vars[i], vals[i]);
                ivals_.push(p.vars[i], Ival::point(vals[i]));
            }
            Truth t = ev(p.psi);
            env_.rewind(me);
            ivals_.rewind(mi);
            if (t == Truth::False) return Truth::False;
            if (t == Truth::Unknown) acc = Truth::Unknown;
        }
        return acc;
    }

    // ---- interval evaluation (abstract, used for pruning) --------------

    std::optional<Ival> term_ival(const Term& t) {
        switch (t.kind()) {
            case Term::Kind::Zero: return Ival::point(0);
            case Term::Kind::One: return Ival::point(1);
            case Term::Kind::Numeral: return Ival::point(t.value());
            case Term::Kind::Var: {
                const Ival* iv = ivals_.lookup(t.name());
                if (!iv) return std::nullopt;
                return *iv;
            }
            case Term::Kind::Add: {
                auto a = term_ival(t.lhs()), b = term_ival(t.rhs());
                if (!a || !b) return std::nullopt;
                return iv_add(*a, *b);
            }
            case Term::Kind::Scale: {
                auto a = term_ival(t.scaled());
                if (!a) return std::nullopt;
                return iv_scale(t.factor(), *a);
            }
        }
        return std::nullopt;
    }

    Truth atom_ival_truth(const PraAtom& a) {
        auto l = term_ival(a.lhs), r = term_ival(a.rhs);
        if (!l || !r) return Truth::Unknown;
        switch (a.rel) {
            case PraAtom::Rel::Eq:
                if (l->is_point() && r->is_point()) return l->lo == r->lo ? Truth::True : Truth::False;
                if (!l->top && l->hi < r->lo) return Truth::False;
                if (!r->top && r->hi < l->lo) return Truth::False;
                return Truth::Unknown;
            case PraAtom::Rel::Le:
                if (!l->top && l->hi <= r->lo) return Truth::True;
                if (!r->top && r->hi < l->lo) return Truth::False;
                return Truth::Unknown;
            case PraAtom::Rel::Mod:
                if (l->is_point() && r->is_point())
                    return (l->lo % a.modulus == r->lo % a.modulus) ? Truth::True : Truth::False;
                return Truth::Unknown;
        }
        return Truth::Unknown;
    }

    // Abstract truth under the current interval store.  A definite answer is
    // sound for every concretization, which makes it usable for pruning both
    // existential candidates (definite False) and universal counterexample
    // search (definite True).
    Truth iv_eval(const PraFormula& f) {
        switch (f.kind()) {
            case K::Atom: return atom_ival_truth(f.as_atom());
            case K::Not: return neg3(iv_eval(f.child()));
            case K::And: {
                Truth a = iv_eval(f.lhs());
                if (a == Truth::False) return Truth::False;
                Truth b = iv_eval(f.rhs());
                if (b == Truth::False) return Truth::False;
                return (a == Truth::True && b == Truth::True) ? Truth::True : Truth::Unknown;
            }
            case K::Or: {
                Truth a = iv_eval(f.lhs());
                if (a == Truth::True) return Truth::True;
                Truth b = iv_eval(f.rhs());
                if (b == Truth::True) return Truth::True;
                return (a == Truth::False && b == Truth::False) ? Truth::False : Truth::Unknown;
            }
            case K::Implies: {
                Truth a = iv_eval(f.lhs());
                if (a == Truth::False) return Truth::True;
                Truth b = iv_eval(f.rhs());
                if (b == Truth::True) return Truth::True;
                return (a == Truth::True && b == Truth::False) ? Truth::False : Truth::Unknown;
            }
            case K::Iff: {
                Truth a = iv_eval(f.lhs()), b = iv_eval(f.rhs());
                if (a == Truth::Unknown || b == Truth::Unknown) return Truth::Unknown;
                return a == b ? Truth::True : Truth::False;
            }
            case K::RelApp: {
                if (!rels_) return Truth::Unknown;
                std::vector<uint64_t> args;
                for (const Term& t : f.rel_args()) {
                    auto iv = term_ival(t);
                    if (!iv || !iv->is_point()) return Truth::Unknown;
                    args.push_back(iv->lo);
                }
                return (*rels_)(f.rel_name(), args) ? Truth::True : Truth::False;
            }
            case K::Exists:
            case K::Forall: {
                if (budget_.guard_aware && f.kind() == K::Forall) {
                    if (auto pins = match_pin_forall(f)) return iv_eval_pins(*pins);
                }
                // The quantified variable ranges over a superset of its true
                // range, so a definite answer holds for every value of it.
                size_t m = ivals_.mark();
                ivals_.push(f.var(), quant_var_ival(f));
                Truth t = iv_eval(f.body());
                ivals_.rewind(m);
                return t;
            }
        }
        return Truth::Unknown;
    }

    Truth iv_eval_pins(const PinExpansion& p) {
        Truth acc = Truth::True;
        for (const auto& tuple : p.tuples) {
            std::vector<Ival> vals;
            bool ok = true;
            for (const Term& t : tuple) {
                auto iv = term_ival(t);
                if (!iv) { ok = false; break; }
                vals.push_back(*iv);
            }
            if (!ok) { acc = Truth::Unknown; continue; }
            size_t m = ivals_.mark();
            for (size_t i = 0; i < p.vars.size(); ++i) ivals_.push(p.vars[i], vals[i]);
            Truth t = iv_eval(p.psi);
            ivals_.rewind(m);
            if (t == Truth::False) return Truth::False;
            if (t == Truth::Unknown) acc = Truth::Unknown;
        }
        return acc;
    }

    // Interval for a quantified variable: [0, k] when the body opens with a
    // numeric upper guard on it, otherwise all of N.  Values outside the
    // guard cannot affect the quantifier's truth, so the narrowing is sound.
    Ival quant_var_ival(const PraFormula& quant) {
        const std::string& v = quant.var();
        PraFormula body = quant.body();
        std::vector<PraFormula> spine;
        if (quant.kind() == K::Exists) {
            and_spine(body, spine);
        } else if (body.kind() == K::Implies) {
            and_spine(body.lhs(), spine);
        }
        for (const PraFormula& c : spine) {
            if (c.kind() != K::Atom) continue;
            const PraAtom& a = c.as_atom();
            if (a.rel == PraAtom::Rel::Le && a.lhs.kind() == Term::Kind::Var &&
                a.lhs.name() == v && !term_vars(a.rhs).count(v)) {
                if (auto iv = term_ival(a.rhs); iv && !iv->top) return Ival::range(0, iv->hi);
            }
            if (a.rel == PraAtom::Rel::Eq) {
                const Term* vs = nullptr;
                const Term* ts = nullptr;
                if (a.lhs.kind() == Term::Kind::Var && a.lhs.name() == v) { vs = &a.lhs; ts = &a.rhs; }
                else if (a.rhs.kind() == Term::Kind::Var && a.rhs.name() == v) { vs = &a.rhs; ts = &a.lhs; }
                if (vs && ts && !term_vars(*ts).count(v)) {
                    if (auto iv = term_ival(*ts); iv && !iv->top) return *iv;
                }
            }
        }
        return Ival::whole();
    }

    // ---- stabilization analysis ----------------------------------------

    struct VarAnalysis {
        bool bounded = true;  // every threshold was computable
        uint64_t threshold = 0;
        uint64_t period = 1;
    };

    // Decompose a term as coeff * v + rest with rest an interval over the
    // current store (v itself excluded).  Fails on nonlinearity in unknowns.
    std::optional<std::pair<uint64_t, Ival>> split_on(const Term& t, const std::string& v) {
        switch (t.kind()) {
            case Term::Kind::Zero: return std::make_pair(uint64_t(0), Ival::point(0));
            case Term::Kind::One: return std::make_pair(uint64_t(0), Ival::point(1));
            case Term::Kind::Numeral: return std::make_pair(uint64_t(0), Ival::point(t.value()));
            case Term::Kind::Var: {
                if (t.name() == v) return std::make_pair(uint64_t(1), Ival::point(0));
                const Ival* iv = ivals_.lookup(t.name());
                if (!iv) return std::nullopt;
                return std::make_pair(uint64_t(0), *iv);
            }
            case Term::Kind::Add: {
                auto a = split_on(t.lhs(), v), b = split_on(t.rhs(), v);
                if (!a || !b) return std::nullopt;
                return std::make_pair(checked_add_u64(a->first, b->first),
                                      iv_add(a->second, b->second));
            }
            case Term::Kind::Scale: {
                auto a = split_on(t.scaled(), v);
                if (!a) return std::nullopt;
                return std::make_pair(checked_mul_u64(t.factor(), a->first),
                                      iv_scale(t.factor(), a->second));
            }
        }
        return std::nullopt;
    }

    static bool term_mentions(const Term& t, const std::string& v) {
        switch (t.kind()) {
            case Term::Kind::Var: return t.name() == v;
            case Term::Kind::Add: return term_mentions(t.lhs(), v) || term_mentions(t.rhs(), v);
            case Term::Kind::Scale: return term_mentions(t.scaled(), v);
            default: return false;
        }
    }

    void analyze_var(const PraFormula& f, const std::string& v, VarAnalysis& out) {
        if (!out.bounded) return;
        switch (f.kind()) {
            case K::Atom: {
                const PraAtom& a = f.as_atom();
                if (!term_mentions(a.lhs, v) && !term_mentions(a.rhs, v)) return;
                auto l = split_on(a.lhs, v), r = split_on(a.rhs, v);
                if (!l || !r) { out.bounded = false; return; }
                if (a.rel == PraAtom::Rel::Mod) {
                    if (auto p = checked_lcm(out.period, a.modulus)) out.period = *p;
                    else out.bounded = false;
                    return;
                }
                uint64_t cl = l->first, cr = r->first;
                if (cl == cr) return; // v cancels; the atom does not vary with v
                // Beyond floor(hi(rest of the lighter side) / |cl-cr|) the
                // heavier side outruns the lighter one for good.
                const Ival& lighter = cl < cr ? l->second : r->second;
                if (lighter.top) { out.bounded = false; return; }
                uint64_t delta = cl < cr ? cr - cl : cl - cr;
                uint64_t tau = lighter.hi / delta + 1;
                if (tau > out.threshold) out.threshold = tau;
                return;
            }
            case K::Not: analyze_var(f.child(), v, out); return;
            case K::And:
            case K::Or:
            case K::Implies:
            case K::Iff:
                analyze_var(f.lhs(), v, out);
                analyze_var(f.rhs(), v, out);
                return;
            case K::RelApp: {
                for (const Term& t : f.rel_args())
                    if (term_mentions(t, v)) { out.bounded = false; return; }
                return;
            }
            case K::Exists:
            case K::Forall: {
                if (f.var() == v) return; // inner rebinding shadows v entirely
                size_t m = ivals_.mark();
                ivals_.push(f.var(), quant_var_ival(f));
                analyze_var(f.body(), v, out);
                ivals_.rewind(m);
                return;
            }
        }
    }

    // ---- quantifier blocks ---------------------------------------------

    struct PlanEntry {
        std::string var;
        int pin = -1;          // index into conjuncts, or -1 to scan
        uint64_t scan_hi = 0;  // inclusive upper end when scanning
        bool certified = false;
    };

    struct Block {
        bool exists = true;
        std::vector<std::string> vars;
        PraFormula matrix;
        std::vector<PraFormula> conjuncts;           // pin/prune source spine
        std::vector<std::set<std::string>> conj_vars; // free vars per conjunct
    };

    Block make_block(const PraFormula& f) {
        Block b;
        b.exists = f.kind() == K::Exists;
        PraFormula cur = f;
        auto want = f.kind();
        while (cur.kind() == want) {
            bool dup = false;
            for (const auto& v : b.vars) dup = dup || v == cur.var();
            if (dup) break; // a shadowing chain is split into two blocks
            b.vars.push_back(cur.var());
            cur = cur.body();
        }
        b.matrix = cur;
        if (b.exists) {
            and_spine(cur, b.conjuncts);
        } else if (cur.kind() == K::Implies) {
            and_spine(cur.lhs(), b.conjuncts);
        }
        // A pin-shaped universal conjunct is equivalent to its finitely many
        // instances; adding those (entailed) instances to the spine lets the
        // search prune on them long before the leaf re-checks the original.
        if (budget_.guard_aware) {
            size_t n = b.conjuncts.size();
            for (size_t ci = 0; ci < n; ++ci) {
                if (b.conjuncts[ci].kind() != K::Forall) continue;
                auto pins = match_pin_forall(b.conjuncts[ci]);
                if (!pins) continue;
                for (const auto& tuple : pins->tuples) {
                    std::map<std::string, Term> m;
                    for (size_t i = 0; i < pins->vars.size(); ++i)
                        m.emplace(pins->vars[i], tuple[i]);
                    b.conjuncts.push_back(substitute(pins->psi, m));
                }
            }
        }
        b.conj_vars.reserve(b.conjuncts.size());
        for (const auto& c : b.conjuncts) b.conj_vars.push_back(free_vars(c));
        return b;
    }

    // A conjunct pins w when it is an equation with distinct w-coefficients
    // on the two sides; given values for its other variables it then has at
    // most one solution in w.
    static bool eq_pins(const PraFormula& c, const std::string& w) {
        if (c.kind() != K::Atom) return false;
        const PraAtom& a = c.as_atom();
        if (a.rel != PraAtom::Rel::Eq) return false;
        LinearTerm l = linearize(a.lhs), r = linearize(a.rhs);
        return l.coeff_of(w) != r.coeff_of(w);
    }
    // w alone on one side of the equation, the other side free of w: the
    // variable is merely defined by the conjunct and pinning it later is
    // free, so prefer scanning the others first.
    static bool eq_defines(const PraFormula& c, const std::string& w) {
        if (c.kind() != K::Atom) return false;
        const PraAtom& a = c.as_atom();
        if (a.rel != PraAtom::Rel::Eq) return false;
        auto solo = [&](const Term& s, const Term& o) {
            return s.kind() == Term::Kind::Var && s.name() == w && !term_mentions(o, w);
        };
        return solo(a.lhs, a.rhs) || solo(a.rhs, a.lhs);
    }

    std::vector<PlanEntry> make_plan(const Block& b) {
        std::vector<PlanEntry> plan;
        std::set<std::string> pending(b.vars.begin(), b.vars.end());
        std::set<std::string> placed;
        auto outside_known = [&](const std::set<std::string>& vs, const std::string& self) {
            for (const auto& w : vs) {
                if (w == self || placed.count(w)) continue;
                if (pending.count(w)) return false;
                if (!env_.lookup(w)) return false;
            }
            return true;
        };
        while (!pending.empty()) {
            bool pinned = false;
            for (const std::string& v : b.vars) {
                if (!pending.count(v)) continue;
                for (size_t ci = 0; ci < b.conjuncts.size() && !pinned; ++ci) {
                    if (!b.conj_vars[ci].count(v)) continue;
                    if (!eq_pins(b.conjuncts[ci], v)) continue;
                    if (!outside_known(b.conj_vars[ci], v)) continue;
                    plan.push_back({v, static_cast<int>(ci), 0, true});
                    pending.erase(v);
                    placed.insert(v);
                    pinned = true;
                }
                if (pinned) break;
            }
            if (pinned) continue;
            // Choose a scan variable: prefer one no equation will ever pin;
            // then one that is not simply defined by an equation; then the
            // first still pending in declaration order.
            auto ever_pinnable = [&](const std::string& v) {
                for (size_t ci = 0; ci < b.conjuncts.size(); ++ci)
                    if (b.conj_vars[ci].count(v) && eq_pins(b.conjuncts[ci], v)) return true;
                return false;
            };
            auto defined = [&](const std::string& v) {
                for (size_t ci = 0; ci < b.conjuncts.size(); ++ci)
                    if (b.conj_vars[ci].count(v) && eq_defines(b.conjuncts[ci], v)) return true;
                return false;
            };
            const std::string* pick = nullptr;
            for (const std::string& v : b.vars)
                if (pending.count(v) && !ever_pinnable(v)) { pick = &v; break; }
            if (!pick)
                for (const std::string& v : b.vars)
                    if (pending.count(v) && !defined(v)) { pick = &v; break; }
            if (!pick)
                for (const std::string& v : b.vars)
                    if (pending.count(v)) { pick = &v; break; }
            plan.push_back({*pick, -1, 0, false});
            placed.insert(*pick);
            pending.erase(*pick);
        }
        return plan;
    }

    // Solve the pinning conjunct for v under the current bindings: at most
    // one candidate value, and its absence refutes the conjunction.
    std::optional<uint64_t> solve_pin(const PraFormula& c, const std::string& v) {
        const PraAtom& a = c.as_atom();
        auto l = split_on(a.lhs, v), r = split_on(a.rhs, v);
        // Planning placed this conjunct only once its other variables were
        // bound, so the splits must come back exact.
        if (!l || !r || !l->second.is_point() || !r->second.is_point())
            throw std::logic_error("pin conjunct not exactly evaluable");
        uint64_t cl = l->first, cr = r->first;
        uint64_t rl = l->second.lo, rr = r->second.lo;
        uint64_t delta = cl > cr ? cl - cr : cr - cl;
        uint64_t small_rest = cl > cr ? rl : rr;
        uint64_t big_rest = cl > cr ? rr : rl;
        // (cl-cr) v + rl = rr  (or mirrored): v = (big - small) / delta
        if (big_rest < small_rest) return std::nullopt;
        uint64_t diff = big_rest - small_rest;
        if (diff % delta != 0) return std::nullopt;
        return diff / delta;
    }

    // Upper bound a positive conjunct imposes on v, if one is evaluable.
    // From cl*v + L <= cr*v + R (or =) with cl > cr: (cl-cr)*v <= hi(R);
    // an equation bounds v from the heavier side in either orientation.
    std::optional<uint64_t> conjunct_upper_bound(const PraFormula& c, const std::string& v) {
        if (c.kind() != K::Atom) return std::nullopt;
        const PraAtom& a = c.as_atom();
        if (a.rel == PraAtom::Rel::Mod) return std::nullopt;
        auto l = split_on(a.lhs, v), r = split_on(a.rhs, v);
        if (!l || !r) return std::nullopt;
        uint64_t cl = l->first, cr = r->first;
        if (cl > cr && !r->second.top) return r->second.hi / (cl - cr);
        if (a.rel == PraAtom::Rel::Eq && cr > cl && !l->second.top)
            return l->second.hi / (cr - cl);
        return std::nullopt;
    }

    // Threshold beyond which an atom is definitely the given truth value for
    // every larger v, under the current store.  Congruences never freeze; an
    // atom whose v-coefficients cancel freezes at 0 when the store already
    // decides it.
    std::optional<uint64_t> atom_freeze(const PraAtom& a, const std::string& v, bool toward) {
        if (a.rel == PraAtom::Rel::Mod &&
            (term_mentions(a.lhs, v) || term_mentions(a.rhs, v)))
            return std::nullopt;
        auto l = split_on(a.lhs, v), r = split_on(a.rhs, v);
        if (!l || !r) return std::nullopt;
        uint64_t cl = l->first, cr = r->first;
        if (cl == cr) {
            Truth t = atom_ival_truth(a);
            if (t == (toward ? Truth::True : Truth::False)) return 0;
            return std::nullopt;
        }
        bool freezes_true = a.rel == PraAtom::Rel::Le && cl < cr;
        if (freezes_true != toward) return std::nullopt;
        const Ival& lighter = cl < cr ? l->second : r->second;
        if (lighter.top) return std::nullopt;
        return lighter.hi / (cl < cr ? cr - cl : cl - cr) + 1;
    }

    // Least bound beyond which f is definitely false (resp. true) for every
    // value of v at or above it.  A conjunction freezes false as soon as one
    // side does; a disjunction needs both, so it takes the later of the two.
    std::optional<uint64_t> freeze_false(const PraFormula& f, const std::string& v) {
        auto either = [](std::optional<uint64_t> a, std::optional<uint64_t> b) {
            if (a && b) return std::make_optional(std::min(*a, *b));
            return a ? a : b;
        };
        auto both = [](std::optional<uint64_t> a,
                       std::optional<uint64_t> b) -> std::optional<uint64_t> {
            if (a && b) return std::max(*a, *b);
            return std::nullopt;
        };
        switch (f.kind()) {
            case K::Atom: return atom_freeze(f.as_atom(), v, false);
            case K::Not: return freeze_true(f.child(), v);
            case K::And: return either(freeze_false(f.lhs(), v), freeze_false(f.rhs(), v));
            case K::Or: return both(freeze_false(f.lhs(), v), freeze_false(f.rhs(), v));
            case K::Implies: return both(freeze_true(f.lhs(), v), freeze_false(f.rhs(), v));
            default: return std::nullopt;
        }
    }
    std::optional<uint64_t> freeze_true(const PraFormula& f, const std::string& v) {
        auto either = [](std::optional<uint64_t> a, std::optional<uint64_t> b) {
            if (a && b) return std::make_optional(std::min(*a, *b));
            return a ? a : b;
        };
        auto both = [](std::optional<uint64_t> a,
                       std::optional<uint64_t> b) -> std::optional<uint64_t> {
            if (a && b) return std::max(*a, *b);
            return std::nullopt;
        };
        switch (f.kind()) {
            case K::Atom: return atom_freeze(f.as_atom(), v, true);
            case K::Not: return freeze_false(f.child(), v);
            case K::And: return both(freeze_true(f.lhs(), v), freeze_true(f.rhs(), v));
            case K::Or: return either(freeze_true(f.lhs(), v), freeze_true(f.rhs(), v));
            case K::Implies: return either(freeze_false(f.lhs(), v), freeze_true(f.rhs(), v));
            default: return std::nullopt;
        }
    }

    // A conjunct that freezes to false beyond some computable threshold makes
    // larger values of v irrelevant: for an existential block it kills the
    // conjunction, for a universal one it kills the antecedent and with it
    // any counterexample.  Searching [0, tau] is then complete on its own.
    std::optional<uint64_t> vacuity_bound(const Block& b, const std::string& v) {
        std::optional<uint64_t> best;
        for (size_t ci = 0; ci < b.conjuncts.size(); ++ci) {
            if (!b.conj_vars[ci].count(v)) continue;
            if (auto tau = freeze_false(b.conjuncts[ci], v))
                if (!best || *tau < *best) best = *tau;
        }
        return best;
    }

    struct BlockOutcome {
        bool hit = false;         // a witness (exists) or counterexample (forall)
        bool saw_unknown = false;
        bool fully_certified = true;
    };

    Truth eval_block(const PraFormula& f) {
        Block b = make_block(f);
        std::vector<PlanEntry> plan = make_plan(b);

        // Register intervals for the not-yet-bound chain variables so that
        // pruning and analysis can reason about partially bound states.
        size_t mi = ivals_.mark();
        for (size_t i = 0; i < b.vars.size(); ++i) ivals_.push(b.vars[i], Ival::whole());

        // Conjuncts with evaluable upper pressure narrow their chain variable
        // up front; shadowing entries keep the store stack-shaped.  A second
        // pass lets a bound flow through one intermediate variable.
        for (int pass = 0; pass < 2; ++pass) {
            for (const std::string& v : b.vars) {
                std::optional<uint64_t> best;
                for (size_t ci = 0; ci < b.conjuncts.size(); ++ci) {
                    if (!b.conj_vars[ci].count(v)) continue;
                    if (auto u = conjunct_upper_bound(b.conjuncts[ci], v))
                        if (!best || *u < *best) best = *u;
                }
                if (!best) continue;
                const Ival* cur = ivals_.lookup(v);
                if (cur->top || *best < cur->hi) ivals_.push(v, Ival::range(0, *best));
            }
        }

        BlockOutcome out;
        dfs(b, plan, 0, out);

        ivals_.rewind(mi);

        if (b.exists) {
            if (out.hit) return Truth::True;
            if (out.saw_unknown) {
                note_unknown("quantifier search saw an undetermined branch");
                return Truth::Unknown;
            }
            if (out.fully_certified || budget_.closed_world) return Truth::False;
            note_unknown("witness search for E " + plan_scan_vars(plan) +
                         " exhausted without a stabilization certificate");
            return Truth::Unknown;
        }
        if (out.hit) return Truth::False;
        if (out.saw_unknown) {
            note_unknown("quantifier search saw an undetermined branch");
            return Truth::Unknown;
        }
        if (out.fully_certified || budget_.closed_world) return Truth::True;
        note_unknown("counterexample search for A " + plan_scan_vars(plan) +
                     " exhausted without a stabilization certificate");
        return Truth::Unknown;
    }

    static std::string plan_scan_vars(const std::vector<PlanEntry>& plan) {
        std::string out;
        for (const auto& e : plan) {
            if (e.pin >= 0) continue;
            if (!out.empty()) out += ", ";
            out += e.var;
        }
        return out.empty() ? "(pinned block)" : out;
    }

    void note_unknown(const std::string& why) {
        if (unknown_reason_.empty()) unknown_reason_ = why;
    }

    // Conjuncts mentioning the just-bound variable, re-checked abstractly; a
    // definite miss prunes the whole subtree (for a universal block conjuncts
    // come from the antecedent, and a false antecedent admits no
    // counterexample).  A non-atomic conjunct whose variables are all bound
    // gets a full sub-evaluation: that is what lets a search step over a
    // nested definition the moment its arguments are fixed.
    bool prune_after_bind(const Block& b, const std::vector<PlanEntry>& plan,
                          size_t bound, const std::string& v) {
        for (size_t ci = 0; ci < b.conjuncts.size(); ++ci) {
            if (!b.conj_vars[ci].count(v)) continue;
            Truth t = iv_eval(b.conjuncts[ci]);
            if (t == Truth::Unknown && b.conjuncts[ci].kind() != K::Atom &&
                subeval_ready(b, plan, bound, b.conj_vars[ci])) {
                std::string saved = std::move(unknown_reason_);
                t = ev(b.conjuncts[ci]);
                unknown_reason_ = std::move(saved);
            }
            if (t == Truth::False) return true;
        }
        return false;
    }

    // A variable of this block counts as bound only once the search here has
    // assigned it (plan entries 0..bound).  env_ alone cannot decide that:
    // nested definitions reuse binder names, so an enclosing block may hold a
    // live entry under the same name while this block's variable is still
    // open.  Names foreign to the block resolve through env_ as usual.
    bool subeval_ready(const Block& b, const std::vector<PlanEntry>& plan,
                       size_t bound, const std::set<std::string>& vs) {
        for (const auto& w : vs) {
            if (std::find(b.vars.begin(), b.vars.end(), w) != b.vars.end()) {
                bool assigned = false;
                for (size_t j = 0; j <= bound && !assigned; ++j)
                    if (plan[j].var == w) assigned = true;
                if (!assigned) return false;
            } else if (!env_.lookup(w)) {
                return false;
            }
        }
        return true;
    }

    void dfs(const Block& b, std::vector<PlanEntry>& plan, size_t i, BlockOutcome& out) {
        if (out.hit) return;
        if (i == plan.size()) {
            Truth t = ev(b.matrix);
            if (b.exists ? t == Truth::True : t == Truth::False) out.hit = true;
            else if (t == Truth::Unknown) out.saw_unknown = true;
            return;
        }
        PlanEntry& e = plan[i];
        auto try_value = [&](uint64_t val) {
            env_.push(e.var, val);
            ivals_.push(e.var, Ival::point(val));
            if (!prune_after_bind(b, plan, i, e.var)) dfs(b, plan, i + 1, out);
            ivals_.pop();
            env_.pop();
        };
        if (e.pin >= 0) {
            if (auto val = solve_pin(b.conjuncts[static_cast<size_t>(e.pin)], e.var)) try_value(*val);
            return;
        }
        VarAnalysis an;
        analyze_var(b.matrix, e.var, an);
        bool an_cert = an.bounded && an.period <= budget_.witness_bound;
        uint64_t fallback = b.exists ? budget_.witness_bound : budget_.universal_bound;
        uint64_t an_hi = an.bounded ? checked_add_u64(an.threshold, budget_.witness_bound)
                                    : fallback;
        // Either certificate alone gives a complete range; with both, the
        // smaller range still is.  An uncertified range must not cut into a
        // certified one.
        std::optional<uint64_t> vac = vacuity_bound(b, e.var);
        if (an_cert && vac) {
            e.scan_hi = std::min(an_hi, *vac);
            e.certified = true;
        } else if (vac) {
            e.scan_hi = *vac;
            e.certified = true;
        } else {
            e.scan_hi = an_hi;
            e.certified = an_cert;
        }
        uint64_t hi = e.scan_hi;
        if (!e.certified) out.fully_certified = false;
        for (uint64_t val = 0; val <= hi && !out.hit; ++val) try_value(val);
    }

    Budget budget_;
    const RelInterp* rels_;
    ScopedBindings<uint64_t> env_;
    ScopedBindings<Ival> ivals_;
    std::string unknown_reason_;
};

} // namespace detail

// Evaluate f under env with bounded quantifier search.
inline Verdict eval_bounded(const PraFormula& f, const std::map<std::string, uint64_t>& env,
                            const Budget& budget = {}, const RelInterp* rels = nullptr) {
    detail::Evaluator e(budget, rels);
    return e.run(f, env);
}

inline Verdict decide_bounded(const PraFormula& f, const Budget& budget = {},
                              const RelInterp* rels = nullptr) {
    return eval_bounded(f, {}, budget, rels);
}

// Exact truth of a closed quantifier-free formula.
inline bool eval_closed_qf(const PraFormula& f) {
    using K = PraFormula::Kind;
    switch (f.kind()) {
        case K::Atom: {
            auto closed = [](const Term& t) {
                return eval_term(t, [](const std::string& n) -> uint64_t {
                    throw std::invalid_argument("free variable in closed evaluation: " + n);
                });
            };
            const PraAtom& a = f.as_atom();
            uint64_t l = closed(a.lhs), r = closed(a.rhs);
            switch (a.rel) {
                case PraAtom::Rel::Eq: return l == r;
                case PraAtom::Rel::Le: return l <= r;
                case PraAtom::Rel::Mod: return l % a.modulus == r % a.modulus;
            }
            return false;
        }
        case K::Not: return !eval_closed_qf(f.child());
        case K::And: return eval_closed_qf(f.lhs()) && eval_closed_qf(f.rhs());
        case K::Or: return eval_closed_qf(f.lhs()) || eval_closed_qf(f.rhs());
        case K::Implies: return !eval_closed_qf(f.lhs()) || eval_closed_qf(f.rhs());
        case K::Iff: return eval_closed_qf(f.lhs()) == eval_closed_qf(f.rhs());
        default: throw std::invalid_argument("eval_closed_qf: not closed quantifier-free");
    }
}

// Truth of a closed literal by the structural rewrite rules for 0/successor
// forms: peel matched successors, drop whole moduli, then read off one of the
// base cases.  Must agree with eval_closed_qf on atoms; kept separate so the
// rules themselves are testable.
inline bool decide_closed_literal(const PraAtom& atom, bool negated = false) {
    auto value = [](const Term& t) {
        return eval_term(t, [](const std::string& n) -> uint64_t {
            throw std::invalid_argument("free variable in closed literal: " + n);
        });
    };
    uint64_t l = value(atom.lhs), r = value(atom.rhs);
    bool truth = true;
    switch (atom.rel) {
        case PraAtom::Rel::Eq: {
            while (l > 0 && r > 0) { --l; --r; }      // x+1 = y+1  <->  x = y
            truth = (l == 0 && r == 0);               // 0 = 0; otherwise a successor faces 0
            break;
        }
        case PraAtom::Rel::Le: {
            while (l > 0 && r > 0) { --l; --r; }      // x+1 <= y+1  <->  x <= y
            truth = (l == 0);                         // 0 <= x; ~(x+1 <= 0)
            break;
        }
        case PraAtom::Rel::Mod: {
            if (l > r) std::swap(l, r);               // congruence is symmetric
            while (l > 0 && r > 0) { --l; --r; }      // x+1 =_m y+1  <->  x =_m y
            while (r >= atom.modulus) r -= atom.modulus; // 0 =_m x+m  <->  0 =_m x
            truth = (r == 0);                         // 0 =_m 0; ~(0 =_m k) for 0 < k < m
            break;
        }
    }
    return negated ? !truth : truth;
}

// Compare two formulas on the full grid env : vars -> {0..bound}.
inline GridReport equiv_on_grid(const PraFormula& f, const PraFormula& g,
                                const std::vector<std::string>& vars, uint64_t bound,
                                const Budget& budget = {}, const RelInterp* rels = nullptr) {
    GridReport rep;
    std::vector<uint64_t> point(vars.size(), 0);
    for (;;) {
        std::map<std::string, uint64_t> env;
        for (size_t i = 0; i < vars.size(); ++i) env[vars[i]] = point[i];
        Verdict a = eval_bounded(f, env, budget, rels);
        Verdict b = eval_bounded(g, env, budget, rels);
        ++rep.points_checked;
        if (a.is_unknown() || b.is_unknown()) {
            ++rep.unknowns;
            if (!rep.first_unknown) rep.first_unknown = env;
        } else if (a.truth != b.truth) {
            rep.equivalent = false;
            if (!rep.first_mismatch) rep.first_mismatch = env;
        }
        size_t i = 0;
        for (; i < point.size(); ++i) {
            if (point[i] < bound) { ++point[i]; break; }
            point[i] = 0;
        }
        if (i == point.size()) break;
    }
    return rep;
}

} // namespace quelim
