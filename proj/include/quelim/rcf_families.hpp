// quelim :: generators for the ordered-field formula and axiom families
//
// Pow_n(x,y,z) pins bounded exponentiation: y is a natural number,
// y <= 2^(2^n), and x^y = z.  The base case handles y in {0,1,2} by
// cases; each later level splits y = y3*y4 + y5 with the pieces a level
// down, riding the identity x^y = (x^y3)^y4 * x^y5.  Pow_{n-1}(1,y,1)
// serves as the domain test: it holds exactly when y is small enough for
// the previous level.  Hyp_n(y) states the analytic behavior of y-th
// powers: proximity to 1, strict monotonicity, and density.  Root_n says
// that under those hypotheses 2 has a y-th root whenever y > 1.  The
// axiom generators emit the square-root axiom, the odd-degree root
// axioms, and least-upper-bound instances; none of this decides anything,
// it generates and measures.
#pragma once

#include "quelim/bigint.hpp"
#include "quelim/formula.hpp"
#include "quelim/iterated_definitions.hpp"
#include "quelim/rcf.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quelim::rcf::families {

// Generation caps, as on the arithmetic side: compressed forms grow
// linearly and stay cheap; naive forms multiply by the occurrence count
// of the recursion, so they stop early.
inline constexpr uint64_t compressed_index_cap = 64;
inline constexpr uint64_t naive_index_cap = 3;

namespace detail {

inline definitions::Template<RcfAtom> pow_template() {
    definitions::Template<RcfAtom> t;
    t.base = parse_rcf(
        "(y = 0 -> z = 1) & (y = 1 -> z = x) & (y = 2 -> z = x*x)"
        " & ~(y != 0 & y != 1 & y != 2)");
    // R(1, w, 1) tests that w lies in the previous level's domain.  The
    // first conjunct picks the largest such y1 and bounds y by y1*y1; the
    // last evaluates x^y piecewise through y = y3*y4 + y5.
    t.body = parse_rcf_body(
        "(E y1. (A y2. (R(1, y1, 1) & R(1, y2, 1) -> y2 <= y1)) & y <= y1*y1)"
        " & (R(1, y, 1) -> R(x, y, z))"
        " & (~R(1, y, 1) -> E y3. E y4. E y5. E z2. E z3. E z4."
        " R(1, y3, 1) & R(1, y4, 1) & R(1, y5, 1)"
        " & y = y3*y4 + y5 & R(x, y3, z2) & R(z2, y4, z3)"
        " & R(x, y5, z4) & z = z3*z4)");
    t.args = {"x", "y", "z"};
    return t;
}

inline void check_index(uint64_t n, bool compressed) {
    if (compressed && n > compressed_index_cap)
        throw budget_error("compressed family index capped at n = 64");
    if (!compressed && n > naive_index_cap)
        throw budget_error("naive family index capped at n = 3");
}

} // namespace detail

// Pow_n(x, y, z); free variables exactly {x, y, z}.
inline RFormula gen_pow(uint64_t n, bool compressed = true) {
    detail::check_index(n, compressed);
    definitions::IteratedDefinition<RcfAtom> def(detail::pow_template());
    return compressed ? def.iterate(n) : def.expand_naive(n);
}

// A generated Pow_n with its designated variables replaced by argument
// terms; substitution renames internal binders on capture.
inline RFormula pow_at(const RFormula& pow, const RTerm& x, const RTerm& y,
                       const RTerm& z) {
    std::map<std::string, RTerm> m;
    m.emplace("x", x);
    m.emplace("y", y);
    m.emplace("z", z);
    return substitute(pow, m);
}

// a < b over the dense order; no atom says it directly.
inline RFormula strictly_less(const RTerm& a, const RTerm& b) {
    return RFormula::not_(RFormula::atom(RcfAtom::le(b, a)));
}

// Hyp_n(y); free variable exactly {y}.  Conjuncts, in order: some base
// above 1 has its y-th power at or below 2 (proximity to 1); for bases
// above 1 the y-th power exceeds the base and grows with it (strict
// monotonicity); between any two distinct values above 1 lies a y-th
// power of a base above 1 (density).  The bound-style shorthand of the
// source ("for all x, x1 > 1") is read as guards in the antecedent.
inline RFormula gen_hyp(uint64_t n, bool compressed = true) {
    using F = RFormula;
    RFormula pow = gen_pow(n, compressed);
    auto v = [](const char* s) { return RTerm::var(s); };
    RTerm y = v("y"), one = RTerm::one(), two = RTerm::num(2);
    RFormula c1 = F::exists(
        "x", F::exists("z", fold_and({
                 strictly_less(one, v("x")),
                 pow_at(pow, v("x"), y, v("z")),
                 F::atom(RcfAtom::le(v("z"), two)),
             })));
    RFormula c2_ante = fold_and({
        strictly_less(one, v("x")),
        strictly_less(one, v("x1")),
        pow_at(pow, v("x"), y, v("z")),
        pow_at(pow, v("x1"), y, v("z1")),
    });
    RFormula c2_cons =
        F::and_(strictly_less(v("x"), v("z")),
                F::implies(strictly_less(v("z"), v("z1")),
                           strictly_less(v("x"), v("x1"))));
    RFormula c2 = F::forall(
        "x", F::forall("x1", F::forall("z", F::forall("z1", F::implies(c2_ante, c2_cons)))));
    RFormula c3_ante = fold_and({
        strictly_less(one, v("c1")),
        strictly_less(one, v("c2")),
        F::not_(F::atom(RcfAtom::eq(v("c1"), v("c2")))),
    });
    RFormula c3_body = fold_and({
        pow_at(pow, v("x0"), y, v("c0")),
        F::or_(F::and_(strictly_less(v("c1"), v("c0")), strictly_less(v("c0"), v("c2"))),
               F::and_(strictly_less(v("c2"), v("c0")), strictly_less(v("c0"), v("c1")))),
        strictly_less(one, v("x0")),
    });
    RFormula c3 = F::forall(
        "c1", F::forall("c2", F::implies(c3_ante, F::exists("x0", F::exists("c0", c3_body)))));
    return fold_and({c1, c2, c3});
}

// Root_n, a sentence: A y. (Hyp_n(y) -> ~(1 < y) | E r. Pow_n(r, y, 2)).
// "Not (y > 1)" keeps its double negation; collapsing it to y <= 1 would
// change the formula being measured.
inline RFormula gen_root(uint64_t n, bool compressed = true) {
    using F = RFormula;
    RFormula pow = gen_pow(n, compressed);
    RTerm y = RTerm::var("y");
    RFormula no_excess = F::not_(strictly_less(RTerm::one(), y));
    RFormula has_root = F::exists("r", pow_at(pow, RTerm::var("r"), y, RTerm::num(2)));
    return F::forall("y", F::implies(gen_hyp(n, compressed), F::or_(no_excess, has_root)));
}

// The square-root axiom: every nonnegative element is a square.  The
// language has no subtraction, so "x^2 - z = 0" is stated as x*x = z.
inline RFormula gen_sqrt_axiom() {
    return parse_rcf("A z. (0 <= z -> E x. x*x = z)");
}

// The odd-degree root axiom for x^m + a_{m-1}*x^{m-1} + ... + a1*x + a0:
// powers are left-nested products, coefficients multiply in from the
// left, the sum folds left from the leading power down to the bare
// constant term, and a0 is quantified outermost.
inline RFormula gen_odd_degree_axiom(uint64_t m) {
    if (m % 2 == 0)
        throw std::invalid_argument("odd-degree axiom needs an odd degree");
    // Terms grow quadratically in m; stop where rendering would leave the
    // node budget.
    if (m > 2047)
        throw budget_error("axiom materialization exceeds the node budget");
    auto times_x = [](RTerm t, uint64_t k) {
        for (uint64_t i = 0; i < k; ++i) t = RTerm::mul(t, RTerm::var("x"));
        return t;
    };
    RTerm sum = times_x(RTerm::var("x"), m - 1); // x^m
    for (uint64_t i = m - 1; i >= 1; --i)
        sum = RTerm::add(sum, times_x(RTerm::var("a" + std::to_string(i)), i));
    sum = RTerm::add(sum, RTerm::var("a0"));
    RFormula f = RFormula::exists(
        "x", RFormula::atom(RcfAtom::eq(sum, RTerm::zero())));
    for (uint64_t i = m; i-- > 0;)
        f = RFormula::forall("a" + std::to_string(i), f);
    return f;
}

// A least-upper-bound instance for phi along x: if phi has a witness and
// an upper bound, some c bounds phi and sits at or below every bound.
// Free variables of phi other than x stay free, as parameters.
inline RFormula gen_lub_instance(const RFormula& phi, const std::string& x) {
    using F = RFormula;
    std::set<std::string> fv = free_vars(phi);
    if (!fv.count(x))
        throw std::invalid_argument("bound variable must be free in the formula");
    std::set<std::string> avoid = fv;
    std::string d = fresh_name("d", avoid);
    avoid.insert(d);
    std::string b = fresh_name("b", avoid);
    avoid.insert(b);
    std::string c = fresh_name("c", avoid);
    auto le_var = [](const std::string& l, const std::string& r) {
        return F::atom(RcfAtom::le(RTerm::var(l), RTerm::var(r)));
    };
    auto bounded_by = [&](const std::string& u) {
        return F::forall(x, F::implies(phi, le_var(x, u)));
    };
    RFormula ante = F::and_(F::exists(d, substitute(phi, x, RTerm::var(d))),
                            F::exists(b, bounded_by(b)));
    RFormula cons = F::exists(
        c, F::and_(bounded_by(c),
                   F::forall(b, F::implies(bounded_by(b), le_var(c, b)))));
    return F::implies(ante, cons);
}

// ---------------------------------------------------------------------------
// Uniform handle on the families, for the command line and the benches.

enum class Family { Pow, Hyp, Root, SqrtAxiom, OddDegreeAxiom, LubInstance };

struct FamilySpec {
    Family family = Family::Pow;
    // n for Pow/Hyp/Root and LubInstance, the degree for OddDegreeAxiom;
    // SqrtAxiom ignores it.
    uint64_t index = 0;
    bool compressed = true;
};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Pow: return "Pow";
        case Family::Hyp: return "Hyp";
        case Family::Root: return "Root";
        case Family::SqrtAxiom: return "SqrtAxiom";
        case Family::OddDegreeAxiom: return "OddDegreeAxiom";
        case Family::LubInstance: return "LubInstance";
    }
    return "?";
}

inline std::optional<Family> family_from_name(std::string_view s) {
    for (Family f : {Family::Pow, Family::Hyp, Family::Root, Family::SqrtAxiom,
                     Family::OddDegreeAxiom, Family::LubInstance})
        if (s == family_name(f)) return f;
    return std::nullopt;
}

// LubInstance at index n instantiates the schema at the comparison set
// the root argument bounds: phi(x) = E z. (1 < x & Pow_n(x, y, z) & z <= 2),
// with y left free as a parameter.
inline RFormula generate(const FamilySpec& s) {
    switch (s.family) {
        case Family::Pow: return gen_pow(s.index, s.compressed);
        case Family::Hyp: return gen_hyp(s.index, s.compressed);
        case Family::Root: return gen_root(s.index, s.compressed);
        case Family::SqrtAxiom: return gen_sqrt_axiom();
        case Family::OddDegreeAxiom: return gen_odd_degree_axiom(s.index);
        case Family::LubInstance: {
            RFormula pow = gen_pow(s.index, s.compressed);
            auto v = [](const char* n) { return RTerm::var(n); };
            RFormula phi = RFormula::exists(
                "z", fold_and({
                         strictly_less(RTerm::one(), v("x")),
                         pow_at(pow, v("x"), v("y"), v("z")),
                         RFormula::atom(RcfAtom::le(v("z"), RTerm::num(2))),
                     }));
            return gen_lub_instance(phi, "x");
        }
    }
    throw std::logic_error("unreachable family");
}

} // namespace quelim::rcf::families
