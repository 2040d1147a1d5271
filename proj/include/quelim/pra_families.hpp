// quelim :: generators for the arithmetic formula and axiom families
//
// Mul_n(x,y,z) pins bounded multiplication: it holds exactly when
// y <= 2^(2^n) and x*y = z.  The base case handles y in {0,1,2} by cases;
// each later level writes y = y1*y2 + y4 with the factors a level down, so
// a naive expansion quadruples per level while the compressed form (one
// occurrence via iterated_definitions) grows by a constant.  Hyp_n(y) says
// y is a multiplier the whole structure agrees on: products with y exist,
// are unique, and respect addition.  Div_n(x) says x is divisible with
// remainder by every such y > 0.  The axiom generators emit the base
// theory of the naturals without induction, instances of the induction
// schema, and the modulo-comparison axioms whose quadratic size is the
// point of measuring them.
#pragma once

#include "quelim/bigint.hpp"
#include "quelim/formula.hpp"
#include "quelim/iterated_definitions.hpp"
#include "quelim/primes.hpp"
#include "quelim/text.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quelim::families {

// Generation caps.  Compressed forms grow linearly and stay cheap; naive
// forms quadruple per level, so they stop where the node budget would.
inline constexpr uint64_t compressed_index_cap = 64;
inline constexpr uint64_t naive_index_cap = 3;

namespace detail {

inline definitions::Template<PraAtom> mul_template() {
    definitions::Template<PraAtom> t;
    t.base = parse_pra(
        "(y = 0 -> z = 0) & (y = 1 -> z = x) & (y = 2 -> z = x + x)"
        " & ~(y != 0 & y != 1 & y != 2)");
    t.body = definitions::parse_body(
        "E y1. E y2. E y3. E y4. E z1. E z2. E z4."
        " y = y3 + y4 & R(y1, y2, y3) & R(x, y1, z1) & R(z1, y2, z2)"
        " & R(x, y4, z4) & z = z2 + z4 & y2 + 1 <= y1");
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

// Mul_n(x, y, z); free variables exactly {x, y, z}.
inline PraFormula gen_mul(uint64_t n, bool compressed = true) {
    detail::check_index(n, compressed);
    definitions::IteratedDefinition<PraAtom> def(detail::mul_template());
    return compressed ? def.iterate(n) : def.expand_naive(n);
}

// A generated Mul_n with its designated variables replaced by argument
// terms; substitution renames internal binders on capture.
inline PraFormula mul_at(const PraFormula& mul, const Term& x, const Term& y,
                         const Term& z) {
    std::map<std::string, Term> m;
    m.emplace("x", x);
    m.emplace("y", y);
    m.emplace("z", z);
    return substitute(mul, m);
}

// Hyp_n(y); free variable exactly {y}.  Conjunctions, in order: 1*y = y,
// 0*y = 0, every x has a unique product with y, and products add across
// x0 = x1 + x2.  Unique existence is spelled with the usual two
// quantifiers: a witness all other witnesses equal.
inline PraFormula gen_hyp(uint64_t n, bool compressed = true) {
    using F = PraFormula;
    PraFormula mul = gen_mul(n, compressed);
    auto v = [](const char* s) { return Term::var(s); };
    Term y = v("y");
    PraFormula c1 = mul_at(mul, Term::one(), y, y);
    PraFormula c2 = mul_at(mul, Term::zero(), y, Term::zero());
    PraFormula uniq = F::forall(
        "w", F::implies(mul_at(mul, v("x"), y, v("w")),
                        F::atom(PraAtom::eq(v("w"), v("z")))));
    PraFormula c3 = F::forall(
        "x", F::exists("z", F::and_(mul_at(mul, v("x"), y, v("z")), uniq)));
    PraFormula add_body = fold_and({
        mul_at(mul, v("x1"), y, v("z1")),
        mul_at(mul, v("x2"), y, v("z2")),
        mul_at(mul, v("x0"), y, v("z0")),
        F::atom(PraAtom::eq(v("z0"), Term::add(v("z1"), v("z2")))),
    });
    PraFormula c4 = F::forall(
        "x0",
        F::forall(
            "x1",
            F::forall(
                "x2",
                F::implies(
                    F::atom(PraAtom::eq(v("x0"), Term::add(v("x1"), v("x2")))),
                    F::exists("z0",
                              F::exists("z1", F::exists("z2", add_body)))))));
    return fold_and({c1, c2, c3, c4});
}

// Div_n(x); free variable exactly {x}.  The y = 0 escape keeps the
// quantification over all of Hyp_n honest, and b2 < y is spelled
// b2 + 1 <= y, the only order the naturals admit.
inline PraFormula gen_div(uint64_t n, bool compressed = true) {
    using F = PraFormula;
    PraFormula mul = gen_mul(n, compressed);
    auto v = [](const char* s) { return Term::var(s); };
    PraFormula body = fold_and({
        mul_at(mul, v("a1"), v("y"), v("b1")),
        F::atom(PraAtom::eq(v("x"), Term::add(v("b1"), v("b2")))),
        F::atom(PraAtom::le(Term::add(v("b2"), Term::one()), v("y"))),
    });
    PraFormula rest =
        F::or_(F::atom(PraAtom::eq(v("y"), Term::zero())),
               F::exists("a1", F::exists("b1", F::exists("b2", body))));
    return F::forall("y", F::implies(gen_hyp(n, compressed), rest));
}

// The base theory: a cancellative commutative semigroup with neutral 0,
// no predecessor for 0, predecessors elsewhere, and total order.
inline std::vector<PraFormula> gen_pra_minus_axioms() {
    static const char* const axioms[] = {
        "A x. A y. A z. (x + y) + z = x + (y + z)",
        "A x. A y. x + y = y + x",
        "A x. x + 0 = x",
        "A x. A y. A z. (x + z = y + z -> x = y)",
        "A x. x + 1 != 0",
        "A x. (x != 0 -> E y. x = y + 1)",
        "A x. A y. (x <= y | y <= x)",
    };
    std::vector<PraFormula> out;
    out.reserve(std::size(axioms));
    for (const char* s : axioms) out.push_back(parse_pra(s));
    return out;
}

// A x. (x =_p 0 | ... | x =_p p-1): every element has a residue mod p.
inline PraFormula gen_pra_alt_axiom(uint64_t p) {
    if (!is_prime_u64(p))
        throw std::invalid_argument("modulo-comparison axiom index must be prime");
    // node_count is 4p; stop where rendering would leave the node budget.
    if (p > (uint64_t(1) << 20))
        throw budget_error("axiom materialization exceeds the node budget");
    std::vector<PraFormula> lits;
    lits.reserve(static_cast<size_t>(p));
    for (uint64_t r = 0; r < p; ++r)
        lits.push_back(
            PraFormula::atom(PraAtom::mod(p, Term::var("x"), Term::numeral(r))));
    return PraFormula::forall("x", fold_or(lits));
}

// Sizes of gen_pra_alt_axiom(p) computed without building the p disjuncts,
// so they stay available for any word-sized prime.  Residue literal r
// weighs 2p + 4 + (r == 0 ? 1 : 2r - 1) symbols; summing and adding p - 1
// disjunctions and the closure gives 3p^2 + 3p + 3.  Nodes: one universal,
// p - 1 disjunctions, and p three-node atoms.
inline BigUint pra_alt_axiom_symbols(uint64_t p) {
    if (!is_prime_u64(p))
        throw std::invalid_argument("modulo-comparison axiom index must be prime");
    BigUint bp(p);
    return BigUint(3) * bp * bp + BigUint(3) * bp + BigUint(3);
}

inline BigUint pra_alt_axiom_node_count(uint64_t p) {
    if (!is_prime_u64(p))
        throw std::invalid_argument("modulo-comparison axiom index must be prime");
    return BigUint(4) * BigUint(p);
}

// phi(0) & A x. (phi -> phi(x+1)) -> A x. phi, universally closed over
// the other free variables of phi in name order.
inline PraFormula gen_induction_instance(const PraFormula& phi,
                                         const std::string& x) {
    using F = PraFormula;
    std::set<std::string> fv = free_vars(phi);
    if (!fv.count(x))
        throw std::invalid_argument("induction variable must be free in the formula");
    PraFormula base = substitute(phi, x, Term::zero());
    PraFormula step = F::forall(
        x, F::implies(phi, substitute(phi, x, Term::add(Term::var(x), Term::one()))));
    PraFormula inst = F::implies(F::and_(base, step), F::forall(x, phi));
    fv.erase(x);
    for (auto it = fv.rbegin(); it != fv.rend(); ++it)
        inst = F::forall(*it, inst);
    return inst;
}

// Least prime strictly between 2^(2^n - 1) and 2^(2^n); one always exists
// because there is a prime between any positive natural and its double.
inline uint64_t prime_window(uint64_t n) {
    if (n == 0) throw std::invalid_argument("prime window starts at n = 1");
    if (n > 6) throw budget_error("window out of budget");
    uint64_t lo = uint64_t(1) << ((uint64_t(1) << n) - 1);
    uint64_t k = next_prime_above(lo);
    if (n < 6 && k >= (uint64_t(1) << (uint64_t(1) << n)))
        throw std::logic_error("prime window miss");
    return k;
}

// ---------------------------------------------------------------------------
// Uniform handle on the families, for the command line and the benches.

enum class Family { Mul, Hyp, Div, PraAltAxiom, InductionInstance, PraMinusAxiom };

struct FamilySpec {
    Family family = Family::Mul;
    // n for Mul/Hyp/Div and InductionInstance, the prime for PraAltAxiom,
    // the axiom number (0-6) for PraMinusAxiom.
    uint64_t index = 0;
    bool compressed = true;
};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Mul: return "Mul";
        case Family::Hyp: return "Hyp";
        case Family::Div: return "Div";
        case Family::PraAltAxiom: return "PraAltAxiom";
        case Family::InductionInstance: return "InductionInstance";
        case Family::PraMinusAxiom: return "PraMinusAxiom";
    }
    return "?";
}

inline std::optional<Family> family_from_name(std::string_view s) {
    for (Family f : {Family::Mul, Family::Hyp, Family::Div, Family::PraAltAxiom,
                     Family::InductionInstance, Family::PraMinusAxiom})
        if (s == family_name(f)) return f;
    return std::nullopt;
}

// InductionInstance at index n instantiates the schema at Div_n(x), the
// divisibility statement the other families exist to feed.
inline PraFormula generate(const FamilySpec& s) {
    switch (s.family) {
        case Family::Mul: return gen_mul(s.index, s.compressed);
        case Family::Hyp: return gen_hyp(s.index, s.compressed);
        case Family::Div: return gen_div(s.index, s.compressed);
        case Family::PraAltAxiom: return gen_pra_alt_axiom(s.index);
        case Family::InductionInstance:
            return gen_induction_instance(gen_div(s.index, s.compressed), "x");
        case Family::PraMinusAxiom: {
            std::vector<PraFormula> ax = gen_pra_minus_axioms();
            if (s.index >= ax.size())
                throw std::invalid_argument("the base theory has seven axioms");
            return ax[s.index];
        }
    }
    throw std::logic_error("unreachable family");
}

} // namespace quelim::families
