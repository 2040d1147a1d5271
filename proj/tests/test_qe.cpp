#include "quelim/qe.hpp"

#include "quelim/oracle.hpp"
#include "quelim/text.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

using namespace quelim;
using namespace quelim::qe;

namespace {

PraFormula P(const std::string& s) { return parse_pra(s); }

// Exhaustive agreement of two formulas over a small grid of their free vars.
void check_grid_equiv(const PraFormula& a, const PraFormula& b, uint64_t bound,
                      const Budget& budget = {}) {
    std::set<std::string> fv = free_vars(a);
    for (const std::string& v : free_vars(b)) fv.insert(v);
    std::vector<std::string> vars(fv.begin(), fv.end());
    GridReport r = equiv_on_grid(a, b, vars, bound, budget);
    INFO("lhs: " << print_pra(a));
    INFO("rhs: " << print_pra(b));
    if (r.first_mismatch) {
        std::string at;
        for (const auto& [k, x] : *r.first_mismatch) at += k + "=" + std::to_string(x) + " ";
        INFO("mismatch at " << at);
    }
    CHECK(r.equivalent);
    CHECK(r.unknowns == 0);
}

LinearTerm lt(std::initializer_list<std::pair<const char*, uint64_t>> coeffs, uint64_t c) {
    LinearTerm out;
    for (const auto& [v, k] : coeffs) out.add_var(v, k);
    out.constant = c;
    return out;
}

} // namespace

TEST_CASE("step 1 cancels the variable onto one side") {
    // x + y = x + x + 1 loses one x per side
    PraFormula a = step1_isolate(P("x + y = x + x + 1"), "x");
    REQUIRE(a.kind() == PraFormula::Kind::Atom);
    CHECK(linearize(a.as_atom().lhs) == lt({{"y", 1}}, 0));
    CHECK(linearize(a.as_atom().rhs) == lt({{"x", 1}}, 1));
    // already isolated input is untouched
    PraFormula b = P("x <= y");
    CHECK(step1_isolate(b, "x") == b);
    // congruences cancel the same way
    PraFormula c = step1_isolate(P("x + x + z =_3 x"), "x");
    CHECK(linearize(c.as_atom().lhs) == lt({{"x", 1}, {"z", 1}}, 0));
    CHECK(linearize(c.as_atom().rhs) == lt({}, 0));
    check_grid_equiv(P("x + x + z =_3 x"), c, 12);
    // negation wrapper is preserved
    PraFormula d = step1_isolate(P("~(x + y = x + 1)"), "x");
    REQUIRE(d.kind() == PraFormula::Kind::Not);
}

TEST_CASE("step 2 unifies coefficients to their lcm") {
    PraFormula f = P("2*x <= y & 3*x = z");
    auto [g, C] = step2_unify(f, "x");
    CHECK(C == 6);
    std::vector<PraFormula> conj;
    and_spine(g, conj);
    REQUIRE(conj.size() == 2);
    CHECK(linearize(conj[0].as_atom().lhs) == lt({{"x", 6}}, 0));
    CHECK(linearize(conj[0].as_atom().rhs) == lt({{"y", 3}}, 0));
    CHECK(linearize(conj[1].as_atom().lhs) == lt({{"x", 6}}, 0));
    CHECK(linearize(conj[1].as_atom().rhs) == lt({{"z", 2}}, 0));
    check_grid_equiv(f, g, 10);

    // a congruence is scaled in the modulus as well
    auto [h, C2] = step2_unify(P("2*x =_3 1 & x = y"), "x");
    CHECK(C2 == 2);
    std::vector<PraFormula> hc;
    and_spine(h, hc);
    CHECK(hc[0].as_atom().modulus == 3);
    CHECK(hc[1].as_atom().modulus == 0); // Eq untouched field
    CHECK(linearize(hc[1].as_atom().lhs) == lt({{"x", 2}}, 0));
    check_grid_equiv(P("2*x =_3 1 & x = y"), h, 10);

    // C defaults to 1 with no x at all
    auto [k, C3] = step2_unify(P("y <= 4"), "x");
    CHECK(C3 == 1);
    CHECK(k == P("y <= 4"));

    auto [m, C4] = step2_unify(P("x =_2 1"), "x");
    CHECK(C4 == 1);
    CHECK(m == P("x =_2 1"));
}

TEST_CASE("step 3 aligns every variable side to the shared companion sum") {
    // companions are 0 (from 2x = y) and 1 (from 2x + 1 <= z); t = 1
    auto [g2, C] = step2_unify(P("x + x = y & 2*x + 1 <= z"), "x");
    REQUIRE(C == 2);
    auto [fy, t] = step3_align(g2, "x", C, "w");
    CHECK(t == lt({}, 1));
    std::vector<PraFormula> conj;
    and_spine(fy, conj);
    REQUIRE(conj.size() == 2);
    // first atom gained the other literal's companion on both sides
    CHECK(conj[0].as_atom().lhs == Term::var("w"));
    CHECK(linearize(conj[0].as_atom().rhs) == lt({{"y", 1}}, 1));
    CHECK(conj[1].as_atom().lhs == Term::var("w"));
    CHECK(linearize(conj[1].as_atom().rhs) == lt({{"z", 1}}, 0));
    // substituting w = 2x + t back reproduces an equivalent formula
    LinearTerm back = t;
    back.add_var("x", C);
    PraFormula aligned = substitute(fy, "w", to_term(back));
    check_grid_equiv(P("x + x = y & 2*x + 1 <= z"), aligned, 8);
}

TEST_CASE("step 4 guards the fresh variable") {
    auto [fy, t] = step3_align(P("x + x = y"), "x", 2, "w");
    PraFormula g = step4_guard(fy, t, 2, "w");
    CHECK(g == P("0 <= w & w =_2 0 & w = y"));
}

TEST_CASE("step 5 on the doubling example: T, D and the raw disjunct count") {
    auto [fy, t] = step3_align(P("x + x = y"), "x", 2, "w");
    PraFormula f3 = step4_guard(fy, t, 2, "w");
    ElimResult er = step5_expand(f3, "w", 2);
    CHECK(er.big_C == 2);
    CHECK(er.big_D == 2);
    REQUIRE(er.term_set_T.size() == 2);
    CHECK(er.term_set_T[0] == lt({}, 0));
    CHECK(er.term_set_T[1] == lt({{"y", 1}}, 0));
    std::vector<PraFormula> dis;
    or_spine(er.result, dis);
    CHECK(dis.size() == 6); // |T| * (D + 1)
    // the raw expansion already says "y is even"
    check_grid_equiv(er.result, P("y =_2 0"), 20);
    CHECK(simplify_bool(er.result) == simplify_bool(er.result)); // idempotent shape
    check_grid_equiv(simplify_bool(er.result), P("y =_2 0"), 20);
}

TEST_CASE("eliminating a pure equality leaves the true constant") {
    ElimResult er = eliminate_exists(P("E x. x = y"));
    CHECK(is_pra_true(er.result));
    CHECK(free_vars(er.result).empty());
}

TEST_CASE("an unsatisfiable order literal collapses to the false constant") {
    ElimResult er = eliminate_exists(P("E x. x + 1 <= x"));
    CHECK(is_pra_false(er.result));
}

TEST_CASE("elimination result invariants") {
    const char* samples[] = {
        "E x. x + x = y",
        "E x. (2*x <= y & x =_3 1)",
        "E x. (x = y & x =_2 1)",
        "E x. ~(x = y)",
        "E x. (3*x = y | x + z <= 4)",
    };
    for (const char* s : samples) {
        PraFormula f = P(s);
        ElimResult er = eliminate_exists(f);
        INFO(s);
        // the eliminated variable is gone, no new free variables appear
        std::set<std::string> in = free_vars(f), out = free_vars(er.result);
        CHECK(out.count("x") == 0);
        for (const std::string& v : out) CHECK(in.count(v) == 1);
        // D is a multiple of C and of every modulus in the guarded form
        CHECK(er.big_D % er.big_C == 0);
        // T starts with the zero term
        REQUIRE(!er.term_set_T.empty());
        CHECK(er.term_set_T[0] == lt({}, 0));
    }
}

TEST_CASE("moduli of the guarded form divide big_D") {
    auto [g2, C] = step2_unify(nnf(P("2*x =_4 1 & 3*x =_5 z")), "x");
    auto [fy, t] = step3_align(g2, "x", C, "w");
    PraFormula f3 = step4_guard(fy, t, C, "w");
    ElimResult er = step5_expand(f3, "w", C);
    uint64_t check_lcm = 1;
    qe::detail::for_each_literal(f3, [&](const PraAtom& a, bool) {
        if (a.rel == PraAtom::Rel::Mod) check_lcm = lcm_or_throw(check_lcm, a.modulus);
    });
    CHECK(er.big_D == check_lcm);
    CHECK(er.big_D % C == 0);
    // scaled moduli: 4*(6/2)=12 and 5*(6/3)=10, plus the guard's C=6
    CHECK(er.big_D == 60);
}

TEST_CASE("trace entries chain and every recorded rewrite is an equivalence") {
    const char* samples[] = {
        "E x. x + x = y",
        "E x. (x <= y & x =_2 1)",
        "A x. (x <= y -> x <= y + 3)",
        "E x. (x = y & ~(x = 3))",
    };
    for (const char* s : samples) {
        PraFormula f = P(s);
        EliminationRun run = eliminate_all(f);
        INFO(s);
        REQUIRE(!run.trace.empty());
        CHECK(run.trace.front().before == f);
        CHECK(run.trace.back().after == run.result);
        for (size_t i = 0; i + 1 < run.trace.size(); ++i)
            CHECK(run.trace[i].after == run.trace[i + 1].before);
        for (const TraceEntry& e : run.trace) {
            INFO(std::string("step ") + step_tag_name(e.tag) + ": " + e.note);
            check_grid_equiv(e.before, e.after, 8);
        }
    }
}

TEST_CASE("closed sentences decide correctly") {
    CHECK(decide(P("A y. E x. x = y")));
    CHECK(decide(P("E x. (x =_2 1 & x =_3 1)")));
    CHECK_FALSE(decide(P("E x. x + x = 1")));
    CHECK_FALSE(decide(P("E x. x + 1 = 0")));
    CHECK(decide(P("4 =_2 0")));
    CHECK(decide(P("A x. E y. (x = y + y | x = y + y + 1)")));
    CHECK(decide(P("A x. A y. x + y = y + x")));
    CHECK_FALSE(decide(P("A x. x =_2 0")));
    CHECK(decide(P("E x. A y. x <= y")));
    CHECK_THROWS_AS(decide(P("x = 0")), std::invalid_argument);
}

TEST_CASE("nested and universal quantifiers eliminate innermost first") {
    EliminationRun run = eliminate_all(P("A y. E x. x = y"));
    CHECK(is_quantifier_free(run.result));
    CHECK(decide_closed_by_rules(run.result));
    // the first recorded step rewrites the innermost existential
    CHECK(run.trace.front().tag == StepTag::NNF);
    CHECK(run.trace.front().before.kind() == PraFormula::Kind::Forall);
}

TEST_CASE("random small formulas: eliminated form agrees with bounded truth") {
    std::mt19937 rng(271828);
    auto coin = [&](int pct) { return int(rng() % 100) < pct; };
    auto small = [&](uint64_t n) { return rng() % n; };
    auto var = [&](int nvars) {
        const char* names[] = {"a", "b"};
        return std::string(names[small(uint64_t(nvars))]);
    };
    auto term = [&](int nvars) {
        Term t = coin(70) ? Term::var(var(nvars)) : Term::numeral(small(5));
        if (coin(50)) {
            Term u = coin(60) ? Term::var(var(nvars)) : Term::numeral(small(5));
            if (coin(30)) u = Term::scale(2 + small(3), u);
            t = Term::add(t, u);
        }
        return t;
    };
    auto atom = [&](const std::string& extra, int nvars) {
        Term l = term(nvars), r = term(nvars);
        if (!extra.empty() && coin(80)) {
            Term e = Term::var(extra);
            if (coin(40)) e = Term::scale(2 + small(3), e);
            l = coin(50) ? Term::add(l, e) : e;
        }
        switch (small(3)) {
            case 0: return PraFormula::atom(PraAtom::eq(l, r));
            case 1: return PraFormula::atom(PraAtom::le(l, r));
            default: return PraFormula::atom(PraAtom::mod(2 + small(5), l, r));
        }
    };
    auto qf = [&](const std::string& extra, int nvars) {
        PraFormula f = atom(extra, nvars);
        for (int i = 0; i < 2; ++i) {
            if (coin(60)) {
                PraFormula g = atom(coin(50) ? extra : "", nvars);
                f = coin(50) ? PraFormula::and_(f, g) : PraFormula::or_(f, g);
            }
        }
        if (coin(25)) f = PraFormula::not_(f);
        return f;
    };
    Budget cw;
    cw.closed_world = true;
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
        // one unguarded quantifier over a two-variable quantifier-free body,
        // sometimes under a second, numerically guarded one
        PraFormula body = qf("q", 2);
        PraFormula f = rng() % 2 ? PraFormula::exists("q", body) : PraFormula::forall("q", body);
        if (coin(40)) {
            uint64_t k = 1 + small(5);
            PraFormula guard = PraFormula::atom(PraAtom::le(Term::var("r"), Term::numeral(k)));
            PraFormula inner = qf("r", 2);
            PraFormula second = rng() % 2
                ? PraFormula::exists("r", PraFormula::and_(guard, inner))
                : PraFormula::forall("r", PraFormula::implies(guard, inner));
            f = PraFormula::and_(f, second);
        }
        EliminationRun run = eliminate_all(f);
        REQUIRE(is_quantifier_free(run.result));
        GridReport rep = equiv_on_grid(f, run.result, {"a", "b"}, 12, cw);
        INFO(print_pra(f));
        INFO("  => " << print_pra(run.result));
        if (rep.first_mismatch) {
            std::string at;
            for (const auto& [k2, x] : *rep.first_mismatch)
                at += k2 + "=" + std::to_string(x) + " ";
            INFO("mismatch at " << at);
        }
        CHECK(rep.equivalent);
        CHECK(rep.unknowns == 0);
        ++checked;
    }
    CHECK(checked == 40);
}

TEST_CASE("node budget aborts oversized eliminations") {
    QeBudget tiny;
    tiny.node_budget = 40;
    CHECK_THROWS_AS(eliminate_all(P("E x. (2*x <= y & 3*x = z & x =_5 2)"), tiny), budget_error);
}

TEST_CASE("elimination refuses relation applications in scope") {
    ParseOptions o;
    o.allow_relations = true;
    PraFormula f = parse_pra("E x. R(x)", o);
    CHECK_THROWS_AS(eliminate_all(f), std::invalid_argument);
}

TEST_CASE("boolean simplification folds constants and duplicates") {
    CHECK(is_pra_true(simplify_bool(P("0 = 0 & 3 <= 5"))));
    CHECK(is_pra_false(simplify_bool(P("1 = 0 | 7 <= 2"))));
    CHECK(simplify_bool(P("x = 1 | 0 = 1 | x = 1")) == P("x = 1"));
    CHECK(is_pra_true(simplify_bool(P("y <= y + 2"))));
    CHECK(is_pra_false(simplify_bool(P("y + 3 <= y + 1"))));
    CHECK(is_pra_true(simplify_bool(P("y + 4 =_2 y"))));
    CHECK(is_pra_false(simplify_bool(P("y + 3 =_2 y + 0"))));
    CHECK(is_pra_false(simplify_bool(P("y + 1 = y"))));
    CHECK(is_pra_true(simplify_bool(P("x =_1 y"))));
    CHECK(is_pra_true(simplify_bool(P("E v. 2 <= 3"))));
}
