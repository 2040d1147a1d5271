#include "quelim/rcf_families.hpp"

#include "quelim/rcf.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

using namespace quelim;
using namespace quelim::rcf;
using namespace quelim::rcf::families;

namespace {

RFormula P(const std::string& s) { return parse_rcf(s); }

Rat rat_pow(const Rat& x, uint64_t k) {
    Rat r(1);
    for (uint64_t i = 0; i < k; ++i) r = r * x;
    return r;
}

// The sample grid the base-level semantics are checked on.
const std::vector<Rat> sample_xs = {Rat(-2), Rat(-1), Rat(0), Rat(1, 2),
                                    Rat(1),  Rat(2),  Rat(3)};

// Candidate z values: every power a grid point can produce, plus decoys.
std::vector<Rat> sample_zs() {
    std::vector<Rat> zs;
    for (const Rat& x : sample_xs)
        for (uint64_t k = 0; k <= 2; ++k) zs.push_back(rat_pow(x, k));
    zs.push_back(Rat(5));
    zs.push_back(Rat(-3, 2));
    zs.push_back(Rat(7, 3));
    return zs;
}

bool pow_holds(const RFormula& pow, const Rat& x, const Rat& y, const Rat& z) {
    return eval_qf(pow, {{"x", x}, {"y", y}, {"z", z}});
}

} // namespace

TEST_CASE("rationals normalize and compare exactly") {
    CHECK(Rat(1, 2) + Rat(1, 3) == Rat(5, 6));
    CHECK(Rat(2, 3) * Rat(3, 4) == Rat(1, 2));
    CHECK(Rat(2, -4) == Rat(-1, 2));
    CHECK(Rat(-2, -4) == Rat(1, 2));
    CHECK(Rat(0, 7) == Rat(0));
    CHECK(Rat(3, 6).num == 1);
    CHECK(Rat(3, 6).den == 2);
    CHECK(Rat(1, 3) <= Rat(1, 2));
    CHECK_FALSE(Rat(1, 2) <= Rat(1, 3));
    CHECK(Rat(-1) < Rat(0));
    CHECK_FALSE(Rat(1, 2) < Rat(1, 2));
    CHECK(Rat(5, 6).to_string() == "5/6");
    CHECK(Rat(-2).to_string() == "-2");
    CHECK_THROWS_AS(Rat(1, 0), std::invalid_argument);
}

TEST_CASE("field terms parse with product precedence and print back") {
    RTerm t = parse_rcf_term("x*y + z");
    REQUIRE(t.kind() == RTerm::Kind::Add);
    CHECK(t.lhs().kind() == RTerm::Kind::Mul);
    CHECK(print_rcf_term(t) == "x*y + z");

    CHECK(print_rcf_term(parse_rcf_term("(x + y)*z")) == "(x + y)*z");
    CHECK(print_rcf_term(parse_rcf_term("x*(y*z)")) == "x*(y*z)");
    CHECK(print_rcf_term(parse_rcf_term("x + (y + z)")) == "x + (y + z)");
    CHECK(print_rcf_term(parse_rcf_term("x + y + z")) == "x + y + z");

    // Products and sums associate left when unparenthesized.
    RTerm chain = parse_rcf_term("x*y*z");
    REQUIRE(chain.kind() == RTerm::Kind::Mul);
    CHECK(chain.lhs().kind() == RTerm::Kind::Mul);
    CHECK(chain.rhs() == RTerm::var("z"));

    // Numerals desugar to left-nested sums of 1 and never print back.
    CHECK(parse_rcf_term("3") == RTerm::num(3));
    CHECK(RTerm::num(3) == RTerm::add(RTerm::add(RTerm::one(), RTerm::one()), RTerm::one()));
    CHECK(print_rcf_term(parse_rcf_term("3")) == "1 + 1 + 1");
    CHECK(parse_rcf_term("0") == RTerm::zero());
    CHECK(parse_rcf_term("1") == RTerm::one());
    CHECK(print_rcf_term(parse_rcf_term("2*x")) == "(1 + 1)*x");
}

TEST_CASE("strict order and disequality desugar to negations") {
    // The order is dense: x < y is ~(y <= x), with no discrete rewrite.
    CHECK(P("x < 1") == RFormula::not_(RFormula::atom(
                            RcfAtom::le(RTerm::one(), RTerm::var("x")))));
    CHECK(print_rcf(P("x < y")) == "~(y <= x)");
    CHECK(P("x != y") == RFormula::not_(RFormula::atom(
                             RcfAtom::eq(RTerm::var("x"), RTerm::var("y")))));
    CHECK(print_rcf(P("x != y")) == "~(x = y)");
}

TEST_CASE("field formulas round-trip through the grammar") {
    const std::string cases[] = {
        "x = y",
        "x <= y",
        "~(x <= y)",
        "A z. 0 <= z -> (E x. x*x = z)",
        "(y = 0 -> z = 1) & (y = 1 -> z = x)",
        "E y. y*y = 1 + 1 & ~(y <= 0)",
        "x = y <-> y = x",
        "x <= y | y <= x",
        "x*x + (1 + 1)*x + 1 = 0",
    };
    for (const std::string& s : cases) {
        RFormula f = P(s);
        CHECK(print_rcf(f) == s);
        CHECK(parse_rcf(print_rcf(f)) == f);
    }
    CHECK_THROWS_AS(P("x =_2 y"), parse_error);
    CHECK_THROWS_AS(P("R(x, y)"), parse_error);
    CHECK(parse_rcf_body("R(x, y)").kind() == RFormula::Kind::RelApp);
}

TEST_CASE("quantifier-free evaluation is exact over the rationals") {
    CHECK(eval_qf(P("x*x <= 1 + 1"), {{"x", Rat(-1)}}));
    CHECK_FALSE(eval_qf(P("x*x <= 1 + 1"), {{"x", Rat(3, 2)}}));
    CHECK(eval_qf(P("x + y = 0"), {{"x", Rat(1, 2)}, {"y", Rat(-1, 2)}}));
    CHECK(eval_qf(P("x = 0 -> y = 1"), {{"x", Rat(1)}, {"y", Rat(7)}}));
    CHECK(eval_qf(P("x < 1 <-> x <= 0"), {{"x", Rat(1, 2)}}) == false);
    CHECK_THROWS_AS(eval_qf(P("E x. x = 0"), {}), std::invalid_argument);
    CHECK_THROWS_AS(eval_qf(parse_rcf_body("R(x)"), {{"x", Rat(0)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(eval_qf(P("x = y"), {{"x", Rat(0)}}), std::invalid_argument);
}

TEST_CASE("power family exposes exactly its three variables") {
    std::set<std::string> xyz = {"x", "y", "z"};
    CHECK(free_vars(gen_pow(0)) == xyz);
    CHECK(free_vars(gen_pow(1)) == xyz);
    CHECK(free_vars(gen_pow(4)) == xyz);
    CHECK(free_vars(gen_hyp(0)) == std::set<std::string>{"y"});
    CHECK(free_vars(gen_hyp(1)) == std::set<std::string>{"y"});
    CHECK(is_sentence(gen_root(0)));
    CHECK(is_sentence(gen_root(1)));
}

TEST_CASE("field generation caps") {
    CHECK_THROWS_AS(gen_pow(65), budget_error);
    CHECK_THROWS_AS(gen_pow(4, false), budget_error);
    CHECK_NOTHROW(gen_pow(3, false));
}

TEST_CASE("base power matches x^y on the sample grid, and only there") {
    RFormula pow0 = gen_pow(0);
    const std::vector<Rat> zs = sample_zs();
    for (uint64_t k = 0; k <= 2; ++k) {
        Rat y(static_cast<int64_t>(k));
        for (const Rat& x : sample_xs) {
            Rat expected = rat_pow(x, k);
            CHECK(pow_holds(pow0, x, y, expected));
            for (const Rat& z : zs)
                CHECK(pow_holds(pow0, x, y, z) == (z == expected));
        }
    }
    // Exponents outside {0, 1, 2} never hold, integral or not.
    for (const Rat& y : {Rat(3), Rat(4), Rat(1, 2), Rat(-1)})
        for (const Rat& x : sample_xs)
            for (const Rat& z : zs) CHECK_FALSE(pow_holds(pow0, x, y, z));
}

TEST_CASE("pinned power points") {
    RFormula pow0 = gen_pow(0);
    CHECK(pow_holds(pow0, Rat(3), Rat(2), Rat(9)));
    for (const Rat& z : sample_zs()) CHECK_FALSE(pow_holds(pow0, Rat(3), Rat(3), z));
    for (const Rat& q : sample_xs) CHECK(pow_holds(pow0, q, Rat(0), Rat(1)));
}

TEST_CASE("power recursion body mentions the previous level eleven times") {
    definitions::IteratedDefinition<RcfAtom> def(families::detail::pow_template());
    CHECK(count_rel(def.tpl().body, "R") == 11);
    CHECK(count_rel(def.compressed_body(), "R") == 1);
    CHECK(gen_pow(0, true) == gen_pow(0, false));
}

TEST_CASE("compressed power size is linear, naive size explodes") {
    uint64_t d = node_count(gen_pow(2)) - node_count(gen_pow(1));
    CHECK(d > 0);
    for (uint64_t n = 3; n <= 10; ++n)
        CHECK(node_count(gen_pow(n)) - node_count(gen_pow(n - 1)) == d);

    uint64_t dr = node_count(gen_root(2)) - node_count(gen_root(1));
    CHECK(dr > 0);
    for (uint64_t n = 3; n <= 10; ++n)
        CHECK(node_count(gen_root(n)) - node_count(gen_root(n - 1)) == dr);

    uint64_t dh = node_count(gen_hyp(2)) - node_count(gen_hyp(1));
    for (uint64_t n = 3; n <= 6; ++n)
        CHECK(node_count(gen_hyp(n)) - node_count(gen_hyp(n - 1)) == dh);

    for (uint64_t n = 1; n <= 3; ++n)
        CHECK(node_count(gen_pow(n, false)) >= 4 * node_count(gen_pow(n - 1, false)));
}

TEST_CASE("analytic hypotheses take their stated shape") {
    RFormula pow0 = gen_pow(0);
    RFormula hyp0 = gen_hyp(0);
    std::vector<RFormula> cs;
    and_spine(hyp0, cs);
    REQUIRE(cs.size() == 3);

    // Conjunct 1 is E x. E z. (1 < x & Pow_0(x, y, z) & z <= 2), literally.
    CHECK(print_rcf(cs[0]) ==
          "E x. E z. ~(x <= 1) & (" + print_rcf(pow0) + ") & z <= 1 + 1");

    // Conjunct 2: four universals, guards and powers in the antecedent.
    RFormula c2 = cs[1];
    for (const char* v : {"x", "x1", "z", "z1"}) {
        REQUIRE(c2.kind() == RFormula::Kind::Forall);
        CHECK(c2.var() == v);
        c2 = c2.body();
    }
    REQUIRE(c2.kind() == RFormula::Kind::Implies);
    CHECK(count_subformula(cs[1], pow0) == 1); // the (x, y, z) occurrence

    // Conjunct 3 ranges over the two order positions of the witness power.
    REQUIRE(cs[2].kind() == RFormula::Kind::Forall);
    CHECK(cs[2].var() == "c1");
    CHECK(cs[2].body().var() == "c2");

    CHECK(parse_rcf(print_rcf(hyp0)) == hyp0);
}

TEST_CASE("root sentence is pinned at the base level") {
    RFormula root0 = gen_root(0);
    const std::string golden =
        "A y. (E x. E z. ~(x <= 1) & ((y = 0 -> z = 1) & (y = 1 -> z = x) & (y = "
        "1 + 1 -> z = x*x) & ~(~(y = 0) & ~(y = 1) & ~(y = 1 + 1))) & z <= 1 + 1) "
        "& (A x. A x1. A z. A z1. ~(x <= 1) & ~(x1 <= 1) & ((y = 0 -> z = 1) & (y "
        "= 1 -> z = x) & (y = 1 + 1 -> z = x*x) & ~(~(y = 0) & ~(y = 1) & ~(y = 1 "
        "+ 1))) & ((y = 0 -> z1 = 1) & (y = 1 -> z1 = x1) & (y = 1 + 1 -> z1 = "
        "x1*x1) & ~(~(y = 0) & ~(y = 1) & ~(y = 1 + 1))) -> ~(z <= x) & (~(z1 <= "
        "z) -> ~(x1 <= x))) & (A c1. A c2. ~(c1 <= 1) & ~(c2 <= 1) & ~(c1 = c2) "
        "-> (E x0. E c0. (y = 0 -> c0 = 1) & (y = 1 -> c0 = x0) & (y = 1 + 1 -> "
        "c0 = x0*x0) & ~(~(y = 0) & ~(y = 1) & ~(y = 1 + 1)) & (~(c0 <= c1) & "
        "~(c2 <= c0) | ~(c0 <= c2) & ~(c1 <= c0)) & ~(x0 <= 1))) -> ~~(y <= 1) | "
        "(E r. (y = 0 -> 1 + 1 = 1) & (y = 1 -> 1 + 1 = r) & (y = 1 + 1 -> 1 + 1 "
        "= r*r) & ~(~(y = 0) & ~(y = 1) & ~(y = 1 + 1)))";
    CHECK(print_rcf(root0) == golden);
    CHECK(parse_rcf(golden) == root0);
}

TEST_CASE("root keeps its double negation and two power occurrences") {
    for (uint64_t n : {uint64_t(0), uint64_t(1)}) {
        RFormula root = gen_root(n);
        RFormula pow = gen_pow(n);
        REQUIRE(root.kind() == RFormula::Kind::Forall);
        CHECK(root.var() == "y");
        RFormula body = root.body();
        REQUIRE(body.kind() == RFormula::Kind::Implies);
        CHECK(body.lhs() == gen_hyp(n));
        REQUIRE(body.rhs().kind() == RFormula::Kind::Or);
        CHECK(body.rhs().lhs() ==
              RFormula::not_(RFormula::not_(RFormula::atom(
                  RcfAtom::le(RTerm::var("y"), RTerm::one())))));
        CHECK(body.rhs().rhs().kind() == RFormula::Kind::Exists);
        CHECK(body.rhs().rhs().var() == "r");
        CHECK(count_subformula(root, pow) == 2);
    }
    // The count is a fact about the definition, not about sharing.
    CHECK(count_subformula(gen_root(1, false), gen_pow(1, false)) == 2);
}

TEST_CASE("square-root axiom golden render") {
    RFormula ax = gen_sqrt_axiom();
    CHECK(print_rcf(ax) == "A z. 0 <= z -> (E x. x*x = z)");
    CHECK(is_sentence(ax));
    CHECK(parse_rcf(print_rcf(ax)) == ax);
}

TEST_CASE("odd-degree axioms spell out their monomials") {
    CHECK(print_rcf(gen_odd_degree_axiom(1)) == "A a0. E x. x + a0 = 0");
    CHECK(print_rcf(gen_odd_degree_axiom(3)) ==
          "A a0. A a1. A a2. E x. x*x*x + a2*x*x + a1*x + a0 = 0");
    CHECK_THROWS_AS(gen_odd_degree_axiom(0), std::invalid_argument);
    CHECK_THROWS_AS(gen_odd_degree_axiom(2), std::invalid_argument);
    CHECK_THROWS_AS(gen_odd_degree_axiom(8), std::invalid_argument);
    CHECK_THROWS_AS(gen_odd_degree_axiom(2049), budget_error);

    // Monomial expansion makes the size superlinear in the degree.
    uint64_t prev = 0, prev_delta = 0;
    for (uint64_t m : {1, 3, 5, 7, 9}) {
        RFormula ax = gen_odd_degree_axiom(m);
        CHECK(is_sentence(ax));
        CHECK(parse_rcf(print_rcf(ax)) == ax);
        uint64_t nodes = node_count(ax);
        if (prev != 0) {
            uint64_t delta = nodes - prev;
            CHECK(delta > prev_delta);
            prev_delta = delta;
        }
        prev = nodes;
    }
}

TEST_CASE("least-upper-bound instances follow the schema") {
    using F = RFormula;
    RFormula phi = P("x*x <= 1 + 1");
    RFormula inst = gen_lub_instance(phi, "x");

    auto le_var = [](const char* l, const char* r) {
        return F::atom(RcfAtom::le(RTerm::var(l), RTerm::var(r)));
    };
    auto bounded_by = [&](const char* u) {
        return F::forall("x", F::implies(phi, le_var("x", u)));
    };
    RFormula expected = F::implies(
        F::and_(F::exists("d", P("d*d <= 1 + 1")), F::exists("b", bounded_by("b"))),
        F::exists("c", F::and_(bounded_by("c"),
                               F::forall("b", F::implies(bounded_by("b"),
                                                         le_var("c", "b"))))));
    CHECK(inst == expected);
    CHECK(is_sentence(inst));
    CHECK(parse_rcf(print_rcf(inst)) == inst);

    // Parameters other than the bounded variable stay free.
    CHECK(free_vars(gen_lub_instance(P("x <= y"), "x")) ==
          std::set<std::string>{"y"});

    // Names already used by phi are avoided when picking d, b, c.
    RFormula clash = gen_lub_instance(P("x <= d + c"), "x");
    REQUIRE(clash.kind() == RFormula::Kind::Implies);
    CHECK(clash.lhs().lhs().var() == "d1");
    CHECK(clash.rhs().var() == "c1");
    CHECK(free_vars(clash) == std::set<std::string>{"c", "d"});

    CHECK_NOTHROW(gen_lub_instance(P("x = 0"), "x"));
    CHECK_THROWS_AS(gen_lub_instance(phi, "y"), std::invalid_argument);
}

TEST_CASE("field family dispatcher") {
    CHECK(generate({Family::Pow, 2}) == gen_pow(2));
    CHECK(generate({Family::Pow, 1, false}) == gen_pow(1, false));
    CHECK(generate({Family::Hyp, 1}) == gen_hyp(1));
    CHECK(generate({Family::Root, 1}) == gen_root(1));
    CHECK(generate({Family::SqrtAxiom, 0}) == gen_sqrt_axiom());
    CHECK(generate({Family::OddDegreeAxiom, 3}) == gen_odd_degree_axiom(3));

    // The bundled LUB instance bounds the set from the root argument: its
    // parameter y stays free and the power family appears at each bound.
    RFormula lub0 = generate({Family::LubInstance, 0});
    CHECK(free_vars(lub0) == std::set<std::string>{"y"});
    CHECK(count_subformula(lub0, gen_pow(0)) == 3);
    CHECK(parse_rcf(print_rcf(lub0)) == lub0);

    for (Family f : {Family::Pow, Family::Hyp, Family::Root, Family::SqrtAxiom,
                     Family::OddDegreeAxiom, Family::LubInstance})
        CHECK(family_from_name(family_name(f)) == f);
    CHECK_FALSE(family_from_name("Mul").has_value());
}

TEST_CASE("size report expands the order shorthand") {
    SizeReport eq = rcf::size(P("x = y"));
    CHECK(eq.paper_symbols == BigUint(3));
    CHECK(eq.node_count == 3);
    CHECK(eq.rendered_len == 5);

    // t <= u costs |t| + |u| + 7 through E z. t + z*z = u.
    SizeReport le = rcf::size(P("x <= y"));
    CHECK(le.paper_symbols == BigUint(9));
    CHECK(le.node_count == 3);
    CHECK(le.rendered_len == 6);

    SizeReport sq = rcf::size(P("x*x <= 1 + 1"));
    CHECK(sq.paper_symbols == BigUint(13));
    CHECK(sq.node_count == 7);

    // The base power formula, all three measures pinned.
    RFormula pow0 = gen_pow(0);
    CHECK(node_count(pow0) == 45);
    CHECK(paper_symbols(pow0) == BigUint(45));
}

TEST_CASE("generated field families round-trip") {
    std::vector<RFormula> all = {
        gen_pow(0),  gen_pow(1),           gen_pow(2),
        gen_hyp(0),  gen_hyp(1),           gen_root(0),
        gen_root(1), gen_sqrt_axiom(),     gen_odd_degree_axiom(5),
        gen_pow(2, false),                 generate({Family::LubInstance, 1}),
    };
    for (const RFormula& f : all) CHECK(parse_rcf(print_rcf(f)) == f);
}
