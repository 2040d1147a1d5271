#include "quelim/text.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace quelim;

namespace {
PraFormula P(const std::string& s) { return parse_pra(s); }
std::string rt(const std::string& s) { return print_pra(parse_pra(s)); }
} // namespace

TEST_CASE("terms parse with precedence and print back") {
    CHECK(print_term(parse_pra_term("x + y + z")) == "x + y + z");
    CHECK(print_term(parse_pra_term("x + (y + z)")) == "x + (y + z)");
    CHECK(print_term(parse_pra_term("3*x + 2*y + 4")) == "3*x + 2*y + 4");
    CHECK(print_term(parse_pra_term("2*(x + 1)")) == "2*(x + 1)");
    CHECK(print_term(parse_pra_term("0 + 1 + 7")) == "0 + 1 + 7");
}

TEST_CASE("numerals map onto the normalized constructors") {
    CHECK(parse_pra_term("0").kind() == Term::Kind::Zero);
    CHECK(parse_pra_term("1").kind() == Term::Kind::One);
    CHECK(parse_pra_term("2").kind() == Term::Kind::Numeral);
    CHECK(parse_pra_term("1*x") == Term::var("x"));
    CHECK(parse_pra_term("0*x").kind() == Term::Kind::Zero);
}

TEST_CASE("atoms of all three relations") {
    PraFormula f = P("x + 1 = y");
    REQUIRE(f.kind() == PraFormula::Kind::Atom);
    CHECK(f.as_atom().rel == PraAtom::Rel::Eq);
    CHECK(P("x <= 4").as_atom().rel == PraAtom::Rel::Le);
    PraFormula m = P("x =_3 2");
    CHECK(m.as_atom().rel == PraAtom::Rel::Mod);
    CHECK(m.as_atom().modulus == 3);
    CHECK_THROWS_AS(P("x =_0 2"), parse_error);
}

TEST_CASE("strict order and disequality are parse-time sugar") {
    CHECK(P("x < y") == P("x + 1 <= y"));
    CHECK(P("x != y") == P("~(x = y)"));
    CHECK(rt("x < y") == "x + 1 <= y");
    CHECK(rt("x != y") == "~(x = y)");
}

TEST_CASE("connective precedence: iff < implies < or < and < not") {
    PraFormula f = P("a = 0 -> b = 0 | c = 0 & ~d = 0");
    REQUIRE(f.kind() == PraFormula::Kind::Implies);
    REQUIRE(f.rhs().kind() == PraFormula::Kind::Or);
    REQUIRE(f.rhs().rhs().kind() == PraFormula::Kind::And);
    REQUIRE(f.rhs().rhs().rhs().kind() == PraFormula::Kind::Not);
    PraFormula g = P("a = 0 <-> b = 0 -> c = 0");
    REQUIRE(g.kind() == PraFormula::Kind::Iff);
}

TEST_CASE("implies associates right, the other binaries left") {
    PraFormula f = P("a = 0 -> b = 0 -> c = 0");
    CHECK(f.rhs().kind() == PraFormula::Kind::Implies);
    PraFormula g = P("a = 0 & b = 0 & c = 0");
    CHECK(g.lhs().kind() == PraFormula::Kind::And);
    PraFormula h = P("a = 0 <-> b = 0 <-> c = 0");
    CHECK(h.lhs().kind() == PraFormula::Kind::Iff);
}

TEST_CASE("quantifier bodies extend maximally") {
    PraFormula f = P("E x. x = y & x = z");
    REQUIRE(f.kind() == PraFormula::Kind::Exists);
    CHECK(f.body().kind() == PraFormula::Kind::And);
    PraFormula g = P("(E x. x = y) & x = z");
    REQUIRE(g.kind() == PraFormula::Kind::And);
}

TEST_CASE("canonical rendering round-trips structurally") {
    const char* samples[] = {
        "E x. x + x = y",
        "A x. (x =_2 0 | x =_2 1)",
        "A x. A y. (x <= y | y <= x)",
        "E x. (x =_3 2 & x =_5 3)",
        "~(x = y) & (y <= z -> z = 0)",
        "A x. (x = 0 | E y. x = y + 1)",
        "x = y <-> y = x",
        "E x. (2*x = 10 & ~(x <= 3))",
        "A u. (u <= 5 -> E w. (w <= u & w =_2 0))",
        "((a = 0 -> b = 0) -> c = 0) -> d = 0",
        "~~(x = 0)",
        "E x. A y. x <= y",
    };
    for (const char* s : samples) {
        PraFormula f = parse_pra(s);
        std::string printed = print_pra(f);
        INFO(std::string(s) + "  ->  " + printed);
        CHECK(parse_pra(printed) == f);
        // printing is a fixed point
        CHECK(print_pra(parse_pra(printed)) == printed);
    }
}

TEST_CASE("printer emits the documented canonical forms") {
    CHECK(rt("E x. x+x=y") == "E x. x + x = y");
    CHECK(rt("~(x=y)") == "~(x = y)");
    CHECK(rt("(E x. x = 0) & y = 0") == "(E x. x = 0) & y = 0");
    CHECK(rt("A x. (x = 0 -> (E y. y + 1 = x))") == "A x. x = 0 -> (E y. y + 1 = x)");
    CHECK(rt("a = 0 & (b = 0 & c = 0)") == "a = 0 & (b = 0 & c = 0)");
    CHECK(rt("a = 0 & b = 0 & c = 0") == "a = 0 & b = 0 & c = 0");
}

TEST_CASE("parenthesized terms and formulas disambiguate") {
    CHECK(P("(x + y) = z") == P("x + y = z"));
    CHECK(P("(x = y)") == P("x = y"));
    CHECK(P("((x = y))") == P("x = y"));
    CHECK(P("(x) = y") == P("x = y"));
    CHECK(P("(x + (y + z)) = 0").as_atom().lhs == parse_pra_term("x + (y + z)"));
}

TEST_CASE("relation applications need the permissive parser") {
    CHECK_THROWS_AS(P("R(x, y)"), parse_error);
    ParseOptions rel;
    rel.allow_relations = true;
    PraFormula f = parse_pra("R(x, y + 1, 3*z)", rel);
    REQUIRE(f.kind() == PraFormula::Kind::RelApp);
    CHECK(f.rel_name() == "R");
    CHECK(f.rel_args().size() == 3);
    CHECK(print_pra(f) == "R(x, y + 1, 3*z)");
    CHECK(parse_pra(print_pra(f), rel) == f);
    // E and A stay reserved
    CHECK_THROWS_AS(parse_pra("E(x)", rel), parse_error);
    PraFormula g = parse_pra("Mul(x, y, z) & E w. Pow(w)", rel);
    CHECK(count_rel(g, "Mul") == 1);
    CHECK(count_rel(g, "Pow") == 1);
}

TEST_CASE("lexer rejects garbage with positions") {
    try {
        P("x + $");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.position == 4);
    }
    CHECK_THROWS_AS(P("x ="), parse_error);
    CHECK_THROWS_AS(P("E 3. x = 0"), parse_error);
    CHECK_THROWS_AS(P("x = y y"), parse_error);
    CHECK_THROWS_AS(P(""), parse_error);
    CHECK_THROWS_AS(P("x = 99999999999999999999999"), parse_error);
}

TEST_CASE("size report combines the three measures") {
    SizeReport r = size(P("E x. x + x = y"));
    CHECK(r.node_count == 6);          // exists + atom(1 + add(x,x) + y = 1+3+1)
    CHECK(r.paper_symbols.to_u64() == 7); // 2 + (3 + 1 + 1)
    CHECK(r.rendered_len == std::string("E x. x + x = y").size());
    CHECK(r.paper_symbols.to_u64() >= r.node_count);
}

TEST_CASE("rendered size invariant: symbols dominate nodes on parsed corpus") {
    const char* samples[] = {
        "E x. (x =_6 1 -> x =_2 1)",
        "A x. 3*x =_3 0",
        "E x. (5 <= x & x <= 5)",
        "A x. A y. (x + 1 = y + 1 -> x = y)",
    };
    for (const char* s : samples) {
        SizeReport r = size(parse_pra(s));
        INFO(s);
        CHECK(r.paper_symbols >= BigUint(r.node_count));
    }
}
