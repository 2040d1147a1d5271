#include "quelim/term.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace quelim;

namespace {
Term v(const char* n) { return Term::var(n); }
}

TEST_CASE("constructors normalize degenerate numerals and scales") {
    CHECK(Term::numeral(0).kind() == Term::Kind::Zero);
    CHECK(Term::numeral(1).kind() == Term::Kind::One);
    CHECK(Term::numeral(2).kind() == Term::Kind::Numeral);
    CHECK(Term::scale(0, v("x")).kind() == Term::Kind::Zero);
    CHECK(Term::scale(1, v("x")) == v("x"));
    CHECK(Term::scale(3, v("x")).kind() == Term::Kind::Scale);
}

TEST_CASE("structural equality ignores sharing") {
    Term a = Term::add(v("x"), Term::one());
    Term b = Term::add(v("x"), Term::one());
    CHECK(a == b);
    CHECK(a != Term::add(Term::one(), v("x")));
    CHECK(term_hash(a) == term_hash(b));
}

TEST_CASE("node count and symbol count on the extended forms") {
    // numeral(4) is one node but unfolds to 1+1+1+1: seven symbols.
    Term n4 = Term::numeral(4);
    CHECK(term_node_count(n4) == 1);
    CHECK(term_symbols(n4).to_u64() == 7);
    // 3*(x + 1) unfolds to (x+1)+(x+1)+(x+1): 3*3 + 2 = 11 symbols.
    Term s = Term::scale(3, Term::add(v("x"), Term::one()));
    CHECK(term_node_count(s) == 4);
    CHECK(term_symbols(s).to_u64() == 11);
    // symbol count dominates node count
    CHECK(term_symbols(s).to_u64() >= term_node_count(s));
}

TEST_CASE("numeral(4) = numeral(4) would spell out to 15 symbols") {
    // 7 symbols a side plus the relation sign; fixed reference value.
    BigUint total = term_symbols(Term::numeral(4)) + BigUint(1) + term_symbols(Term::numeral(4));
    CHECK(total.to_u64() == 15);
}

TEST_CASE("linearize flattens and to_term rebuilds canonically") {
    // 2*x + (y + (x + 3))  ->  {x: 3, y: 1} + 3
    Term t = Term::add(Term::scale(2, v("x")), Term::add(v("y"), Term::add(v("x"), Term::numeral(3))));
    LinearTerm l = linearize(t);
    CHECK(l.coeff == std::map<std::string, uint64_t>{{"x", 3}, {"y", 1}});
    CHECK(l.constant == 3);
    CHECK(linearize(to_term(l)) == l);
    // canonical rebuild: name order, constant last
    LinearTerm m;
    m.add_var("b", 2);
    m.add_var("a", 1);
    m.constant = 5;
    Term rebuilt = to_term(m);
    LinearTerm again = linearize(rebuilt);
    CHECK(again == m);
}

TEST_CASE("linearize of scaled nests multiplies through") {
    // 2*(3*x + (y + 1)) = 6x + 2y + 2
    Term t = Term::scale(2, Term::add(Term::scale(3, v("x")), Term::add(v("y"), Term::one())));
    LinearTerm l = linearize(t);
    CHECK(l.coeff_of("x") == 6);
    CHECK(l.coeff_of("y") == 2);
    CHECK(l.constant == 2);
}

TEST_CASE("to_term of a bare constant and of zero") {
    LinearTerm c;
    c.constant = 4;
    CHECK(to_term(c) == Term::numeral(4));
    LinearTerm z;
    CHECK(to_term(z) == Term::zero());
}

TEST_CASE("substitution replaces variables and shares untouched subtrees") {
    Term t = Term::add(v("x"), Term::scale(2, v("y")));
    Term r = subst_term(t, {{"x", Term::numeral(3)}});
    CHECK(r == Term::add(Term::numeral(3), Term::scale(2, v("y"))));
    // untouched: same tree comes back
    Term u = subst_term(t, {{"q", Term::one()}});
    CHECK(u.id() == t.id());
}

TEST_CASE("evaluation with checked arithmetic") {
    Term t = Term::add(Term::scale(3, v("x")), Term::numeral(5));
    auto env = [](const std::string& n) -> uint64_t {
        if (n == "x") return 7;
        throw std::invalid_argument("unbound " + n);
    };
    CHECK(eval_term(t, env) == 26);
    Term big = Term::scale(UINT64_MAX, v("x"));
    CHECK_THROWS_AS(eval_term(big, env), std::overflow_error);
}

TEST_CASE("variable collection") {
    Term t = Term::add(v("x"), Term::add(Term::scale(2, v("z")), v("x")));
    CHECK(term_vars(t) == std::set<std::string>{"x", "z"});
}

TEST_CASE("fresh names extend with digits") {
    std::set<std::string> used{"z", "z1", "x"};
    CHECK(fresh_name("z", used) == "z2");
    CHECK(fresh_name("y", used) == "y");
    CHECK(fresh_name("x", used) == "x1");
}
