// quelim :: concrete syntax
//
// Grammar (PrA):
//   formula  := iff
//   iff      := imp ('<->' imp)*                 left-assoc
//   imp      := or ('->' imp)?                   right-assoc
//   or       := and ('|' and)*                   left-assoc
//   and      := neg ('&' neg)*                   left-assoc
//   neg      := '~' neg | quant | primary
//   quant    := ('E' | 'A') ident '.' formula    body extends as far as possible
//   primary  := atom | '(' formula ')' | relapp
//   atom     := term ('=' | '!=' | '<=' | '<' | '=_' number) term
//   relapp   := uident '(' term (',' term)* ')'
//   term     := factor ('+' factor)*             left-assoc
//   factor   := number '*' tprim | tprim
//   tprim    := ident | number | '(' term ')'
//
// 'E' and 'A' are reserved; other identifiers starting with an upper-case
// letter name relation symbols and are only accepted when the caller allows
// them.  't < u' is sugar for 't+1 <= u' and 't != u' for '~(t = u)'; both
// are resolved at parse time and never printed back.
#pragma once

#include "quelim/formula.hpp"

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quelim {

struct parse_error : std::runtime_error {
    size_t position;
    parse_error(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
};

namespace tok {

enum class Type {
    Ident, UIdent, Number,
    Plus, Star, LParen, RParen, Dot, Comma,
    Eq, Neq, Le, Lt, ModEq, Tilde, Amp, Bar, Arrow, DArrow,
    End
};

struct Token {
    Type type;
    std::string text;
    uint64_t number = 0;
    size_t pos = 0;
};

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    size_t i = 0;
    auto push = [&](Type t, size_t pos, std::string text = {}) {
        out.push_back({t, std::move(text), 0, pos});
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            uint64_t v = 0;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                uint64_t d = static_cast<uint64_t>(src[i] - '0');
                if (v > (UINT64_MAX - d) / 10) throw parse_error("numeral too large", start);
                v = v * 10 + d;
                ++i;
            }
            out.push_back({Type::Number, std::string(src.substr(start, i - start)), v, start});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                ++i;
            Type t = std::isupper(static_cast<unsigned char>(c)) ? Type::UIdent : Type::Ident;
            push(t, start, std::string(src.substr(start, i - start)));
            continue;
        }
        auto two = src.substr(i, 2);
        auto three = src.substr(i, 3);
        if (three == "<->") { push(Type::DArrow, start); i += 3; continue; }
        if (two == "->") { push(Type::Arrow, start); i += 2; continue; }
        if (two == "<=") { push(Type::Le, start); i += 2; continue; }
        if (two == "!=") { push(Type::Neq, start); i += 2; continue; }
        if (two == "=_") { push(Type::ModEq, start); i += 2; continue; }
        switch (c) {
            case '+': push(Type::Plus, start); break;
            case '*': push(Type::Star, start); break;
            case '(': push(Type::LParen, start); break;
            case ')': push(Type::RParen, start); break;
            case '.': push(Type::Dot, start); break;
            case ',': push(Type::Comma, start); break;
            case '=': push(Type::Eq, start); break;
            case '<': push(Type::Lt, start); break;
            case '~': push(Type::Tilde, start); break;
            case '&': push(Type::Amp, start); break;
            case '|': push(Type::Bar, start); break;
            default: throw parse_error(std::string("unexpected character '") + c + "'", start);
        }
        ++i;
    }
    out.push_back({Type::End, {}, 0, src.size()});
    return out;
}

} // namespace tok

struct ParseOptions {
    bool allow_relations = false; // accept R(t1, ..., tk) applications
};

namespace detail {

class PraParser {
public:
    PraParser(std::string_view src, ParseOptions opts)
        : toks_(tok::lex(src)), opts_(opts) {}

    PraFormula parse_formula_all() {
        PraFormula f = formula();
        expect(tok::Type::End, "trailing input after formula");
        return f;
    }
    Term parse_term_all() {
        Term t = term();
        expect(tok::Type::End, "trailing input after term");
        return t;
    }

private:
    using T = tok::Type;

    const tok::Token& cur() const { return toks_[i_]; }
    bool at(T t) const { return cur().type == t; }
    bool accept(T t) {
        if (!at(t)) return false;
        ++i_;
        return true;
    }
    void expect(T t, const char* msg) {
        if (!accept(t)) throw parse_error(msg, cur().pos);
    }
    [[noreturn]] void fail(const std::string& msg) { throw parse_error(msg, cur().pos); }

    PraFormula formula() { return iff(); }

    PraFormula iff() {
        PraFormula f = imp();
        while (accept(T::DArrow)) f = PraFormula::iff(f, imp());
        return f;
    }
    PraFormula imp() {
        PraFormula f = disj();
        if (accept(T::Arrow)) return PraFormula::implies(f, imp());
        return f;
    }
    PraFormula disj() {
        PraFormula f = conj();
        while (accept(T::Bar)) f = PraFormula::or_(f, conj());
        return f;
    }
    PraFormula conj() {
        PraFormula f = neg();
        while (accept(T::Amp)) f = PraFormula::and_(f, neg());
        return f;
    }
    PraFormula neg() {
        if (accept(T::Tilde)) return PraFormula::not_(neg());
        if (at(T::UIdent) && (cur().text == "E" || cur().text == "A")) {
            bool ex = cur().text == "E";
            ++i_;
            if (!at(T::Ident)) fail("expected variable after quantifier");
            std::string v = cur().text;
            ++i_;
            expect(T::Dot, "expected '.' after quantified variable");
            PraFormula body = formula();
            return ex ? PraFormula::exists(v, body) : PraFormula::forall(v, body);
        }
        return primary();
    }

    PraFormula primary() {
        if (at(T::UIdent)) return relapp();
        if (at(T::LParen)) {
            // Could open a parenthesized term (then an atom follows) or a
            // parenthesized formula.  Try the atom reading first.
            size_t save = i_;
            try {
                return atom();
            } catch (const parse_error&) {
                i_ = save;
            }
            expect(T::LParen, "expected '('");
            PraFormula f = formula();
            expect(T::RParen, "expected ')'");
            return f;
        }
        return atom();
    }

    PraFormula relapp() {
        if (!opts_.allow_relations) fail("relation symbols are not allowed here");
        std::string name = cur().text;
        ++i_;
        expect(T::LParen, "expected '(' after relation symbol");
        std::vector<Term> args;
        args.push_back(term());
        while (accept(T::Comma)) args.push_back(term());
        expect(T::RParen, "expected ')' after relation arguments");
        return PraFormula::rel(std::move(name), std::move(args));
    }

    PraFormula atom() {
        Term l = term();
        if (accept(T::Eq)) return PraFormula::atom(PraAtom::eq(l, term()));
        if (accept(T::Le)) return PraFormula::atom(PraAtom::le(l, term()));
        if (accept(T::Lt))
            return PraFormula::atom(PraAtom::le(Term::add(l, Term::one()), term()));
        if (accept(T::Neq)) return PraFormula::not_(PraFormula::atom(PraAtom::eq(l, term())));
        if (at(T::ModEq)) {
            ++i_;
            if (!at(T::Number)) fail("expected modulus after '=_'");
            uint64_t m = cur().number;
            ++i_;
            if (m == 0) fail("modulus must be positive");
            return PraFormula::atom(PraAtom::mod(m, l, term()));
        }
        fail("expected relation in atom");
    }

    Term term() {
        Term t = factor();
        while (accept(T::Plus)) t = Term::add(t, factor());
        return t;
    }
    Term factor() {
        if (at(T::Number) && toks_[i_ + 1].type == T::Star) {
            uint64_t k = cur().number;
            i_ += 2;
            return Term::scale(k, tprim());
        }
        return tprim();
    }
    Term tprim() {
        if (at(T::Ident)) {
            std::string v = cur().text;
            ++i_;
            return Term::var(v);
        }
        if (at(T::Number)) {
            uint64_t v = cur().number;
            ++i_;
            return Term::numeral(v);
        }
        if (accept(T::LParen)) {
            Term t = term();
            expect(T::RParen, "expected ')' in term");
            return t;
        }
        fail("expected term");
    }

    std::vector<tok::Token> toks_;
    size_t i_ = 0;
    ParseOptions opts_;
};

} // namespace detail

inline PraFormula parse_pra(std::string_view src, ParseOptions opts = {}) {
    return detail::PraParser(src, opts).parse_formula_all();
}
inline Term parse_pra_term(std::string_view src) {
    return detail::PraParser(src, {}).parse_term_all();
}

// ---------------------------------------------------------------------------
// Printing.  Binding strength: <-> < -> < | < & < ~ < atoms; '->' associates
// to the right, the other binaries to the left; a quantifier body extends as
// far as possible, so a quantifier under any connective is parenthesized.

namespace detail {

inline void print_term_into(const Term& t, std::string& out, bool parens_add) {
    switch (t.kind()) {
        case Term::Kind::Zero: out += '0'; return;
        case Term::Kind::One: out += '1'; return;
        case Term::Kind::Var: out += t.name(); return;
        case Term::Kind::Numeral: out += std::to_string(t.value()); return;
        case Term::Kind::Add:
            if (parens_add) out += '(';
            print_term_into(t.lhs(), out, false);
            out += " + ";
            print_term_into(t.rhs(), out, true); // right-nested sums keep parens
            if (parens_add) out += ')';
            return;
        case Term::Kind::Scale: {
            out += std::to_string(t.factor());
            out += '*';
            bool inner = t.scaled().kind() == Term::Kind::Add ||
                         t.scaled().kind() == Term::Kind::Scale;
            if (inner) out += '(';
            print_term_into(t.scaled(), out, false);
            if (inner) out += ')';
            return;
        }
    }
}

// level: 1 iff, 2 implies, 3 or, 4 and, 5 not, 6 primary
inline void print_pra_into(const PraFormula& f, std::string& out, int level) {
    using K = PraFormula::Kind;
    auto wrap = [&](int mine, auto&& body) {
        bool parens = mine < level;
        if (parens) out += '(';
        body();
        if (parens) out += ')';
    };
    switch (f.kind()) {
        case K::Atom: {
            const PraAtom& a = f.as_atom();
            print_term_into(a.lhs, out, false);
            switch (a.rel) {
                case PraAtom::Rel::Eq: out += " = "; break;
                case PraAtom::Rel::Le: out += " <= "; break;
                case PraAtom::Rel::Mod: out += " =_" + std::to_string(a.modulus) + " "; break;
            }
            print_term_into(a.rhs, out, false);
            return;
        }
        case K::RelApp: {
            out += f.rel_name();
            out += '(';
            bool first = true;
            for (const Term& t : f.rel_args()) {
                if (!first) out += ", ";
                first = false;
                print_term_into(t, out, false);
            }
            out += ')';
            return;
        }
        case K::Not:
            wrap(5, [&] {
                out += '~';
                const PraFormula c = f.child();
                if (c.kind() == K::Not || c.kind() == K::RelApp) {
                    print_pra_into(c, out, 5);
                } else {
                    out += '(';
                    print_pra_into(c, out, 0);
                    out += ')';
                }
            });
            return;
        case K::And:
            wrap(4, [&] {
                print_pra_into(f.lhs(), out, 4);
                out += " & ";
                print_pra_into(f.rhs(), out, 5);
            });
            return;
        case K::Or:
            wrap(3, [&] {
                print_pra_into(f.lhs(), out, 3);
                out += " | ";
                print_pra_into(f.rhs(), out, 4);
            });
            return;
        case K::Implies:
            wrap(2, [&] {
                print_pra_into(f.lhs(), out, 3);
                out += " -> ";
                print_pra_into(f.rhs(), out, 2);
            });
            return;
        case K::Iff:
            wrap(1, [&] {
                print_pra_into(f.lhs(), out, 1);
                out += " <-> ";
                print_pra_into(f.rhs(), out, 2);
            });
            return;
        case K::Exists:
        case K::Forall: {
            // The body extends as far as possible, so anywhere but the top
            // level the whole quantified formula is parenthesized.
            bool parens = level > 0;
            if (parens) out += '(';
            out += f.kind() == K::Exists ? "E " : "A ";
            out += f.var();
            out += ". ";
            print_pra_into(f.body(), out, 0);
            if (parens) out += ')';
            return;
        }
    }
}

} // namespace detail

inline std::string print_term(const Term& t) {
    std::string out;
    detail::print_term_into(t, out, false);
    return out;
}

inline std::string print_pra(const PraFormula& f) {
    std::string out;
    detail::print_pra_into(f, out, 0);
    return out;
}

// ---------------------------------------------------------------------------
// Size report: all three measures of one formula.

struct SizeReport {
    BigUint paper_symbols; // symbols after expanding all abbreviations
    uint64_t node_count;   // nodes of the tree as held in memory
    uint64_t rendered_len; // bytes of the canonical rendering
};

inline SizeReport size(const PraFormula& f) {
    return {paper_symbols(f), node_count(f), print_pra(f).size()};
}

} // namespace quelim
