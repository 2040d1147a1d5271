// quelim :: terms of arithmetic over the naturals
//
// Core signature is {0, 1, +}.  Two extra node kinds keep large terms compact
// without changing the measured language: Numeral(k) abbreviates a k-fold sum
// of 1 (k >= 2), Scale(k, t) abbreviates a k-fold sum of t (k >= 2).  All size
// accounting charges them at the cost of their expansions.
#pragma once

#include "quelim/bigint.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace quelim {

class Term {
public:
    enum class Kind { Zero, One, Var, Add, Numeral, Scale };

    Term() : Term(zero()) {}

    static Term zero() { return Term(std::make_shared<Node>(Node{Kind::Zero, 0, {}, nullptr, nullptr})); }
    static Term one() { return Term(std::make_shared<Node>(Node{Kind::One, 0, {}, nullptr, nullptr})); }
    static Term var(std::string name) {
        return Term(std::make_shared<Node>(Node{Kind::Var, 0, std::move(name), nullptr, nullptr}));
    }
    static Term add(Term l, Term r) {
        return Term(std::make_shared<Node>(Node{Kind::Add, 0, {}, l.n_, r.n_}));
    }
    // Numerals 0 and 1 normalize to the core constants.
    static Term numeral(uint64_t k) {
        if (k == 0) return zero();
        if (k == 1) return one();
        return Term(std::make_shared<Node>(Node{Kind::Numeral, k, {}, nullptr, nullptr}));
    }
    // scale(0, t) = 0 and scale(1, t) = t.
    static Term scale(uint64_t k, Term t) {
        if (k == 0) return zero();
        if (k == 1) return t;
        return Term(std::make_shared<Node>(Node{Kind::Scale, k, {}, t.n_, nullptr}));
    }

    Kind kind() const { return n_->kind; }
    const std::string& name() const { assert(kind() == Kind::Var); return n_->name; }
    Term lhs() const { assert(kind() == Kind::Add); return Term(n_->a); }
    Term rhs() const { assert(kind() == Kind::Add); return Term(n_->b); }
    uint64_t value() const { assert(kind() == Kind::Numeral); return n_->k; }
    uint64_t factor() const { assert(kind() == Kind::Scale); return n_->k; }
    Term scaled() const { assert(kind() == Kind::Scale); return Term(n_->a); }

    // Physical identity, used to short-circuit structural equality.
    const void* id() const { return n_.get(); }

private:
    struct Node {
        Kind kind;
        uint64_t k;
        std::string name;
        std::shared_ptr<const Node> a, b;
    };
    explicit Term(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
};

inline bool operator==(const Term& a, const Term& b) {
    if (a.id() == b.id()) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Term::Kind::Zero:
        case Term::Kind::One: return true;
        case Term::Kind::Var: return a.name() == b.name();
        case Term::Kind::Add: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
        case Term::Kind::Numeral: return a.value() == b.value();
        case Term::Kind::Scale: return a.factor() == b.factor() && a.scaled() == b.scaled();
    }
    return false;
}
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }

inline void collect_vars(const Term& t, std::set<std::string>& out) {
    switch (t.kind()) {
        case Term::Kind::Var: out.insert(t.name()); break;
        case Term::Kind::Add: collect_vars(t.lhs(), out); collect_vars(t.rhs(), out); break;
        case Term::Kind::Scale: collect_vars(t.scaled(), out); break;
        default: break;
    }
}

inline std::set<std::string> term_vars(const Term& t) {
    std::set<std::string> s;
    collect_vars(t, s);
    return s;
}

inline uint64_t term_node_count(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Zero:
        case Term::Kind::One:
        case Term::Kind::Var:
        case Term::Kind::Numeral: return 1;
        case Term::Kind::Add: return 1 + term_node_count(t.lhs()) + term_node_count(t.rhs());
        case Term::Kind::Scale: return 1 + term_node_count(t.scaled());
    }
    return 0;
}

// Symbol count of the term written out over {0, 1, +}: a k-fold sum of 1
// costs 2k-1 symbols, a k-fold sum of t costs k|t| + (k-1).
inline BigUint term_symbols(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Zero:
        case Term::Kind::One:
        case Term::Kind::Var: return BigUint(1);
        case Term::Kind::Numeral: return BigUint(2) * BigUint(t.value()) - BigUint(1);
        case Term::Kind::Add: return term_symbols(t.lhs()) + BigUint(1) + term_symbols(t.rhs());
        case Term::Kind::Scale:
            return BigUint(t.factor()) * term_symbols(t.scaled()) + BigUint(t.factor() - 1);
    }
    return BigUint(0);
}

inline Term subst_term(const Term& t, const std::map<std::string, Term>& m) {
    switch (t.kind()) {
        case Term::Kind::Var: {
            auto it = m.find(t.name());
            return it == m.end() ? t : it->second;
        }
        case Term::Kind::Add: {
            Term l = subst_term(t.lhs(), m), r = subst_term(t.rhs(), m);
            if (l.id() == t.lhs().id() && r.id() == t.rhs().id()) return t;
            return Term::add(l, r);
        }
        case Term::Kind::Scale: {
            Term s = subst_term(t.scaled(), m);
            if (s.id() == t.scaled().id()) return t;
            return Term::scale(t.factor(), s);
        }
        default: return t;
    }
}

inline uint64_t checked_add_u64(uint64_t a, uint64_t b) {
    uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("u64 addition overflow");
    return r;
}
inline uint64_t checked_mul_u64(uint64_t a, uint64_t b) {
    uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("u64 multiplication overflow");
    return r;
}

// A term flattened to coefficients: sum of coeff[v] * v plus a constant.
struct LinearTerm {
    std::map<std::string, uint64_t> coeff; // no zero entries
    uint64_t constant = 0;

    void add_var(const std::string& v, uint64_t c) {
        if (c == 0) return;
        uint64_t& slot = coeff[v];
        slot = checked_add_u64(slot, c);
    }
    void add(const LinearTerm& o, uint64_t k = 1) {
        if (k == 0) return;
        for (auto& [v, c] : o.coeff) add_var(v, checked_mul_u64(c, k));
        constant = checked_add_u64(constant, checked_mul_u64(o.constant, k));
    }
    uint64_t coeff_of(const std::string& v) const {
        auto it = coeff.find(v);
        return it == coeff.end() ? 0 : it->second;
    }
    bool is_constant() const { return coeff.empty(); }
    friend bool operator==(const LinearTerm& a, const LinearTerm& b) = default;
};

inline void linearize_into(const Term& t, LinearTerm& acc, uint64_t k) {
    switch (t.kind()) {
        case Term::Kind::Zero: return;
        case Term::Kind::One: acc.constant = checked_add_u64(acc.constant, k); return;
        case Term::Kind::Var: acc.add_var(t.name(), k); return;
        case Term::Kind::Numeral:
            acc.constant = checked_add_u64(acc.constant, checked_mul_u64(k, t.value()));
            return;
        case Term::Kind::Add:
            linearize_into(t.lhs(), acc, k);
            linearize_into(t.rhs(), acc, k);
            return;
        case Term::Kind::Scale:
            linearize_into(t.scaled(), acc, checked_mul_u64(k, t.factor()));
            return;
    }
}

inline LinearTerm linearize(const Term& t) {
    LinearTerm acc;
    linearize_into(t, acc, 1);
    return acc;
}

// Canonical rebuild: coefficient-scaled variables in name order, constant last,
// sum folded to the left.  linearize(to_term(l)) == l.
inline Term to_term(const LinearTerm& l) {
    Term acc = Term::zero();
    bool have = false;
    for (auto& [v, c] : l.coeff) {
        Term piece = Term::scale(c, Term::var(v));
        acc = have ? Term::add(acc, piece) : piece;
        have = true;
    }
    if (l.constant != 0 || !have) {
        Term piece = Term::numeral(l.constant);
        acc = have ? Term::add(acc, piece) : piece;
    }
    return acc;
}

inline uint64_t eval_term(const Term& t, const std::function<uint64_t(const std::string&)>& env) {
    switch (t.kind()) {
        case Term::Kind::Zero: return 0;
        case Term::Kind::One: return 1;
        case Term::Kind::Var: return env(t.name());
        case Term::Kind::Numeral: return t.value();
        case Term::Kind::Add: return checked_add_u64(eval_term(t.lhs(), env), eval_term(t.rhs(), env));
        case Term::Kind::Scale: return checked_mul_u64(t.factor(), eval_term(t.scaled(), env));
    }
    return 0;
}

inline size_t term_hash(const Term& t) {
    auto mix = [](size_t h, size_t v) { return h * 1000003u ^ v; };
    switch (t.kind()) {
        case Term::Kind::Zero: return 0x51;
        case Term::Kind::One: return 0x52;
        case Term::Kind::Var: return mix(0x53, std::hash<std::string>{}(t.name()));
        case Term::Kind::Numeral: return mix(0x54, static_cast<size_t>(t.value()));
        case Term::Kind::Add: return mix(mix(0x55, term_hash(t.lhs())), term_hash(t.rhs()));
        case Term::Kind::Scale:
            return mix(mix(0x56, static_cast<size_t>(t.factor())), term_hash(t.scaled()));
    }
    return 0;
}

// Fresh-name scheme: base, then base1, base2, ...  Appending digits keeps the
// identifier lexable.
inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    if (!avoid.count(base)) return base;
    for (uint64_t i = 1;; ++i) {
        std::string cand = base + std::to_string(i);
        if (!avoid.count(cand)) return cand;
    }
}

} // namespace quelim
