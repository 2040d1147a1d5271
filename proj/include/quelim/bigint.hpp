// quelim :: arbitrary-precision unsigned / signed integers
//
// Minimal big-integer support for size accounting and the polynomial model:
// add, subtract (no underflow), multiply, divide by a machine word, compare,
// decimal I/O.  Limbs are base 2^32, little-endian, no trailing zero limbs.
#pragma once

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quelim {

class BigUint {
public:
    BigUint() = default;
    BigUint(uint64_t v) {
        if (v) {
            limbs_.push_back(static_cast<uint32_t>(v));
            if (v >> 32) limbs_.push_back(static_cast<uint32_t>(v >> 32));
        }
    }

    static BigUint from_decimal(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("empty decimal literal");
        BigUint r;
        for (char c : s) {
            if (c < '0' || c > '9') throw std::invalid_argument("bad decimal digit");
            r = r.mul_word(10);
            r = r.add_word(static_cast<uint64_t>(c - '0'));
        }
        return r;
    }

    bool is_zero() const { return limbs_.empty(); }

    bool fits_u64() const { return limbs_.size() <= 2; }
    uint64_t to_u64() const {
        if (!fits_u64()) throw std::overflow_error("BigUint does not fit in 64 bits");
        uint64_t v = 0;
        if (limbs_.size() > 0) v = limbs_[0];
        if (limbs_.size() > 1) v |= static_cast<uint64_t>(limbs_[1]) << 32;
        return v;
    }

    friend BigUint operator+(const BigUint& a, const BigUint& b) {
        BigUint r;
        const size_t n = std::max(a.limbs_.size(), b.limbs_.size());
        r.limbs_.reserve(n + 1);
        uint64_t carry = 0;
        for (size_t i = 0; i < n; ++i) {
            uint64_t s = carry;
            if (i < a.limbs_.size()) s += a.limbs_[i];
            if (i < b.limbs_.size()) s += b.limbs_[i];
            r.limbs_.push_back(static_cast<uint32_t>(s));
            carry = s >> 32;
        }
        if (carry) r.limbs_.push_back(static_cast<uint32_t>(carry));
        return r;
    }

    // Requires a >= b.
    friend BigUint operator-(const BigUint& a, const BigUint& b) {
        if (a < b) throw std::underflow_error("BigUint subtraction underflow");
        BigUint r;
        r.limbs_.reserve(a.limbs_.size());
        int64_t borrow = 0;
        for (size_t i = 0; i < a.limbs_.size(); ++i) {
            int64_t d = static_cast<int64_t>(a.limbs_[i]) - borrow -
                        (i < b.limbs_.size() ? static_cast<int64_t>(b.limbs_[i]) : 0);
            borrow = 0;
            if (d < 0) { d += (int64_t(1) << 32); borrow = 1; }
            r.limbs_.push_back(static_cast<uint32_t>(d));
        }
        r.trim();
        return r;
    }

    friend BigUint operator*(const BigUint& a, const BigUint& b) {
        if (a.is_zero() || b.is_zero()) return BigUint();
        BigUint r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (size_t i = 0; i < a.limbs_.size(); ++i) {
            uint64_t carry = 0;
            for (size_t j = 0; j < b.limbs_.size(); ++j) {
                uint64_t cur = static_cast<uint64_t>(a.limbs_[i]) * b.limbs_[j] +
                               r.limbs_[i + j] + carry;
                r.limbs_[i + j] = static_cast<uint32_t>(cur);
                carry = cur >> 32;
            }
            size_t k = i + b.limbs_.size();
            while (carry) {
                uint64_t cur = r.limbs_[k] + carry;
                r.limbs_[k] = static_cast<uint32_t>(cur);
                carry = cur >> 32;
                ++k;
            }
        }
        r.trim();
        return r;
    }

    BigUint add_word(uint64_t w) const { return *this + BigUint(w); }
    BigUint mul_word(uint64_t w) const { return *this * BigUint(w); }

    // Quotient and remainder for division by a nonzero machine word.
    std::pair<BigUint, uint64_t> divmod_word(uint64_t d) const {
        if (d == 0) throw std::domain_error("division by zero");
        BigUint q;
        q.limbs_.assign(limbs_.size(), 0);
        unsigned __int128 rem = 0;
        for (size_t i = limbs_.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 32) | limbs_[i];
            q.limbs_[i] = static_cast<uint32_t>(cur / d);
            rem = cur % d;
        }
        q.trim();
        return {q, static_cast<uint64_t>(rem)};
    }

    bool divisible_by(uint64_t d) const { return divmod_word(d).second == 0; }

    friend bool operator==(const BigUint& a, const BigUint& b) { return a.limbs_ == b.limbs_; }
    friend std::strong_ordering operator<=>(const BigUint& a, const BigUint& b) {
        if (a.limbs_.size() != b.limbs_.size())
            return a.limbs_.size() <=> b.limbs_.size();
        for (size_t i = a.limbs_.size(); i-- > 0;)
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] <=> b.limbs_[i];
        return std::strong_ordering::equal;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::string out;
        BigUint cur = *this;
        while (!cur.is_zero()) {
            auto [q, r] = cur.divmod_word(1000000000u);
            std::string chunk = std::to_string(r);
            if (!q.is_zero()) chunk.insert(0, 9 - chunk.size(), '0');
            out.insert(0, chunk);
            cur = std::move(q);
        }
        return out;
    }

private:
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }
    std::vector<uint32_t> limbs_;
};

// Signed wrapper; zero is canonically non-negative.
class BigInt {
public:
    BigInt() = default;
    BigInt(int64_t v) : neg_(v < 0), mag_(v < 0 ? static_cast<uint64_t>(-(v + 1)) + 1 : static_cast<uint64_t>(v)) {}
    BigInt(BigUint mag, bool neg = false) : neg_(neg && !mag.is_zero()), mag_(std::move(mag)) {}

    bool is_zero() const { return mag_.is_zero(); }
    bool negative() const { return neg_; }
    const BigUint& magnitude() const { return mag_; }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.neg_ == b.neg_) return BigInt(a.mag_ + b.mag_, a.neg_);
        if (a.mag_ >= b.mag_) return BigInt(a.mag_ - b.mag_, a.neg_);
        return BigInt(b.mag_ - a.mag_, b.neg_);
    }
    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + BigInt(b.mag_, !b.neg_); }

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.neg_ == b.neg_ && a.mag_ == b.mag_;
    }
    friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b) {
        if (a.neg_ != b.neg_) return a.neg_ ? std::strong_ordering::less : std::strong_ordering::greater;
        auto mags = a.mag_ <=> b.mag_;
        if (a.neg_) return mags == std::strong_ordering::less    ? std::strong_ordering::greater
                         : mags == std::strong_ordering::greater ? std::strong_ordering::less
                                                                 : std::strong_ordering::equal;
        return mags;
    }

    // Exact division by a nonzero word; fails if the word does not divide the magnitude.
    BigInt divide_exact(uint64_t d) const {
        auto [q, r] = mag_.divmod_word(d);
        if (r != 0) throw std::domain_error("inexact division");
        return BigInt(q, neg_);
    }
    bool divisible_by(uint64_t d) const { return mag_.divisible_by(d); }

    std::string to_string() const { return neg_ ? "-" + mag_.to_string() : mag_.to_string(); }

private:
    bool neg_ = false;
    BigUint mag_;
};

} // namespace quelim
