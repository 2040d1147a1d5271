// quelim :: primality, factorization, gcd/lcm on machine words
#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace quelim {

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = m == 1 ? 0 : 1;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin over the full 64-bit range.
inline bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // This base set decides primality for every n < 3.3e24, so for all u64.
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

// Smallest prime strictly greater than n; throws if none fits in u64.
inline uint64_t next_prime_above(uint64_t n) {
    for (uint64_t c = n + 1; c >= n + 1; ++c) {
        if (is_prime_u64(c)) return c;
    }
    throw std::overflow_error("no prime above n within 64 bits");
}

// Prime factorization by trial division; fine for the word-sized moduli and
// denominators used here, which are either small or have small factors.
inline std::map<uint64_t, uint32_t> factor_u64(uint64_t n) {
    std::map<uint64_t, uint32_t> f;
    for (uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) { ++f[p]; n /= p; }
    }
    if (n > 1) ++f[n];
    return f;
}

inline uint64_t gcd_u64(uint64_t a, uint64_t b) { return std::gcd(a, b); }

// lcm with overflow detection.
inline std::optional<uint64_t> checked_lcm(uint64_t a, uint64_t b) {
    if (a == 0 || b == 0) return 0;
    uint64_t g = std::gcd(a, b);
    uint64_t q = a / g;
    if (q > UINT64_MAX / b) return std::nullopt;
    return q * b;
}

inline uint64_t lcm_or_throw(uint64_t a, uint64_t b) {
    auto l = checked_lcm(a, b);
    if (!l) throw std::overflow_error("lcm overflow");
    return *l;
}

} // namespace quelim
