#ifndef FPALG_FIELD_HPP
#define FPALG_FIELD_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#ifndef __SIZEOF_INT128__
#error "fpalg requires a compiler with __int128 support"
#endif

namespace fpalg {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return (u64)((u128)a * b % m); }

inline u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

inline u64 gcd_u64(u64 a, u64 b) {
    while (b) { u64 t = a % b; a = b; b = t; }
    return a;
}

// Deterministic Miller-Rabin; the witness set below is known to be exact for
// all n < 2^64.
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

// Odd prime modulus below 2^61 so that all products fit in 128-bit
// intermediates with room to spare.
struct PrimeField {
    u64 p;

    PrimeField() : p(3) {}
    explicit PrimeField(u64 p_) : p(p_) {
        if (p < 3) throw std::invalid_argument("modulus must be an odd prime >= 3");
        if (p >= (1ull << 61)) throw std::invalid_argument("modulus must be < 2^61");
        if (!is_prime_u64(p)) throw std::invalid_argument("modulus " + std::to_string(p) + " is not prime");
    }

    u64 reduce(long long v) const {
        long long r = v % (long long)p;
        if (r < 0) r += (long long)p;
        return (u64)r;
    }
    u64 add(u64 a, u64 b) const { u64 s = a + b; return s >= p ? s - p : s; }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p - b; }
    u64 neg(u64 a) const { return a ? p - a : 0; }
    u64 mul(u64 a, u64 b) const { return mulmod(a, b, p); }
    u64 pow(u64 a, u64 e) const { return powmod(a, e, p); }
    u64 inv(u64 a) const {
        if (a == 0) throw std::domain_error("division by zero in F_p");
        return powmod(a, p - 2, p);
    }
    bool operator==(const PrimeField& o) const { return p == o.p; }
};

} // namespace fpalg

#endif
