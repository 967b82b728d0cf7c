#ifndef FPALG_BIGINT_HPP
#define FPALG_BIGINT_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fpalg/field.hpp"

namespace fpalg {

// Unsigned big integer, just large enough for exponent bookkeeping (orders of
// unit groups, products of component sizes). Field elements never use this.
struct BigUint {
    std::vector<u64> w; // little-endian limbs, no trailing zero limbs

    BigUint() {}
    BigUint(u64 v) { if (v) w.push_back(v); }

    bool is_zero() const { return w.empty(); }
    bool is_one() const { return w.size() == 1 && w[0] == 1; }

    void trim() { while (!w.empty() && w.back() == 0) w.pop_back(); }

    bool operator==(const BigUint& o) const { return w == o.w; }

    // this * m
    BigUint mul(u64 m) const {
        BigUint r;
        if (m == 0 || is_zero()) return r;
        r.w.assign(w.size() + 1, 0);
        u128 carry = 0;
        for (size_t i = 0; i < w.size(); ++i) {
            u128 t = (u128)w[i] * m + carry;
            r.w[i] = (u64)t;
            carry = t >> 64;
        }
        r.w[w.size()] = (u64)carry;
        r.trim();
        return r;
    }

    BigUint mul(const BigUint& o) const {
        BigUint r;
        if (is_zero() || o.is_zero()) return r;
        r.w.assign(w.size() + o.w.size(), 0);
        for (size_t i = 0; i < w.size(); ++i) {
            u128 carry = 0;
            for (size_t j = 0; j < o.w.size(); ++j) {
                u128 t = (u128)w[i] * o.w[j] + r.w[i + j] + carry;
                r.w[i + j] = (u64)t;
                carry = t >> 64;
            }
            r.w[i + o.w.size()] += (u64)carry;
        }
        r.trim();
        return r;
    }

    // quotient and remainder by a machine word
    BigUint divmod(u64 d, u64& rem) const {
        if (d == 0) throw std::domain_error("BigUint division by zero");
        BigUint q;
        q.w.assign(w.size(), 0);
        u128 r = 0;
        for (size_t i = w.size(); i-- > 0;) {
            u128 cur = (r << 64) | w[i];
            q.w[i] = (u64)(cur / d);
            r = cur % d;
        }
        q.trim();
        rem = (u64)r;
        return q;
    }

    u64 mod(u64 d) const { u64 r; divmod(d, r); return r; }

    BigUint sub_u64(u64 v) const {
        BigUint r = *this;
        u64 borrow = v;
        for (size_t i = 0; i < r.w.size() && borrow; ++i) {
            u64 old = r.w[i];
            r.w[i] -= borrow;
            borrow = (old < borrow) ? 1 : 0;
        }
        if (borrow) throw std::domain_error("BigUint underflow");
        r.trim();
        return r;
    }

    BigUint add(const BigUint& o) const {
        BigUint r;
        size_t n = std::max(w.size(), o.w.size());
        r.w.resize(n, 0);
        unsigned __int128 carry = 0;
        for (size_t i = 0; i < n; ++i) {
            unsigned __int128 s = carry;
            if (i < w.size()) s += w[i];
            if (i < o.w.size()) s += o.w[i];
            r.w[i] = (u64)s;
            carry = s >> 64;
        }
        if (carry) r.w.push_back((u64)carry);
        return r;
    }

    BigUint add_u64(u64 v) const {
        BigUint r = *this;
        u128 carry = v;
        for (size_t i = 0; i < r.w.size() && carry; ++i) {
            u128 t = (u128)r.w[i] + carry;
            r.w[i] = (u64)t;
            carry = t >> 64;
        }
        if (carry) r.w.push_back((u64)carry);
        return r;
    }

    size_t bit_length() const {
        if (is_zero()) return 0;
        size_t b = 64 * (w.size() - 1);
        u64 top = w.back();
        while (top) { ++b; top >>= 1; }
        return b;
    }
    bool bit(size_t i) const {
        size_t limb = i / 64;
        if (limb >= w.size()) return false;
        return (w[limb] >> (i % 64)) & 1;
    }

    bool fits_u64() const { return w.size() <= 1; }
    u64 as_u64() const { return w.empty() ? 0 : w[0]; }

    static BigUint pow_u64(u64 base, u64 exp) {
        BigUint r(1);
        for (u64 i = 0; i < exp; ++i) r = r.mul(base);
        return r;
    }
};

inline u64 gcd_big_u64(const BigUint& a, u64 b) {
    if (b == 0) { return a.fits_u64() ? a.as_u64() : 0; } // gcd with huge a, b=0: caller avoids
    return gcd_u64(b, a.mod(b));
}

// lcm(a, b) for big a and word b
inline BigUint lcm_big_u64(const BigUint& a, u64 b) {
    if (a.is_zero()) return BigUint(b);
    if (b == 0) return a;
    u64 g = gcd_big_u64(a, b);
    u64 rem;
    return a.divmod(g, rem).mul(b);
}

// largest e with r^e | a, dividing it out
inline BigUint strip_factor(BigUint a, u64 r, u64& e) {
    e = 0;
    if (a.is_zero()) return a;
    for (;;) {
        u64 rem;
        BigUint q = a.divmod(r, rem);
        if (rem != 0) return a;
        a = q;
        ++e;
    }
}

} // namespace fpalg

#endif
