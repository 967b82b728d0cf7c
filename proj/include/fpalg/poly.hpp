#ifndef FPALG_POLY_HPP
#define FPALG_POLY_HPP

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "fpalg/bigint.hpp"
#include "fpalg/field.hpp"
#include "fpalg/mat.hpp"

namespace fpalg {

// Univariate polynomial over F_p, coefficients ascending, no stored leading
// zeros (zero polynomial has empty coefficient list).
struct Poly {
    PrimeField F;
    std::vector<u64> c;

    Poly() {}
    explicit Poly(PrimeField F_) : F(F_) {}
    Poly(PrimeField F_, std::vector<u64> c_) : F(F_), c(std::move(c_)) {
        for (auto& x : c) x %= F.p;
        trim();
    }

    void trim() { while (!c.empty() && c.back() == 0) c.pop_back(); }
    bool is_zero() const { return c.empty(); }
    int deg() const { return (int)c.size() - 1; }
    u64 lead() const { return c.empty() ? 0 : c.back(); }
    bool is_monic() const { return lead() == 1; }
    u64 coeff(size_t i) const { return i < c.size() ? c[i] : 0; }

    static Poly zero(PrimeField F) { return Poly(F); }
    static Poly one(PrimeField F) { return Poly(F, {1}); }
    static Poly x(PrimeField F) { return Poly(F, {0, 1}); }
    static Poly xpow(PrimeField F, size_t e) {
        std::vector<u64> v(e + 1, 0);
        v[e] = 1;
        return Poly(F, std::move(v));
    }
    static Poly constant(PrimeField F, u64 v) { return Poly(F, {v}); }

    bool operator==(const Poly& o) const { return F.p == o.F.p && c == o.c; }
};

inline Poly add(const Poly& a, const Poly& b) {
    Poly r(a.F);
    r.c.resize(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.F.add(a.coeff(i), b.coeff(i));
    r.trim();
    return r;
}

inline Poly sub(const Poly& a, const Poly& b) {
    Poly r(a.F);
    r.c.resize(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.F.sub(a.coeff(i), b.coeff(i));
    r.trim();
    return r;
}

inline Poly scale(const Poly& a, u64 s) {
    Poly r(a.F);
    r.c.resize(a.c.size());
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.F.mul(a.c[i], s);
    r.trim();
    return r;
}

inline Poly mul(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly::zero(a.F);
    Poly r(a.F);
    r.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (!a.c[i]) continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = a.F.add(r.c[i + j], a.F.mul(a.c[i], b.c[j]));
    }
    return r;
}

inline void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    q = Poly::zero(a.F);
    r = a;
    u64 linv = a.F.inv(b.lead());
    if (r.deg() >= b.deg()) q.c.assign(r.deg() - b.deg() + 1, 0);
    while (!r.is_zero() && r.deg() >= b.deg()) {
        size_t shift = r.deg() - b.deg();
        u64 f = a.F.mul(r.lead(), linv);
        q.c[shift] = f;
        for (size_t i = 0; i < b.c.size(); ++i)
            r.c[shift + i] = a.F.sub(r.c[shift + i], a.F.mul(f, b.c[i]));
        r.trim();
    }
    q.trim();
}

inline Poly mod(const Poly& a, const Poly& b) {
    Poly q, r;
    divmod(a, b, q, r);
    return r;
}

inline Poly divexact(const Poly& a, const Poly& b) {
    Poly q, r;
    divmod(a, b, q, r);
    if (!r.is_zero()) throw std::domain_error("inexact polynomial division");
    return q;
}

inline Poly monic(const Poly& a) {
    if (a.is_zero()) return a;
    return scale(a, a.F.inv(a.lead()));
}

inline Poly poly_gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly r = mod(a, b);
        a = b;
        b = r;
    }
    return monic(a);
}

inline Poly derivative(const Poly& a) {
    Poly r(a.F);
    if (a.c.size() <= 1) return r;
    r.c.resize(a.c.size() - 1);
    for (size_t i = 1; i < a.c.size(); ++i) r.c[i - 1] = a.F.mul(a.c[i], i % a.F.p);
    r.trim();
    return r;
}

inline u64 eval(const Poly& a, u64 x) {
    u64 r = 0;
    for (size_t i = a.c.size(); i-- > 0;) r = a.F.add(a.F.mul(r, x), a.c[i]);
    return r;
}

inline Poly mulmod_poly(const Poly& a, const Poly& b, const Poly& f) { return mod(mul(a, b), f); }

inline Poly powmod_poly(Poly base, u64 e, const Poly& f) {
    Poly r = mod(Poly::one(f.F), f);
    base = mod(base, f);
    while (e) {
        if (e & 1) r = mulmod_poly(r, base, f);
        base = mulmod_poly(base, base, f);
        e >>= 1;
    }
    return r;
}

inline Poly powmod_poly_big(Poly base, const BigUint& e, const Poly& f) {
    Poly r = mod(Poly::one(f.F), f);
    base = mod(base, f);
    for (size_t i = e.bit_length(); i-- > 0;) {
        r = mulmod_poly(r, r, f);
        if (e.bit(i)) r = mulmod_poly(r, base, f);
    }
    return r;
}

// ---- cyclotomic polynomials ------------------------------------------------

struct CharDividesIndex : std::runtime_error {
    CharDividesIndex() : std::runtime_error("characteristic divides cyclotomic index") {}
};

// Phi_r mod p by exact division of X^r - 1 by the proper-divisor cyclotomics.
inline Poly cyclotomic(u64 r, PrimeField F) {
    if (r == 0) throw std::invalid_argument("cyclotomic index must be positive");
    if (r % F.p == 0) throw CharDividesIndex();
    std::map<u64, Poly> phi;
    for (u64 d = 1; d <= r; ++d) {
        if (r % d != 0) continue;
        Poly num = sub(Poly::xpow(F, d), Poly::one(F));
        for (auto& [e, ph] : phi)
            if (d % e == 0) num = divexact(num, ph);
        phi[d] = num;
    }
    return phi[r];
}

// ---- squarefree and distinct-degree machinery ------------------------------

struct NotSquarefree : std::runtime_error {
    Poly factor; // nontrivial gcd(f, f')
    explicit NotSquarefree(Poly g)
        : std::runtime_error("polynomial is not squarefree"), factor(std::move(g)) {}
};

inline bool is_squarefree(const Poly& f) {
    Poly d = derivative(f);
    if (d.is_zero()) return f.deg() <= 0;
    return poly_gcd(f, d).deg() == 0;
}

inline void require_squarefree(const Poly& f) {
    Poly d = derivative(f);
    if (d.is_zero()) {
        if (f.deg() > 0) throw NotSquarefree(f); // p-th power shape
        return;
    }
    Poly g = poly_gcd(f, d);
    if (g.deg() > 0) throw NotSquarefree(g);
}

// pairs (d, product of all monic irreducible factors of degree d), d ascending
inline std::vector<std::pair<u64, Poly>> distinct_degree_factorization(const Poly& f_in) {
    Poly f = monic(f_in);
    if (f.deg() < 1) throw std::invalid_argument("ddf needs positive degree");
    require_squarefree(f);
    std::vector<std::pair<u64, Poly>> out;
    Poly h = mod(Poly::x(f.F), f); // X^(p^d) mod f as d advances
    Poly rest = f;
    u64 d = 0;
    while (rest.deg() > 0) {
        ++d;
        if ((int)(2 * d) > rest.deg()) {
            // everything left is a single irreducible factor
            out.emplace_back((u64)rest.deg(), rest);
            break;
        }
        h = powmod_poly_big(h, BigUint(f.F.p), f);
        Poly g = poly_gcd(rest, sub(h, Poly::x(f.F)));
        if (g.deg() > 0) {
            out.emplace_back(d, g);
            rest = divexact(rest, g);
        }
    }
    return out;
}

// ---- deterministic Berlekamp ----------------------------------------------
//
// Time O(p * deg^2)-ish; callers route here only when p is small relative to
// the instance, mirroring the char k <= m^2 escape hatch.

namespace detail {

inline void berlekamp_squarefree(const Poly& f, std::vector<Poly>& out) {
    if (f.deg() == 1) { out.push_back(monic(f)); return; }
    PrimeField F = f.F;
    size_t n = (size_t)f.deg();
    // Frobenius matrix on F_p[x]/(f): column j = x^(jp) mod f
    std::vector<Poly> frob(n);
    Poly xp = powmod_poly_big(Poly::x(F), BigUint(F.p), f);
    frob[0] = Poly::one(F);
    for (size_t j = 1; j < n; ++j) frob[j] = mulmod_poly(frob[j - 1], xp, f);
    // kernel of (Frob - id)
    Mat M(F, n, n);
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < n; ++i) M.at(i, j) = frob[j].coeff(i);
        M.at(j, j) = F.sub(M.at(j, j), 1);
    }
    Mat K = M.kernel();
    if (K.rows <= 1) { out.push_back(monic(f)); return; }
    // pick a non-constant kernel element and split by gcd(f, v - c)
    for (size_t i = 0; i < K.rows; ++i) {
        Poly v(F, K.row(i));
        if (v.deg() < 1) continue;
        std::vector<Poly> pieces;
        Poly rest = f;
        for (u64 cc = 0; cc < F.p && rest.deg() > 0; ++cc) {
            Poly g = poly_gcd(rest, sub(v, Poly::constant(F, cc)));
            if (g.deg() > 0) {
                pieces.push_back(g);
                rest = divexact(rest, g);
            }
        }
        if (pieces.size() > 1) {
            for (const Poly& piece : pieces) berlekamp_squarefree(piece, out);
            return;
        }
    }
    // kernel dimension > 1 guarantees some kernel element separates
    throw std::logic_error("berlekamp split failure");
}

} // namespace detail

namespace detail {

// all distinct monic irreducible factors, multiplicities ignored
inline void distinct_irreducibles(Poly f, std::vector<Poly>& out) {
    f = monic(f);
    if (f.deg() <= 0) return;
    Poly d = derivative(f);
    if (d.is_zero()) {
        // f = h(X^p) = h(X)^p over F_p; same irreducible factors as h
        Poly h(f.F);
        h.c.resize((f.c.size() - 1) / f.F.p + 1, 0);
        for (size_t i = 0; i < f.c.size(); i += f.F.p) h.c[i / f.F.p] = f.c[i];
        h.trim();
        distinct_irreducibles(h, out);
        return;
    }
    Poly s = divexact(f, poly_gcd(f, d)); // squarefree, but may miss factors
    std::vector<Poly> irr;                // whose multiplicity p divides
    berlekamp_squarefree(s, irr);
    for (auto& q : irr) {
        bool seen = false;
        for (auto& o : out) seen = seen || o == q;
        if (!seen) out.push_back(q);
    }
    Poly rest = divexact(f, s);
    if (rest.deg() > 0) distinct_irreducibles(rest, out);
}

} // namespace detail

inline bool poly_less(const Poly& a, const Poly& b) {
    if (a.deg() != b.deg()) return a.deg() < b.deg();
    for (size_t i = a.c.size(); i-- > 0;)
        if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
}

// monic irreducible factors with multiplicity, sorted (degree, then coeffs)
inline std::vector<Poly> berlekamp_deterministic(Poly f) {
    if (f.is_zero()) throw std::invalid_argument("cannot factor zero");
    f = monic(f);
    std::vector<Poly> distinct;
    detail::distinct_irreducibles(f, distinct);
    std::vector<Poly> out;
    for (auto& q : distinct) {
        Poly rest = f;
        for (;;) {
            Poly quo, rem;
            divmod(rest, q, quo, rem);
            if (!rem.is_zero()) break;
            out.push_back(q);
            rest = quo;
        }
    }
    std::sort(out.begin(), out.end(), poly_less);
    return out;
}

} // namespace fpalg

#endif
