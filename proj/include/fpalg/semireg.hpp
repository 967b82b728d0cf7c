#ifndef FPALG_SEMIREG_HPP
#define FPALG_SEMIREG_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "fpalg/algebra.hpp"
#include "fpalg/zerodiv.hpp"

namespace fpalg {

namespace detail {

inline bool mat_less(const Mat& a, const Mat& b) { return a.a < b.a; }

inline bool mat_in(const std::vector<Mat>& v, const Mat& m) {
    for (const Mat& x : v)
        if (x == m) return true;
    return false;
}

// try to surface a zero divisor of A from non-freeness over the subalgebra
// spanned by Bbasis; nullopt when A is a free module over it
inline std::optional<ZeroDivisor> nonfree_zero_divisor(const Algebra& A, const Mat& Bbasis) {
    SubAlg S = induced_algebra(A, Bbasis, A.one);
    std::vector<Vec> gens;
    for (size_t i = 0; i < A.n; ++i) gens.push_back(A.basis(i));
    auto d = free_basis_or_zero_divisor(
        S.alg, A.n, [&](const Vec& x, const Vec& v) { return A.mul(up_coords(S, x), v); },
        gens);
    if (!d.is_divisor()) return std::nullopt;
    // lift: a non-unit of the subalgebra stays a non-unit of A
    return must_zero_divisor(A, up_coords(S, d.zd->z));
}

} // namespace detail

// Decide semiregularity of the group generated by the given automorphisms.
// Found arm: the full, canonically sorted element list of G. Otherwise a
// zero divisor, extracted either from non-freeness of A over the fixed
// subalgebra or from a quotient of two enumerated elements fixing an ideal.
inline Dichotomy<std::vector<Mat>> semiregular_or_zero_divisor(const Algebra& A,
                                                               const std::vector<Mat>& gamma) {
    using R = Dichotomy<std::vector<Mat>>;
    Mat fixed = fixed_subalgebra(A, gamma);
    if (auto zd = detail::nonfree_zero_divisor(A, fixed)) return R::divisor(*zd);
    size_t m = A.n / fixed.rows;

    // BFS over products, stopping as soon as the count exceeds the free rank
    std::vector<Mat> elems{Mat::identity(A.F, A.n)};
    for (size_t head = 0; head < elems.size() && elems.size() <= m + 1; ++head)
        for (const Mat& g : gamma) {
            Mat nxt = g.mul(elems[head]);
            if (!detail::mat_in(elems, nxt)) {
                elems.push_back(nxt);
                if (elems.size() > m + 1) break;
            }
        }
    if (elems.size() <= m) {
        if (elems.size() < m) throw std::logic_error("group smaller than free rank; input not semisimple?");
        std::sort(elems.begin(), elems.end(), detail::mat_less);
        return R::found(std::move(elems));
    }

    // not semiregular: some quotient of enumerated elements fixes a component
    for (size_t i = 0; i < elems.size(); ++i)
        for (size_t j = 0; j < elems.size(); ++j) {
            if (i == j) continue;
            auto inv = elems[j].inverse();
            if (!inv) throw std::invalid_argument("input map is not invertible");
            Mat sig = elems[i].mul(*inv);
            if (sig == elems[0]) continue; // identity: elems[0] by construction
            Mat I = largest_ideal_inside(A, fixed_subalgebra(A, {sig}));
            if (I.rows == 0 || I.rows == A.n) continue;
            auto e = ideal_idempotent(A, I);
            if (!e || vec_is_zero(*e)) continue;
            return R::divisor(ZeroDivisor{*e, A.sub(A.one, *e)});
        }
    throw std::logic_error("pigeonhole pair not found; input not semisimple?");
}

// ---------------------------------------------------------------------------
// Galois-like subgroup for a subalgebra
// ---------------------------------------------------------------------------

namespace detail {

// polynomials with coefficients inside A, ascending order
using APoly = std::vector<Vec>;

inline Vec apoly_eval(const Algebra& A, const APoly& f, const Vec& x) {
    Vec r(A.n, 0);
    for (size_t i = f.size(); i-- > 0;) r = A.add(A.mul(r, x), f[i]);
    return r;
}

// divide monic f by (X - xi); remainder must vanish at the caller's site
inline APoly apoly_divide_linear(const Algebra& A, const APoly& f, const Vec& xi) {
    size_t d = f.size() - 1;
    APoly q(d, Vec(A.n, 0));
    Vec carry = f[d];
    for (size_t i = d; i-- > 0;) {
        q[i] = carry;
        carry = A.add(f[i], A.mul(carry, xi));
    }
    return q;
}

// long division f = g*q + rem with g monic
inline void apoly_divmod(const Algebra& A, APoly f, const APoly& g, APoly& q, APoly& rem) {
    size_t dg = g.size() - 1;
    if (f.size() <= dg) {
        q.assign(1, Vec(A.n, 0));
        rem = std::move(f);
        return;
    }
    q.assign(f.size() - dg, Vec(A.n, 0));
    for (size_t shift = f.size() - dg; shift-- > 0;) {
        Vec lead = f[shift + dg];
        q[shift] = lead;
        for (size_t i = 0; i <= dg; ++i)
            f[shift + i] = A.sub(f[shift + i], A.mul(lead, g[i]));
    }
    f.resize(dg ? dg : 1, Vec(A.n, 0));
    rem = std::move(f);
}

// product of (xi - roots[i]) became zero even though the seed is a non-zero
// non-divisor: walk the prefix products to the step that kills it
inline ZeroDivisor product_collapse(const Algebra& A, Vec seed, const Vec& xi,
                                    const std::vector<Vec>& roots) {
    for (const Vec& rt : roots) {
        Vec fac = A.sub(xi, rt);
        if (vec_is_zero(fac)) throw std::logic_error("repeated conjugate of a primitive element");
        Vec nxt = A.mul(seed, fac);
        if (vec_is_zero(nxt)) return must_zero_divisor(A, fac);
        if (auto d = try_zero_divisor(A, nxt)) return *d;
        seed = nxt;
    }
    throw std::logic_error("product did not collapse");
}

} // namespace detail

// For a fully listed semiregular group G with A_G = k and a subalgebra B
// containing A_G, produce the subgroup H <= G whose fixed algebra is exactly
// B, or fail into a zero divisor of A.
inline Dichotomy<std::vector<Mat>> galois_subgroup_or_zero_divisor(const Algebra& A,
                                                                   const std::vector<Mat>& G,
                                                                   const Mat& Bbasis) {
    using R = Dichotomy<std::vector<Mat>>;
    size_t d = G.size();
    if (d != A.n) throw std::invalid_argument("expected |G| = dim A (fixed algebra must be k)");
    if (A.n % Bbasis.rows != 0) throw std::invalid_argument("subalgebra dimension must divide dim A");
    if (Bbasis.rows == A.n) return R::found({Mat::identity(A.F, A.n)});
    if (Bbasis.rows == 1) {
        std::vector<Mat> all = G;
        std::sort(all.begin(), all.end(), detail::mat_less);
        return R::found(all);
    }

    auto prim = primitive_element(A, echelon(Mat::from_rows(A.F, {A.one})));
    if (prim.is_divisor()) return R::divisor(*prim.zd);
    Vec x = *prim.val;

    if (auto zd = detail::nonfree_zero_divisor(A, Bbasis)) return R::divisor(*zd);
    size_t m = A.n / Bbasis.rows;

    // minimal polynomial of x over k, lifted to A coefficients
    Poly fk = minimal_polynomial(A, x);
    if ((size_t)fk.deg() != d) throw std::invalid_argument("fixed algebra of G is larger than k");
    detail::APoly f(d + 1, Vec(A.n, 0));
    for (size_t i = 0; i <= d; ++i) f[i] = A.smul(fk.coeff(i), A.one);

    // b-polynomial of degree m with root x: x^m = sum b_i x^i over B
    std::vector<Vec> powers{A.one};
    for (size_t i = 1; i <= m; ++i) powers.push_back(A.mul(powers.back(), x));
    auto bc = free_coords(A, Bbasis, std::vector<Vec>(powers.begin(), powers.begin() + m),
                          powers[m]);
    if (!bc) throw std::logic_error("powers of the primitive element are not a free B-basis");
    detail::APoly g(m + 1, Vec(A.n, 0));
    g[m] = A.one;
    for (size_t i = 0; i < m; ++i) g[i] = A.smul(A.F.p - 1, (*bc)[i]);

    detail::APoly h, rem;
    detail::apoly_divmod(A, f, g, h, rem);
    for (const Vec& rv : rem)
        if (!vec_is_zero(rv)) throw std::logic_error("division by the B-polynomial left a remainder");

    // sort the conjugates of x into roots of g and roots of h
    detail::APoly gc = g, hc = h;
    std::vector<Mat> K;
    std::vector<Vec> groots, hroots;
    for (const Mat& sig : G) {
        Vec xi = apply_map(sig, x);
        if (gc.size() > 1 && vec_is_zero(detail::apoly_eval(A, gc, xi))) {
            gc = detail::apoly_divide_linear(A, gc, xi);
            K.push_back(sig);
            groots.push_back(xi);
            continue;
        }
        if (hc.size() > 1 && vec_is_zero(detail::apoly_eval(A, hc, xi))) {
            hc = detail::apoly_divide_linear(A, hc, xi);
            hroots.push_back(xi);
            continue;
        }
        Vec gv = detail::apoly_eval(A, g, xi);
        Vec hv = detail::apoly_eval(A, h, xi);
        if (!vec_is_zero(gv) && !vec_is_zero(hv)) return R::divisor(ZeroDivisor{gv, hv});
        // a root of g (or h) that the shrunken quotient no longer accepts:
        // the discarded linear factors hide the zero divisor
        if (vec_is_zero(gv)) {
            Vec seed = detail::apoly_eval(A, gc, xi);
            if (auto zd = try_zero_divisor(A, seed)) return R::divisor(*zd);
            return R::divisor(detail::product_collapse(A, seed, xi, groots));
        }
        Vec seed = detail::apoly_eval(A, hc, xi);
        if (auto zd = try_zero_divisor(A, seed)) return R::divisor(*zd);
        return R::divisor(detail::product_collapse(A, seed, xi, hroots));
    }
    if (K.size() != m) throw std::logic_error("conjugate sort failed; input not semisimple?");

    // mu_sigma = phi_sigma . phi_1^{-1} on the basis {beta_u x^j}
    size_t db = Bbasis.rows;
    auto phi = [&](const Vec& xs) {
        Mat M(A.F, A.n, A.n);
        Vec pw = A.one;
        for (size_t j = 0; j < m; ++j) {
            for (size_t u = 0; u < db; ++u) {
                Vec col = A.mul(Bbasis.row(u), pw);
                for (size_t i = 0; i < A.n; ++i) M.at(i, j * db + u) = col[i];
            }
            if (j + 1 < m) pw = A.mul(pw, xs);
        }
        return M;
    };
    auto p1inv = phi(x).inverse();
    if (!p1inv) throw std::logic_error("primitive powers failed to span");
    std::vector<Mat> H;
    for (size_t i = 0; i < K.size(); ++i) {
        Mat mu = phi(groots[i]).mul(*p1inv);
        if (!is_automorphism(A, mu)) {
            Mat ker = mu.kernel();
            if (ker.rows == 0) throw std::logic_error("non-automorphism with trivial kernel");
            return R::divisor(must_zero_divisor(A, ker.row(0)));
        }
        H.push_back(mu);
    }

    // H must sit inside G as a semiregular subgroup with fixed algebra B
    std::vector<Mat> both = G;
    for (const Mat& mu : H)
        if (!detail::mat_in(both, mu)) both.push_back(mu);
    auto sr = semiregular_or_zero_divisor(A, both);
    if (sr.is_divisor()) return R::divisor(*sr.zd);
    Mat fixedH = fixed_subalgebra(A, H);
    Mat Bech = echelon(Bbasis);
    if (!(fixedH == Bech)) {
        // fixed algebra too large: A is then not free over it with rank |H|
        if (auto zd = detail::nonfree_zero_divisor(A, fixedH)) return R::divisor(*zd);
        throw std::logic_error("subgroup fixed algebra mismatch");
    }
    std::sort(H.begin(), H.end(), detail::mat_less);
    return R::found(std::move(H));
}

} // namespace fpalg

#endif
