#ifndef FPALG_KUMMER_HPP
#define FPALG_KUMMER_HPP

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fpalg/algebra.hpp"
#include "fpalg/poly.hpp"
#include "fpalg/semireg.hpp"
#include "fpalg/zerodiv.hpp"

namespace fpalg {

struct CyclicGroup : std::runtime_error {
    CyclicGroup() : std::runtime_error("automorphism group turned out cyclic") {}
};

struct CharDividesGroup : std::runtime_error {
    CharDividesGroup() : std::runtime_error("characteristic divides the group order") {}
};

struct CyclicUnitGroup : std::runtime_error {
    CyclicUnitGroup() : std::runtime_error("unit group mod r is cyclic") {}
};

struct ResolventExhausted : std::runtime_error {
    ResolventExhausted() : std::runtime_error("no basis element escapes the fixed algebra") {}
};

// A[zeta_r]: the base algebra with an r-th root of unity adjoined, together
// with the cyclic automorphism group Delta_r and the r-Sylow bookkeeping of
// the unit group. For r = 2 the extension is A itself and zeta = -1.
struct CyclotomicExtension {
    Algebra A;               // base
    u64 r = 0;
    Algebra E;               // A[zeta_r]
    Mat emb;                 // rows: images of the A basis inside E
    Vec zeta;                // in E
    std::vector<Mat> delta;  // rho_a for a = 1..r-1 (delta[a-1]); delta[0] = id
    u64 t = 0;               // |E*_r| = r^t
    BigUint ell;             // |E*| / r^t
};

inline Vec embed_up(const CyclotomicExtension& X, const Vec& a) {
    Vec r(X.E.n, 0);
    for (size_t i = 0; i < X.emb.rows; ++i)
        for (size_t j = 0; j < X.E.n; ++j)
            r[j] = X.E.F.add(r[j], X.E.F.mul(a[i], X.emb.at(i, j)));
    return r;
}

inline std::optional<Vec> embed_down(const CyclotomicExtension& X, const Vec& e) {
    return X.emb.transpose().solve(e);
}

inline CyclotomicExtension adjoin_zeta(const Algebra& A, u64 r) {
    if (A.F.p % r == 0) throw std::invalid_argument("r must differ from the characteristic");
    CyclotomicExtension X;
    X.A = A;
    X.r = r;
    if (r == 2) {
        X.E = A;
        X.emb = Mat::identity(A.F, A.n);
        X.zeta = A.smul(A.F.p - 1, A.one);
        X.delta = {Mat::identity(A.F, A.n)};
    } else {
        size_t w = r - 1, n = A.n * w;
        // zeta powers in the basis 1, zeta, ..., zeta^(r-2)
        std::vector<Vec> zp(r, Vec(w, 0));
        for (size_t u = 0; u + 1 < r; ++u) zp[u][u] = 1;
        for (size_t u = 0; u < w; ++u) zp[r - 1][u] = A.F.p - 1;
        // basis (i, u) -> a_i zeta^u at index i*w + u
        std::vector<u64> tab(n * n * n, 0);
        for (size_t i = 0; i < A.n; ++i)
            for (size_t u = 0; u < w; ++u)
                for (size_t j = 0; j < A.n; ++j)
                    for (size_t v = 0; v < w; ++v) {
                        size_t row = i * w + u, col = j * w + v;
                        size_t zu = u + v;
                        const Vec& zz = zu < r ? zp[zu] : zp[zu - r]; // zeta^r = 1
                        for (size_t l = 0; l < A.n; ++l) {
                            u64 s = A.tab[(i * A.n + j) * A.n + l];
                            if (!s) continue;
                            for (size_t ww = 0; ww < w; ++ww)
                                if (zz[ww])
                                    tab[(row * n + col) * n + l * w + ww] = A.F.add(
                                        tab[(row * n + col) * n + l * w + ww], A.F.mul(s, zz[ww]));
                        }
                    }
        Vec one(n, 0);
        for (size_t i = 0; i < A.n; ++i) one[i * w] = A.one[i];
        X.E = make_algebra(A.F, n, std::move(tab), one);
        X.emb = Mat(A.F, A.n, n);
        for (size_t i = 0; i < A.n; ++i) X.emb.at(i, i * w) = 1;
        X.zeta = Vec(n, 0);
        if (A.one[0]) {
            // zeta = 1_A tensor zeta
            for (size_t i = 0; i < A.n; ++i) X.zeta[i * w + 1] = A.one[i];
        }
        // rho_a: a_i zeta^u -> a_i zeta^(au mod r)
        std::vector<Vec> zpowE(r);
        for (size_t u = 0; u < r; ++u) {
            zpowE[u] = Vec(n, 0);
            for (size_t i = 0; i < A.n; ++i)
                for (size_t ww = 0; ww < w; ++ww)
                    if (zp[u][ww])
                        zpowE[u][i * w + ww] =
                            A.F.add(zpowE[u][i * w + ww], A.F.mul(A.one[i], zp[u][ww]));
        }
        for (u64 a = 1; a < r; ++a) {
            Mat M(A.F, n, n);
            for (size_t i = 0; i < A.n; ++i)
                for (size_t u = 0; u < w; ++u) {
                    Vec img = X.E.mul(X.emb.row(i), zpowE[(a * u) % r]);
                    for (size_t q = 0; q < n; ++q) M.at(q, i * w + u) = img[q];
                }
            X.delta.push_back(M);
        }
    }
    // Sylow data from the component sizes of E
    auto degs = component_degrees(X.E);
    X.ell = BigUint(1);
    for (u64 d : degs) {
        u64 e = 0;
        BigUint q = strip_factor(BigUint::pow_u64(A.F.p, d).sub_u64(1), r, e);
        X.t += e;
        X.ell = X.ell.mul(q);
    }
    return X;
}

// x^(a^(r^(u-1))) for x of r-power order r^u: the omega(a) action
inline Vec omega_power_in(const Algebra& A, u64 r, u64 a, const Vec& x) {
    auto u = r_power_order_exp(A, x, r);
    if (!u) throw std::invalid_argument("omega_power input is not an r-element");
    if (*u == 0) return x;
    // r^u fits a word: every unit order divides some p^d - 1 < 2^61
    u64 mod = 1;
    for (u64 i = 0; i < *u; ++i) mod *= r;
    // a^(r^(u-1)) mod r^u by repeated r-th powers
    u64 acc = a % mod;
    for (u64 i = 0; i + 1 < *u; ++i) {
        u64 prod = 1;
        for (u64 j = 0; j < r; ++j) prod = mulmod(prod, acc, mod);
        acc = prod;
    }
    return A.pow(x, acc);
}

inline Vec omega_power(const CyclotomicExtension& X, u64 a, const Vec& x) {
    return omega_power_in(X.E, X.r, a, x);
}

// membership in the Teichmueller subgroup T_{A,r}
inline bool teichmuller_test(const CyclotomicExtension& X, const Vec& x) {
    for (u64 a = 1; a < X.r; ++a)
        if (apply_map(X.delta[a - 1], x) != omega_power(X, a, x)) return false;
    return true;
}

// Lemma on cyclic witnesses: either v = u^j inside the Teichmueller group or
// a zero divisor of the base algebra A, pulled down through the Delta_r
// invariance of the annihilator idempotent.
inline Dichotomy<BigUint> teich_cyclic_or_zerodiv(const CyclotomicExtension& X, const Vec& u,
                                                  const Vec& v) {
    DiscreteLog d = discrete_log_r_elements(X.E, u, v, X.r);
    if (d.is_log) return Dichotomy<BigUint>::found(d.s);
    Vec z = X.E.sub(X.E.pow_big(u, d.s), X.E.pow_big(v, d.sp));
    Mat I = X.E.lmat(z).kernel(); // annihilator ideal of z
    auto e = ideal_idempotent(X.E, I);
    if (!e || vec_is_zero(*e)) throw std::logic_error("annihilator of a zero divisor lost its identity");
    auto eA = embed_down(X, *e);
    if (!eA) throw std::logic_error("annihilator idempotent escaped the base algebra");
    Vec w = X.A.sub(X.A.one, *eA);
    if (vec_is_zero(w)) throw std::logic_error("annihilator idempotent is the identity");
    return Dichotomy<BigUint>::divisor(ZeroDivisor{*eA, w});
}

namespace detail {

inline u64 inv_mod_small(u64 a, u64 r) {
    a %= r;
    for (u64 i = 1; i < r; ++i)
        if (i * a % r == 1) return i;
    throw std::invalid_argument("not invertible modulo r");
}

// extend an automorphism of A blockwise to A[zeta_r], fixing zeta
inline Mat extend_to_cyclotomic(const CyclotomicExtension& X, const Mat& tau) {
    if (X.r == 2) return tau;
    size_t w = X.r - 1;
    Mat M(X.A.F, X.E.n, X.E.n);
    for (size_t i = 0; i < X.A.n; ++i)
        for (size_t u = 0; u < w; ++u)
            for (size_t i2 = 0; i2 < X.A.n; ++i2)
                M.at(i2 * w + u, i * w + u) = tau.at(i2, i);
    return M;
}

} // namespace detail

// Find x with x^tau = xi * x from the resolvents (y, xi^j) of basis elements,
// for tau of prime order r and xi an r-th root of unity. The smallest usable
// exponent j of the first basis element escaping the fixed algebra wins.
inline Vec lagrange_resolvent(const Algebra& A, const Mat& tau, u64 r, const Vec& xi) {
    std::vector<Vec> xipow{A.one};
    for (u64 j = 1; j < r; ++j) xipow.push_back(A.mul(xipow.back(), xi));
    for (size_t b = 0; b < A.n; ++b) {
        Vec y = A.basis(b);
        if (apply_map(tau, y) == y) continue;
        std::vector<Vec> orbit{y};
        for (u64 i = 1; i < r; ++i) orbit.push_back(apply_map(tau, orbit.back()));
        for (u64 j = 1; j < r; ++j) {
            Vec res(A.n, 0);
            for (u64 i = 0; i < r; ++i)
                res = A.add(res, A.mul(xipow[(i * j) % r], orbit[i]));
            if (vec_is_zero(res) || apply_map(tau, res) == res) continue;
            u64 l = detail::inv_mod_small(r - j % r, r);
            return A.pow(res, l);
        }
    }
    throw ResolventExhausted();
}

// Teichmueller representative for a semiregular tau of prime order r:
// x in T_{A,r} with x^tau = zeta * x, plus the tau-fixed r-th power c = x^r.
// Everything lives inside E = A[zeta_r]; tauE is tau extended to E.
struct TeichmullerData {
    Mat tauE;
    Vec x;      // unit of E
    Vec c;      // x^r, fixed by tauE
    Mat Dbasis; // tau-fixed subalgebra of E, i.e. A_tau[zeta]
    Mat phi;    // column (i * dim D + u): D_u * x^i, an iso onto E
};

inline TeichmullerData teichmuller_resolvent(const CyclotomicExtension& X, const Mat& tau) {
    const Algebra& E = X.E;
    u64 r = X.r;
    TeichmullerData out;
    out.tauE = detail::extend_to_cyclotomic(X, tau);

    // accumulate a unit y with y^tau = zeta * y over orthogonal tau-fixed parts
    Vec e = E.one, y(E.n, 0);
    for (size_t round = 0; round <= E.n; ++round) {
        if (vec_is_zero(e)) break;
        if (round == E.n) throw std::logic_error("resolvent accumulation failed to exhaust");
        SubAlg S = induced_algebra(E, ideal_of_element(E, e).basis, e);
        Mat tloc(E.F, S.alg.n, S.alg.n);
        for (size_t j = 0; j < S.alg.n; ++j) {
            auto img = down_coords(S, apply_map(out.tauE, up_coords(S, S.alg.basis(j))));
            if (!img) throw std::logic_error("tau does not preserve the accumulated part");
            for (size_t i = 0; i < S.alg.n; ++i) tloc.at(i, j) = (*img)[i];
        }
        auto xiloc = down_coords(S, E.mul(e, X.zeta));
        if (!xiloc) throw std::logic_error("zeta escaped the accumulated part");
        Vec x = up_coords(S, lagrange_resolvent(S.alg, tloc, r, *xiloc));
        Vec e1 = ideal_of_element(E, x).e;
        e = E.sub(e, e1);
        y = E.add(y, x);
    }
    if (!E.is_unit(y)) throw std::logic_error("accumulated resolvent is not a unit");

    // project into the Sylow r-subgroup, then symmetrize over Delta_r
    u64 m = detail::inv_mod_small(r - X.ell.mod(r) % r, r);
    Vec z = E.pow_big(y, X.ell.mul(m));
    Vec x = E.one;
    for (u64 b = 1; b < r; ++b) {
        u64 binv = detail::inv_mod_small(b, r);
        Vec f = omega_power(X, b, z);
        x = E.mul(x, binv == 1 ? f : apply_map(X.delta[binv - 1], f));
    }
    if (!teichmuller_test(X, x))
        throw std::logic_error("symmetrized element left the Teichmueller group");
    if (!(apply_map(out.tauE, x) == E.mul(X.zeta, x)))
        throw std::logic_error("twisted eigenvalue lost in symmetrization");
    out.x = x;
    out.c = E.pow(x, r);
    if (!(apply_map(out.tauE, out.c) == out.c))
        throw std::logic_error("r-th power of the representative is not tau-fixed");

    // the A_tau[zeta]-basis {d_u x^i} realizes A_tau[zeta][x] = E
    out.Dbasis = fixed_subalgebra(E, {out.tauE});
    if (out.Dbasis.rows * r != E.n)
        throw std::logic_error("fixed subalgebra has the wrong rank");
    out.phi = Mat(E.F, E.n, E.n);
    Vec pw = E.one;
    for (u64 i = 0; i < r; ++i) {
        for (size_t u = 0; u < out.Dbasis.rows; ++u) {
            Vec col = E.mul(out.Dbasis.row(u), pw);
            for (size_t q = 0; q < E.n; ++q) out.phi.at(q, i * out.Dbasis.rows + u) = col[q];
        }
        if (i + 1 < r) pw = E.mul(pw, x);
    }
    if (!out.phi.inverse()) throw std::logic_error("root powers fail to span over the fixed algebra");
    return out;
}

// ---------------------------------------------------------------------------
// Kummer extensions B[Y]/(Y^s - c)
// ---------------------------------------------------------------------------

struct KummerExtension {
    Algebra B;               // base
    u64 s = 0;
    Vec c;                   // unit of B
    Algebra K;               // B[Y]/(Y^s - c)
    Mat emb;                 // rows: images of the B basis inside K
    Vec root;                // class of Y
    std::vector<Mat> lifted_delta; // rho_a lifted from A[zeta_r], when built over an extension
    std::optional<Mat> sigma;      // root -> zeta * root, for s = r
};

inline KummerExtension kummer_root_extension(const Algebra& B, const Vec& c, u64 s) {
    if (!B.is_unit(c)) throw std::invalid_argument("radicand must be a unit");
    KummerExtension X;
    X.B = B;
    X.s = s;
    X.c = c;
    size_t n = B.n * s;
    std::vector<u64> tab(n * n * n, 0);
    for (size_t i = 0; i < B.n; ++i)
        for (size_t u = 0; u < s; ++u)
            for (size_t j = 0; j < B.n; ++j)
                for (size_t v = 0; v < s; ++v) {
                    Vec prod = B.mul(B.basis(i), B.basis(j));
                    size_t deg = u + v;
                    if (deg >= s) {
                        prod = B.mul(prod, c);
                        deg -= s;
                    }
                    size_t row = u * B.n + i, col = v * B.n + j;
                    for (size_t l = 0; l < B.n; ++l)
                        tab[(row * n + col) * n + deg * B.n + l] = prod[l];
                }
    Vec one(n, 0);
    std::copy(B.one.begin(), B.one.end(), one.begin());
    X.K = make_algebra(B.F, n, std::move(tab), one);
    X.emb = Mat(B.F, B.n, n);
    for (size_t i = 0; i < B.n; ++i) X.emb.at(i, i) = 1;
    X.root = Vec(n, 0);
    std::copy(B.one.begin(), B.one.end(), X.root.begin() + B.n);
    return X;
}

// Kummer extension of E = A[zeta_r] by an s-th root of a Teichmueller
// element, with the unique lifts of Delta_r (root -> root^omega(a)) and, for
// s = r, the twist sigma fixing E with root -> zeta * root.
inline KummerExtension kummer_root_extension(const CyclotomicExtension& ext, const Vec& c,
                                             u64 s) {
    if (!teichmuller_test(ext, c))
        throw std::invalid_argument("radicand is outside the Teichmueller group");
    KummerExtension X = kummer_root_extension(ext.E, c, s);
    const Algebra& K = X.K;
    const Algebra& B = ext.E;
    auto embK = [&](const Vec& b) {
        Vec r(K.n, 0);
        std::copy(b.begin(), b.end(), r.begin());
        return r;
    };
    for (u64 a = 1; a < ext.r; ++a) {
        Vec ra = omega_power_in(K, ext.r, a, X.root);
        Mat M(K.F, K.n, K.n);
        for (size_t u = 0; u < s; ++u) {
            Vec rp = K.pow(ra, u);
            for (size_t i = 0; i < B.n; ++i) {
                Vec img = K.mul(embK(apply_map(ext.delta[a - 1], B.basis(i))), rp);
                for (size_t q = 0; q < K.n; ++q) M.at(q, u * B.n + i) = img[q];
            }
        }
        if (!is_automorphism(K, M)) throw std::logic_error("lifted rho_a is not an automorphism");
        X.lifted_delta.push_back(M);
    }
    if (s == ext.r) {
        Mat S(K.F, K.n, K.n);
        for (size_t u = 0; u < s; ++u) {
            Vec zp = B.pow(ext.zeta, u);
            for (size_t i = 0; i < B.n; ++i) {
                Vec blk = B.mul(zp, B.basis(i));
                for (size_t q = 0; q < B.n; ++q) S.at(u * B.n + q, u * B.n + i) = blk[q];
            }
        }
        if (!is_automorphism(K, S)) throw std::logic_error("twist sigma is not an automorphism");
        if (!(apply_map(S, X.root) == K.mul(embK(ext.zeta), X.root)))
            throw std::logic_error("twist sigma misses the root");
        auto ord = map_order(K, S);
        if (!ord || *ord != ext.r) throw std::logic_error("twist sigma has the wrong order");
        X.sigma = S;
    }
    return X;
}

// ---------------------------------------------------------------------------
// Extending automorphisms of the fixed algebra
// ---------------------------------------------------------------------------

inline ZeroDivisor noncyclic_zero_divisor(const Algebra& A, const std::vector<Mat>& gamma);

namespace detail {

// restriction of an ambient linear map to a subalgebra, in local coordinates
inline std::optional<Mat> restrict_map(const SubAlg& S, const Mat& M) {
    Mat loc(S.alg.F, S.alg.n, S.alg.n);
    for (size_t j = 0; j < S.alg.n; ++j) {
        auto img = down_coords(S, apply_map(M, S.emb.row(j)));
        if (!img) return std::nullopt;
        for (size_t i = 0; i < S.alg.n; ++i) loc.at(i, j) = (*img)[i];
    }
    return loc;
}

// one prime layer of the extension: tau of prime order r on A, mu given by
// the ambient images of the rows of Bbasis (a basis of the tau-fixed algebra)
inline Dichotomy<Mat> extend_automorphism_prime(const Algebra& A, const Mat& tau, u64 r,
                                                const Mat& Bbasis,
                                                const std::vector<Vec>& muimg) {
    using R = Dichotomy<Mat>;
    auto sr = semiregular_or_zero_divisor(A, {tau});
    if (sr.is_divisor()) return R::divisor(*sr.zd);

    SubAlg B = induced_algebra(A, Bbasis, A.one);
    Mat muB(A.F, B.alg.n, B.alg.n);
    for (size_t j = 0; j < B.alg.n; ++j) {
        auto c = down_coords(B, muimg[j]);
        if (!c) throw std::invalid_argument("mu image escapes the fixed subalgebra");
        for (size_t i = 0; i < B.alg.n; ++i) muB.at(i, j) = (*c)[i];
    }
    if (!is_automorphism(B.alg, muB)) throw std::invalid_argument("mu is not an automorphism");
    auto srB = semiregular_or_zero_divisor(B.alg, {muB});
    if (srB.is_divisor())
        return R::divisor(must_zero_divisor(A, up_coords(B, srB.zd->z)));

    CyclotomicExtension X = adjoin_zeta(A, r);
    TeichmullerData td = teichmuller_resolvent(X, tau);
    const Algebra& E = X.E;
    size_t db = td.Dbasis.rows;
    SubAlg D = induced_algebra(E, td.Dbasis, E.one);

    // the cyclotomic structure of B: its extension B[zeta] is exactly D
    CyclotomicExtension XB;
    XB.A = B.alg;
    XB.r = r;
    XB.E = D.alg;
    XB.emb = Mat(A.F, B.alg.n, db);
    for (size_t j = 0; j < B.alg.n; ++j) {
        auto c = down_coords(D, embed_up(X, Bbasis.row(j)));
        if (!c) throw std::logic_error("fixed algebra escapes its own cyclotomic extension");
        for (size_t q = 0; q < db; ++q) XB.emb.at(j, q) = (*c)[q];
    }
    auto zD = down_coords(D, X.zeta);
    if (!zD) throw std::logic_error("zeta escapes the fixed part");
    XB.zeta = *zD;
    for (const Mat& M : X.delta) {
        auto loc = restrict_map(D, M);
        if (!loc) throw std::logic_error("Delta does not preserve the fixed part");
        XB.delta.push_back(*loc);
    }
    {
        auto degs = component_degrees(XB.E);
        XB.ell = BigUint(1);
        for (u64 d : degs) {
            u64 e = 0;
            BigUint q = strip_factor(BigUint::pow_u64(A.F.p, d).sub_u64(1), r, e);
            XB.t += e;
            XB.ell = XB.ell.mul(q);
        }
    }

    // mu on D = B[zeta], blockwise over the zeta powers
    size_t w = r == 2 ? 1 : r - 1;
    Mat muD(A.F, db, db);
    for (size_t j = 0; j < db; ++j) {
        Vec d = td.Dbasis.row(j);
        Vec img(E.n, 0);
        for (size_t u = 0; u < w; ++u) {
            Vec blk(A.n);
            for (size_t i = 0; i < A.n; ++i) blk[i] = d[i * w + u];
            auto c = down_coords(B, blk);
            if (!c) throw std::logic_error("block of a tau-fixed element escapes the fixed algebra");
            Vec mb(A.n, 0);
            for (size_t i = 0; i < B.alg.n; ++i)
                for (size_t q = 0; q < A.n; ++q)
                    mb[q] = A.F.add(mb[q], A.F.mul((*c)[i], muimg[i][q]));
            for (size_t i = 0; i < A.n; ++i) img[i * w + u] = mb[i];
        }
        auto c = down_coords(D, img);
        if (!c) throw std::logic_error("mu left the fixed part of the extension");
        for (size_t i = 0; i < db; ++i) muD.at(i, j) = (*c)[i];
    }
    if (!is_automorphism(D.alg, muD)) throw std::logic_error("extended mu broke on B[zeta]");

    auto cD = down_coords(D, td.c);
    if (!cD) throw std::logic_error("radicand escapes the fixed part");
    Vec cmuD = apply_map(muD, *cD);

    auto lift_div = [&](const ZeroDivisor& zd) {
        return R::divisor(must_zero_divisor(A, up_coords(B, zd.z)));
    };
    auto d1 = teich_cyclic_or_zerodiv(XB, *cD, cmuD);
    if (d1.is_divisor()) return lift_div(*d1.zd);
    BigUint j = *d1.val;
    std::optional<Dichotomy<BigUint>> d2;
    try {
        d2 = teich_cyclic_or_zerodiv(XB, *cD, XB.zeta);
    } catch (const OrderViolation&) {
        // ord(c) < r forces c = 1 since orders here are r-power; then x is a
        // proper r-th root of unity, the product of the x - zeta^i vanishes,
        // and the annihilator of a nonunit factor is Delta-invariant
        if (td.c != E.one) throw std::logic_error("small radicand order without c = 1");
        Vec zp = E.one;
        for (u64 i = 0; i < r; ++i) {
            Vec z = E.sub(td.x, zp);
            if (vec_is_zero(z)) throw std::logic_error("resolvent equals a root of unity");
            Mat I = E.lmat(z).kernel();
            if (I.rows > 0 && I.rows < E.n) {
                auto e = ideal_idempotent(E, I);
                if (!e || vec_is_zero(*e))
                    throw std::logic_error("annihilator of a zero divisor lost its identity");
                auto eA = embed_down(X, *e);
                if (!eA) throw std::logic_error("annihilator idempotent escaped the base algebra");
                Vec w = A.sub(A.one, *eA);
                if (vec_is_zero(w)) throw std::logic_error("annihilator idempotent is the identity");
                return R::divisor(ZeroDivisor{*eA, w});
            }
            zp = E.mul(zp, X.zeta);
        }
        throw std::logic_error("unit root of unity with no splitting difference");
    }
    if (d2->is_divisor()) return lift_div(*d2->zd);
    if (j.mod(r) != 1) throw std::logic_error("twisting exponent escaped 1 mod r");

    // the r roots x' = x^j zeta^i of c^mu parametrize the lifts of mu;
    // exactly the right one shrinks the fixed algebra to (A_tau)_mu
    Mat fixB = fixed_subalgebra(B.alg, {muB});
    std::vector<Vec> lift;
    for (size_t i = 0; i < fixB.rows; ++i) lift.push_back(up_coords(B, fixB.row(i)));
    Mat want = echelon(Mat::from_rows(A.F, lift));
    auto phinv = td.phi.inverse();
    if (!phinv) throw std::logic_error("phi is singular");
    Mat bd(E.F, E.n, E.n);
    for (u64 i = 0; i < r; ++i)
        for (size_t q = 0; q < db; ++q)
            for (size_t u = 0; u < db; ++u) bd.at(i * db + q, i * db + u) = muD.at(q, u);
    Vec xp = E.pow_big(td.x, j);
    std::optional<Mat> inexact;
    for (u64 twist = 0; twist < r; ++twist) {
        // mu' = phi' . mu'' . phi^{-1} on E, with phi' built from x'
        Mat phi2(E.F, E.n, E.n);
        Vec pw = E.one;
        for (u64 i = 0; i < r; ++i) {
            for (size_t u = 0; u < db; ++u) {
                Vec col = E.mul(td.Dbasis.row(u), pw);
                for (size_t q = 0; q < E.n; ++q) phi2.at(q, i * db + u) = col[q];
            }
            if (i + 1 < r) pw = E.mul(pw, xp);
        }
        Mat muE = phi2.mul(bd).mul(*phinv);

        // restrict to the Delta-fixed copy of A
        Mat mu(A.F, A.n, A.n);
        bool good = true;
        for (size_t i = 0; i < A.n && good; ++i) {
            auto c = embed_down(X, apply_map(muE, embed_up(X, A.basis(i))));
            if (!c) {
                good = false;
                break;
            }
            for (size_t q = 0; q < A.n; ++q) mu.at(q, i) = (*c)[q];
        }
        good = good && is_automorphism(A, mu);
        for (size_t jj = 0; good && jj < Bbasis.rows; ++jj)
            good = apply_map(mu, Bbasis.row(jj)) == muimg[jj];
        if (good) {
            if (fixed_subalgebra(A, {mu}) == want) return R::found(std::move(mu));
            if (!inexact) inexact = std::move(mu);
        }
        xp = E.mul(xp, X.zeta);
    }
    if (inexact) {
        // every valid lift fixes too much: mu' together with tau generates a
        // noncyclic group, which betrays a zero divisor. Were the group
        // cyclic, its generator's fixed algebra would land exactly on want.
        auto srg = semiregular_or_zero_divisor(A, {tau, *inexact});
        if (srg.is_divisor()) return R::divisor(*srg.zd);
        return R::divisor(noncyclic_zero_divisor(A, {tau, *inexact}));
    }
    throw std::logic_error("no root choice extends mu with the right fixed algebra");
}

} // namespace detail

// Lift an automorphism mu of the fixed algebra A_tau to all of A, prime by
// prime along the order of tau, keeping A_{mu'} = (A_tau)_mu; obstructions
// surface as zero divisors. mu acts in the coordinates of the echelon basis
// of fixed_subalgebra(A, {tau}).
inline Dichotomy<Mat> extend_automorphism(const Algebra& A, const Mat& tau, const Mat& mu) {
    using R = Dichotomy<Mat>;
    auto ordo = map_order(A, tau);
    if (!ordo) throw std::invalid_argument("tau order out of range");
    u64 ord = *ordo;
    if (ord % A.F.p == 0) throw std::invalid_argument("order of tau must be coprime to p");

    Mat Bb = fixed_subalgebra(A, {tau});
    if (mu.rows != Bb.rows || mu.cols != Bb.rows) throw std::invalid_argument("mu shape mismatch");
    std::vector<Vec> curimg;
    for (size_t j = 0; j < Bb.rows; ++j) {
        Vec img(A.n, 0);
        for (size_t i = 0; i < Bb.rows; ++i)
            for (size_t q = 0; q < A.n; ++q)
                img[q] = A.F.add(img[q], A.F.mul(mu.at(i, j), Bb.at(i, q)));
        curimg.push_back(img);
    }
    Mat curB = Bb;

    std::vector<u64> chain;
    for (u64 g = ord, q = 2; g > 1; ++q)
        while (g % q == 0) {
            chain.push_back(q);
            g /= q;
        }
    if (chain.empty()) {
        // tau is the identity: mu already acts on all of A
        if (!is_automorphism(A, mu)) throw std::invalid_argument("mu is not an automorphism");
        return R::found(mu);
    }

    u64 m = 1;
    for (u64 r : chain) {
        u64 mp = m;
        m *= r;
        Mat step = tau.pow(mp);
        Mat Cb = fixed_subalgebra(A, {tau.pow(m)});
        if (Cb.rows == curB.rows) continue; // step acts trivially on this layer
        if (m == ord) {
            auto d = detail::extend_automorphism_prime(A, step, r, curB, curimg);
            return d;
        }
        SubAlg C = induced_algebra(A, Cb, A.one);
        auto sloc = detail::restrict_map(C, step);
        if (!sloc) throw std::logic_error("tau power does not preserve its coarser fixed algebra");
        Mat Bloc(A.F, curB.rows, C.alg.n);
        std::vector<Vec> imgloc;
        for (size_t j = 0; j < curB.rows; ++j) {
            auto bc = down_coords(C, curB.row(j));
            auto ic = down_coords(C, curimg[j]);
            if (!bc || !ic) throw std::logic_error("layer does not contain the previous one");
            for (size_t q = 0; q < C.alg.n; ++q) Bloc.at(j, q) = (*bc)[q];
            imgloc.push_back(*ic);
        }
        auto d = detail::extend_automorphism_prime(C.alg, *sloc, r, Bloc, imgloc);
        if (d.is_divisor())
            return R::divisor(must_zero_divisor(A, up_coords(C, d.zd->z)));
        // promote the result to ambient data for the next layer
        curB = Cb;
        curimg.clear();
        for (size_t j = 0; j < Cb.rows; ++j)
            curimg.push_back(up_coords(C, apply_map(*d.val, *down_coords(C, Cb.row(j)))));
    }
    // tau semiregular layers exhausted without reaching A: tau itself was
    // trivial beyond the last layer
    throw std::logic_error("extension chain did not reach the full algebra");
}

// ---------------------------------------------------------------------------
// Zero divisors from noncyclic automorphism groups
// ---------------------------------------------------------------------------

// Commutative semisimple A with a noncyclic group of automorphisms always
// hides a zero divisor: either the group fails semiregularity, or some Sylow
// subgroup acts on a Teichmueller subgroup that refuses to stay cyclic.
// Throws CyclicGroup when the generated group turns out cyclic after all and
// CharDividesGroup when the group order is divisible by the characteristic.
inline ZeroDivisor noncyclic_zero_divisor(const Algebra& A, const std::vector<Mat>& gamma) {
    auto sr = semiregular_or_zero_divisor(A, gamma);
    if (sr.is_divisor()) return *sr.zd;
    const std::vector<Mat>& G = *sr.val;
    if (G.size() % A.F.p == 0) throw CharDividesGroup();

    std::vector<u64> primes;
    for (u64 g = G.size(), q = 2; g > 1; ++q)
        if (g % q == 0) {
            primes.push_back(q);
            while (g % q == 0) g /= q;
        }

    for (u64 r : primes) {
        CyclotomicExtension X = adjoin_zeta(A, r);
        // Teichmueller representatives for the order-r elements of G
        std::vector<Vec> reps;
        for (const Mat& s : G) {
            auto ord = map_order(A, s);
            if (!ord || *ord != r) continue;
            reps.push_back(teichmuller_resolvent(X, s).x);
        }
        // keep the generated subgroup cyclic, led by a maximal-order element
        Vec gen;
        bool have = false;
        std::optional<ZeroDivisor> zd;
        auto merge = [&](const Vec& v) {
            if (zd) return;
            if (!have) {
                gen = v;
                have = true;
                return;
            }
            u64 ug = *r_power_order_exp(X.E, gen, r);
            u64 uv = *r_power_order_exp(X.E, v, r);
            const Vec& hi = uv > ug ? v : gen;
            const Vec& lo = uv > ug ? gen : v;
            auto d = teich_cyclic_or_zerodiv(X, hi, lo);
            if (d.is_divisor()) {
                zd = *d.zd;
                return;
            }
            if (uv > ug) gen = v;
        };
        for (const Vec& x : reps) {
            merge(x);
            if (zd) return *zd;
        }
        if (!have) continue;
        // G-invariance of the cyclic Teichmueller subgroup
        for (const Mat& s : G) {
            merge(apply_map(detail::extend_to_cyclotomic(X, s), gen));
            if (zd) return *zd;
        }
        if (r != 2) continue;

        // noncyclic 2-Sylow: locate the inversion and the negation of the
        // generator inside G, then pit the generator against a twisted
        // representative living in the inversion-fixed subalgebra
        Vec xinv = *A.inv(gen);
        Vec xneg = A.smul(A.F.p - 1, gen);
        std::optional<Mat> s1, s2;
        for (const Mat& s : G) {
            Vec img = apply_map(s, gen);
            if (img == gen) continue;
            if (!s1 && img == xinv) s1 = s;
            if (!s2 && img == xneg) s2 = s;
        }
        if (!s1 || !s2) continue;
        SubAlg B1 = induced_algebra(A, fixed_subalgebra(A, {*s1}), A.one);
        Mat s2loc(A.F, B1.alg.n, B1.alg.n);
        for (size_t j = 0; j < B1.alg.n; ++j) {
            auto img = down_coords(B1, apply_map(*s2, up_coords(B1, B1.alg.basis(j))));
            if (!img) throw std::logic_error("commuting involution left the fixed subalgebra");
            for (size_t i = 0; i < B1.alg.n; ++i) s2loc.at(i, j) = (*img)[i];
        }
        if (s2loc == Mat::identity(A.F, B1.alg.n)) continue;
        CyclotomicExtension X1 = adjoin_zeta(B1.alg, 2);
        Vec y = up_coords(B1, teichmuller_resolvent(X1, s2loc).x);
        u64 ug = *r_power_order_exp(A, gen, 2);
        u64 uy = *r_power_order_exp(A, y, 2);
        const Vec& hi = uy > ug ? y : gen;
        const Vec& lo = uy > ug ? gen : y;
        auto d = teich_cyclic_or_zerodiv(X, hi, lo);
        if (d.is_divisor()) return *d.zd;
        throw std::logic_error("negated representative stayed in the cyclic subgroup");
    }
    throw CyclicGroup();
}

// ---------------------------------------------------------------------------
// Descending a transitive group action to an ideal of a subalgebra
// ---------------------------------------------------------------------------

namespace detail {

// deterministic generator pick for a cyclic listed group, nullopt otherwise
inline std::optional<Mat> cyclic_generator(const Algebra& A, const std::vector<Mat>& G) {
    for (const Mat& s : G) {
        auto o = map_order(A, s);
        if (o && *o == G.size()) return s;
    }
    return std::nullopt;
}

// Recursion core. B is carried as aligned rows in the current ambient
// algebra; automorphisms and zero divisors are reported in B-row coordinates
// so they survive the re-embeddings unchanged.
inline Dichotomy<Mat> galois_descend_rec(const Algebra& A, const std::vector<Mat>& G,
                                         const Mat& Bb, const Vec& eB) {
    using R = Dichotomy<Mat>;
    size_t nb = Bb.rows;
    SubAlg B = induced_algebra(A, Bb, eB);
    auto nonunit_div = [&](const Vec& bloc) {
        return R::divisor(must_zero_divisor(B.alg, bloc));
    };
    if (nb == 1) return R::found(Mat::identity(A.F, 1));

    std::optional<IdealRepr> I;
    auto gen = cyclic_generator(A, G);
    if (!gen) {
        ZeroDivisor zd = noncyclic_zero_divisor(A, G);
        I = ideal_of_element(A, zd.z);
    } else if (!(eB == A.one)) {
        I = ideal_of_element(A, eB);
    } else if (nb == A.n) {
        // B = A and G cyclic: the generator itself, in B coordinates
        auto loc = restrict_map(B, *gen);
        if (!loc) throw std::logic_error("generator does not act on A");
        return R::found(*loc);
    } else if (A.n % nb != 0) {
        // A cannot be a free B-module; non-freeness must surface a divisor
        auto zd = nonfree_zero_divisor(A, echelon(Bb));
        if (!zd) throw std::logic_error("non-integral rank yet free");
        I = ideal_of_element(A, zd->z);
    } else {
        auto d = galois_subgroup_or_zero_divisor(A, G, echelon(Bb));
        if (d.is_divisor()) {
            I = ideal_of_element(A, d.zd->z);
        } else {
            auto loc = restrict_map(B, *gen);
            if (!loc) throw std::logic_error("generator does not preserve its fixed subalgebra");
            if (!is_automorphism(B.alg, *loc))
                throw std::logic_error("restricted generator is not an automorphism");
            auto o = map_order(B.alg, *loc);
            if (!o || *o != nb) throw std::logic_error("restricted generator has the wrong order");
            auto sr = semiregular_or_zero_divisor(B.alg, {*loc});
            if (sr.is_divisor()) return R::divisor(*sr.zd);
            return R::found(*loc);
        }
    }

    // orbit decomposition of a nontrivial ideal, then project B into a part
    if (I->basis.rows == 0 || I->basis.rows == A.n)
        throw std::logic_error("ideal from the zero divisor is trivial");
    std::vector<IdealRepr> parts{*I, complement_ideal(A, I->e)};
    parts = refine_invariant_decomposition(A, G, parts);

    std::optional<size_t> target;
    for (size_t pi = 0; pi < parts.size(); ++pi) {
        Mat M(A.F, A.n, nb);
        bool zero = true;
        for (size_t i = 0; i < nb; ++i) {
            Vec col = A.mul(parts[pi].e, Bb.row(i));
            zero = zero && vec_is_zero(col);
            for (size_t q = 0; q < A.n; ++q) M.at(q, i) = col[q];
        }
        if (zero) continue;
        Mat K = M.kernel();
        if (K.rows == 0) {
            if (!target) target = pi;
            continue;
        }
        // neither zero nor injective: the kernel vector is a nonzero
        // non-unit of B
        return nonunit_div(K.row(0));
    }
    if (!target) throw std::logic_error("all projections of B vanished");
    const IdealRepr& J = parts[*target];

    // stabilizer of J, restricted to J
    SubAlg Jsub = induced_algebra(A, J.basis, J.e);
    std::vector<Mat> G1;
    for (const Mat& s : G) {
        Mat img(A.F, J.basis.rows, A.n);
        for (size_t i = 0; i < J.basis.rows; ++i) {
            Vec r = apply_map(s, J.basis.row(i));
            for (size_t q = 0; q < A.n; ++q) img.at(i, q) = r[q];
        }
        if (!(echelon(img) == J.basis)) continue;
        auto loc = restrict_map(Jsub, s);
        if (!loc) throw std::logic_error("stabilizer element does not restrict");
        G1.push_back(*loc);
    }
    Mat Bb2(A.F, nb, Jsub.alg.n);
    for (size_t i = 0; i < nb; ++i) {
        auto c = down_coords(Jsub, A.mul(J.e, Bb.row(i)));
        if (!c) throw std::logic_error("projection left the ideal");
        for (size_t q = 0; q < Jsub.alg.n; ++q) Bb2.at(i, q) = (*c)[q];
    }
    auto e2 = down_coords(Jsub, A.mul(J.e, eB));
    if (!e2) throw std::logic_error("projected unit left the ideal");
    return galois_descend_rec(Jsub.alg, G1, Bb2, *e2);
}

} // namespace detail

// For a semiregular listed group G with A_G = k and B a nonzero ideal of a
// subalgebra of A (given by a basis and its own unit), produce a semiregular
// automorphism of B of order dim B, expressed in the coordinates of the given
// basis rows, or a zero divisor of B in the same coordinates.
inline Dichotomy<Mat> galois_descend(const Algebra& A, const std::vector<Mat>& G, const Mat& Bb,
                                     const Vec& eB) {
    return detail::galois_descend_rec(A, G, Bb, eB);
}

// ---------------------------------------------------------------------------
// Cyclotomic factoring
// ---------------------------------------------------------------------------

namespace detail {

// Z_r^* is cyclic exactly for 1, 2, 4, q^k and 2 q^k with q an odd prime
inline bool units_mod_r_cyclic(u64 r) {
    if (r <= 4) return true;
    if (r % 2 == 0) r /= 2;
    if (r % 2 == 0) return false; // divisible by 4
    for (u64 q = 3; q * q <= r; q += 2)
        if (r % q == 0) {
            while (r % q == 0) r /= q;
            return r == 1;
        }
    return true; // odd prime
}

} // namespace detail

// A nontrivial monic factor of the r-th cyclotomic polynomial over F_p,
// required to exist by the noncyclic structure of Z_r^*.
inline Poly factor_cyclotomic(u64 r, PrimeField F) {
    if (detail::units_mod_r_cyclic(r)) throw CyclicUnitGroup();
    Poly phi = cyclotomic(r, F);
    if (F.p % r == 0 || (size_t)phi.deg() % F.p == 0) {
        auto fs = berlekamp_deterministic(phi);
        if (fs.size() < 2 && fs[0].deg() == phi.deg()) throw std::logic_error("cyclotomic refused to split");
        return fs[0];
    }
    Algebra A = from_polynomial(phi);
    // x^r = 1 in A, so x -> x^i permutes the basis powers
    std::vector<Poly> xpow{Poly(F, {1})};
    Poly x(F, {0, 1});
    for (u64 m = 1; m < r; ++m) xpow.push_back(mod(mul(xpow.back(), x), phi));
    std::vector<Mat> gamma;
    size_t n = A.n;
    for (u64 i = 2; i < r; ++i) {
        if (std::gcd(i, r) != 1) continue;
        Mat M(F, n, n);
        for (size_t j = 0; j < n; ++j) {
            const Poly& img = xpow[i * j % r];
            for (int q = 0; q <= img.deg(); ++q) M.at(q, j) = img.coeff(q);
        }
        gamma.push_back(M);
    }
    ZeroDivisor zd = noncyclic_zero_divisor(A, gamma);
    Poly a(F, zd.z);
    Poly g = monic(poly_gcd(a, phi));
    if (g.deg() <= 0 || g.deg() >= phi.deg()) throw std::logic_error("zero divisor gave a trivial gcd");
    return g;
}

} // namespace fpalg

#endif
