#ifndef FPALG_TENSORAUT_HPP
#define FPALG_TENSORAUT_HPP

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fpalg/algebra.hpp"
#include "fpalg/kummer.hpp"
#include "fpalg/poly.hpp"
#include "fpalg/semireg.hpp"
#include "fpalg/zerodiv.hpp"

namespace fpalg {

struct RecursionBudgetExceeded : std::runtime_error {
    RecursionBudgetExceeded() : std::runtime_error("recursion budget exceeded") {}
    explicit RecursionBudgetExceeded(const std::string& m) : std::runtime_error(m) {}
};

namespace detail {

inline Vec mat_col(const Mat& M, size_t j) {
    Vec v(M.rows);
    for (size_t i = 0; i < M.rows; ++i) v[i] = M.at(i, j);
    return v;
}

// R with M * R = N, column by column
inline std::optional<Mat> solve_cols(const Mat& M, const Mat& N) {
    Mat R(M.F, M.cols, N.cols);
    for (size_t j = 0; j < N.cols; ++j) {
        auto s = M.solve(mat_col(N, j));
        if (!s) return std::nullopt;
        for (size_t i = 0; i < M.cols; ++i) R.at(i, j) = (*s)[i];
    }
    return R;
}

// rewrite a local linear map from one row basis of a subspace to another
inline Mat change_basis(PrimeField F, const Mat& rowsFrom, const Mat& rowsTo, const Mat& Mlocal) {
    Mat ft = rowsFrom.transpose();
    Mat S(F, rowsFrom.rows, rowsTo.rows);
    for (size_t j = 0; j < rowsTo.rows; ++j) {
        auto c = ft.solve(rowsTo.row(j));
        if (!c) throw std::logic_error("basis change across different subspaces");
        for (size_t i = 0; i < rowsFrom.rows; ++i) S.at(i, j) = (*c)[i];
    }
    auto Si = S.inverse();
    if (!Si) throw std::logic_error("degenerate basis change");
    return Si->mul(Mlocal).mul(S);
}

// {x in A : s * x = 0 for every row s of S}
inline Mat annihilator_of(const Algebra& A, const Mat& S) {
    if (S.rows == 0) return Mat::identity(A.F, A.n);
    Mat sys(A.F, S.rows * A.n, A.n);
    for (size_t i = 0; i < S.rows; ++i) {
        Mat L = A.lmat(S.row(i));
        for (size_t r = 0; r < A.n; ++r)
            for (size_t c = 0; c < A.n; ++c) sys.at(i * A.n + r, c) = L.at(r, c);
    }
    return sys.kernel();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Essential part of tensor powers over a base subalgebra
// ---------------------------------------------------------------------------

// r-fold tensor power of A over B together with its essential part: the
// annihilator of all the "diagonal" ideals Delta_{i,j} = Ann(mu_i - mu_j).
// The full power has k-basis indexed (tuple, u) -> beta_u * (g_{t_1} (x) ...
// (x) g_{t_r}), tuples in base m with the first slot most significant.
struct EssentialTensorPower {
    Algebra full;
    SubAlg ess;          // essential ideal, re-rooted at its own identity
    std::vector<Mat> mu; // slot embeddings A -> essential part (local coords)
    Mat Bemb;            // rows: B basis inside the essential part
    u64 r = 0;
    size_t m = 0;  // free rank of A over B
    size_t db = 0; // dim B
};

inline EssentialTensorPower essential_tensor_power(const Algebra& A, const Mat& Bbasis,
                                                   const std::vector<Vec>& freeBasis, u64 r) {
    size_t m = freeBasis.size(), db = Bbasis.rows;
    if (m == 0 || r == 0) throw std::invalid_argument("empty tensor power");
    PrimeField F = A.F;
    SubAlg Bs = induced_algebra(A, Bbasis, A.one);
    const Algebra& B = Bs.alg;
    Mat bt = Bbasis.transpose();
    auto bloc = [&](const Vec& ambient) {
        auto c = bt.solve(ambient);
        if (!c) throw std::logic_error("coefficient escaped the base subalgebra");
        return *c;
    };
    // B-local coefficients of the pairwise products of the free basis
    std::vector<std::vector<Vec>> pc(m * m);
    for (size_t s = 0; s < m; ++s)
        for (size_t a = 0; a < m; ++a) {
            auto c = free_coords(A, Bbasis, freeBasis, A.mul(freeBasis[s], freeBasis[a]));
            if (!c) throw std::logic_error("free basis does not span the algebra");
            for (const Vec& v : *c) pc[s * m + a].push_back(bloc(v));
        }
    std::vector<Vec> onec;
    {
        auto c = free_coords(A, Bbasis, freeBasis, A.one);
        if (!c) throw std::logic_error("identity not representable over the free basis");
        for (const Vec& v : *c) onec.push_back(bloc(v));
    }
    size_t tuples = 1;
    for (u64 i = 0; i < r; ++i) tuples *= m;
    size_t N = tuples * db;
    auto digits = [&](size_t idx) {
        std::vector<size_t> d(r);
        for (size_t s = r; s-- > 0;) {
            d[s] = idx % m;
            idx /= m;
        }
        return d;
    };
    std::vector<Vec> bprod(db * db);
    for (size_t u = 0; u < db; ++u)
        for (size_t w = 0; w < db; ++w) bprod[u * db + w] = B.mul(B.basis(u), B.basis(w));
    std::vector<u64> tab(N * N * N, 0);
    for (size_t I = 0; I < tuples; ++I) {
        auto di = digits(I);
        for (size_t J = 0; J < tuples; ++J) {
            auto dj = digits(J);
            // coefficients over output tuples: slotwise products collected in B
            std::vector<Vec> acc{B.one};
            for (size_t s = 0; s < r; ++s) {
                std::vector<Vec> nxt(acc.size() * m);
                const auto& slot = pc[di[s] * m + dj[s]];
                for (size_t t = 0; t < acc.size(); ++t)
                    for (size_t c = 0; c < m; ++c) nxt[t * m + c] = B.mul(acc[t], slot[c]);
                acc = std::move(nxt);
            }
            for (size_t C = 0; C < tuples; ++C) {
                if (vec_is_zero(acc[C])) continue;
                for (size_t u = 0; u < db; ++u)
                    for (size_t w = 0; w < db; ++w) {
                        Vec coef = B.mul(acc[C], bprod[u * db + w]);
                        size_t row = I * db + u, col = J * db + w;
                        for (size_t e = 0; e < db; ++e)
                            if (coef[e]) tab[(row * N + col) * N + C * db + e] = coef[e];
                    }
            }
        }
    }
    // identity and the slot embeddings, expanded over the output tuples
    std::vector<Vec> onetup(tuples);
    for (size_t C = 0; C < tuples; ++C) {
        auto dc = digits(C);
        Vec v = B.one;
        for (size_t s = 0; s < r; ++s) v = B.mul(v, onec[dc[s]]);
        onetup[C] = v;
    }
    Vec one(N, 0);
    for (size_t C = 0; C < tuples; ++C)
        for (size_t e = 0; e < db; ++e) one[C * db + e] = onetup[C][e];

    EssentialTensorPower T;
    T.r = r;
    T.m = m;
    T.db = db;
    T.full = make_algebra(F, N, std::move(tab), one, /*validate=*/false);

    std::vector<Mat> mufull((size_t)r, Mat(F, N, A.n));
    for (size_t j = 0; j < A.n; ++j) {
        auto gc = free_coords(A, Bbasis, freeBasis, A.basis(j));
        if (!gc) throw std::logic_error("free basis does not span the algebra");
        std::vector<Vec> gl(m);
        for (size_t s = 0; s < m; ++s) gl[s] = bloc((*gc)[s]);
        for (size_t C = 0; C < tuples; ++C) {
            auto dc = digits(C);
            for (size_t i = 0; i < (size_t)r; ++i) {
                Vec v = B.one;
                for (size_t s = 0; s < (size_t)r; ++s)
                    v = B.mul(v, s == i ? gl[dc[s]] : onec[dc[s]]);
                for (size_t e = 0; e < db; ++e)
                    mufull[i].at(C * db + e, j) = F.add(mufull[i].at(C * db + e, j), v[e]);
            }
        }
    }
    Mat bembfull(F, db, N);
    for (size_t u = 0; u < db; ++u)
        for (size_t C = 0; C < tuples; ++C) {
            Vec v = B.mul(onetup[C], B.basis(u));
            for (size_t e = 0; e < db; ++e) bembfull.at(u, C * db + e) = v[e];
        }

    // the essential ideal: annihilator of the sum of the diagonal ideals
    Mat dsum(F, 0, N);
    for (size_t i = 0; i + 1 < (size_t)r; ++i)
        for (size_t j = i + 1; j < (size_t)r; ++j) {
            Mat sys(F, A.n * N, N);
            for (size_t q = 0; q < A.n; ++q) {
                Vec d = T.full.sub(detail::mat_col(mufull[i], q), detail::mat_col(mufull[j], q));
                Mat L = T.full.lmat(d);
                for (size_t rr = 0; rr < N; ++rr)
                    for (size_t cc = 0; cc < N; ++cc) sys.at(q * N + rr, cc) = L.at(rr, cc);
            }
            dsum = subspace_sum(dsum, sys.kernel());
        }
    Mat Tt = detail::annihilator_of(T.full, dsum);
    auto e = ideal_idempotent(T.full, Tt);
    if (!e || vec_is_zero(*e)) throw std::logic_error("essential ideal lost its identity");
    T.ess = induced_algebra(T.full, Tt, *e);
    size_t rank = db;
    for (u64 i = 0; i < r; ++i) rank *= m - (size_t)i;
    if (T.ess.alg.n != rank) throw std::logic_error("essential part has unexpected dimension");

    for (size_t i = 0; i < (size_t)r; ++i) {
        Mat loc(F, T.ess.alg.n, A.n);
        for (size_t j = 0; j < A.n; ++j) {
            auto c = down_coords(T.ess, T.full.mul(*e, detail::mat_col(mufull[i], j)));
            if (!c) throw std::logic_error("projected embedding left the essential part");
            for (size_t q = 0; q < T.ess.alg.n; ++q) loc.at(q, j) = (*c)[q];
        }
        T.mu.push_back(std::move(loc));
    }
    T.Bemb = Mat(F, db, T.ess.alg.n);
    for (size_t u = 0; u < db; ++u) {
        auto c = down_coords(T.ess, T.full.mul(*e, bembfull.row(u)));
        if (!c) throw std::logic_error("projected base left the essential part");
        for (size_t q = 0; q < T.ess.alg.n; ++q) T.Bemb.at(u, q) = (*c)[q];
    }
    return T;
}

// slot permutation acting on the essential part, in local coordinates
inline Mat symmetric_action(const EssentialTensorPower& T, const std::vector<size_t>& perm) {
    if (perm.size() != (size_t)T.r) throw std::invalid_argument("permutation length mismatch");
    PrimeField F = T.full.F;
    size_t N = T.full.n, db = T.db, m = T.m, r = (size_t)T.r;
    Mat P(F, N, N);
    for (size_t C = 0; C < N / db; ++C) {
        std::vector<size_t> d(r);
        size_t idx = C;
        for (size_t s = r; s-- > 0;) {
            d[s] = idx % m;
            idx /= m;
        }
        size_t out = 0;
        for (size_t s = 0; s < r; ++s) out = out * m + d[perm[s]];
        for (size_t e = 0; e < db; ++e) P.at(out * db + e, C * db + e) = 1;
    }
    auto loc = detail::restrict_map(T.ess, P);
    if (!loc) throw std::logic_error("slot action does not preserve the essential part");
    return *loc;
}

inline Mat cyclic_slot_action(const EssentialTensorPower& T) {
    std::vector<size_t> perm((size_t)T.r);
    for (size_t s = 0; s < perm.size(); ++s) perm[s] = (s + 1) % perm.size();
    return symmetric_action(T, perm);
}

// ---------------------------------------------------------------------------
// Adjoining a radical of an element of the ambient algebra
// ---------------------------------------------------------------------------

// Outcome of embedding A[zeta][r-th root of y^r] into D[zeta] by sending the
// root to y. Either the embedding is injective (and its Delta-fixed part is a
// free A-module of rank r inside D), or the kernel surfaces a zero divisor of
// D itself.
struct KummerEmbedding {
    KummerExtension ext; // abstract root extension over A[zeta]
    Mat phi;             // homomorphism into D[zeta], columns over ext.K
    Mat fixed_rows;      // Delta-fixed image, rows in D coordinates
};

inline Dichotomy<KummerEmbedding> kummer_embed_or_zerodiv(const CyclotomicExtension& X,
                                                          const Mat& Aspan, const Vec& y) {
    using R = Dichotomy<KummerEmbedding>;
    const Algebra& E = X.E;
    PrimeField F = E.F;
    u64 r = X.r;
    size_t w = r == 2 ? 1 : (size_t)r - 1;
    size_t na = Aspan.rows;

    // A[zeta] inside E, rows ordered like the blocks of the zeta adjunction
    std::vector<Vec> azr;
    {
        std::vector<Vec> zp{E.one};
        for (size_t v = 1; v < w; ++v) zp.push_back(E.mul(zp.back(), X.zeta));
        for (size_t j = 0; j < na; ++j)
            for (size_t v = 0; v < w; ++v)
                azr.push_back(E.mul(embed_up(X, Aspan.row(j)), zp[v]));
    }
    SubAlg AZ = induced_algebra(E, Mat::from_rows(F, azr), E.one);

    CyclotomicExtension XA;
    XA.A = induced_algebra(X.A, Aspan, X.A.one).alg;
    XA.r = r;
    XA.E = AZ.alg;
    XA.emb = Mat(F, na, na * w);
    for (size_t j = 0; j < na; ++j) XA.emb.at(j, j * w) = 1;
    {
        auto zl = down_coords(AZ, X.zeta);
        if (!zl) throw std::logic_error("zeta escaped the subextension");
        XA.zeta = *zl;
    }
    for (const Mat& M : X.delta) {
        auto loc = detail::restrict_map(AZ, M);
        if (!loc) throw std::logic_error("Delta does not preserve the subextension");
        XA.delta.push_back(*loc);
    }
    {
        auto degs = component_degrees(XA.E);
        XA.t = 0;
        XA.ell = BigUint(1);
        for (u64 d : degs) {
            u64 e = 0;
            BigUint q = strip_factor(BigUint::pow_u64(F.p, d).sub_u64(1), r, e);
            XA.t += e;
            XA.ell = XA.ell.mul(q);
        }
    }
    auto cl = down_coords(AZ, E.pow(y, r));
    if (!cl) throw std::invalid_argument("r-th power of the root escapes the subextension");
    KummerExtension K = kummer_root_extension(XA, *cl, r);

    // the evaluation map: basis (u, i) -> y^u * (image of the i-th basis)
    Mat phi(F, E.n, K.K.n);
    {
        Vec pw = E.one;
        for (u64 u = 0; u < r; ++u) {
            for (size_t i = 0; i < AZ.alg.n; ++i) {
                Vec col = E.mul(pw, AZ.emb.row(i));
                for (size_t q = 0; q < E.n; ++q) phi.at(q, (size_t)u * AZ.alg.n + i) = col[q];
            }
            if (u + 1 < r) pw = E.mul(pw, y);
        }
    }
    Mat Cfix = fixed_subalgebra(K.K, K.lifted_delta);
    if (phi.kernel().rows == 0) {
        if (!is_homomorphism(K.K, E, phi)) throw std::logic_error("evaluation map is not a homomorphism");
        std::vector<Vec> fr;
        for (size_t j = 0; j < Cfix.rows; ++j) {
            auto d = embed_down(X, phi.apply(Cfix.row(j)));
            if (!d) throw std::logic_error("Delta-fixed image escaped the base");
            fr.push_back(*d);
        }
        return R::found(KummerEmbedding{std::move(K), std::move(phi), Mat::from_rows(F, fr)});
    }

    // noninjective: the kernel meets the Delta-fixed part and its complement
    // is moved by the twist, which cuts out an idempotent pair
    SubAlg Cs = induced_algebra(K.K, Cfix, K.K.one);
    Mat phiC(F, E.n, Cs.alg.n);
    for (size_t j = 0; j < Cs.alg.n; ++j) {
        Vec col = phi.apply(Cfix.row(j));
        for (size_t q = 0; q < E.n; ++q) phiC.at(q, j) = col[q];
    }
    Mat I = phiC.kernel();
    if (I.rows == 0) throw std::logic_error("kernel avoids the fixed part");
    Mat J = detail::annihilator_of(Cs.alg, I);
    auto eJ = ideal_idempotent(Cs.alg, J);
    if (!eJ || vec_is_zero(*eJ)) throw std::logic_error("complement ideal lost its identity");
    if (!K.sigma) throw std::logic_error("twist missing from the root extension");
    auto sC = detail::restrict_map(Cs, *K.sigma);
    if (!sC) throw std::logic_error("twist does not preserve the fixed part");
    Mat Jech = echelon(J);
    Mat spow = *sC;
    for (u64 i = 1; i < r; ++i) {
        std::vector<Vec> jr;
        for (size_t q = 0; q < J.rows; ++q) jr.push_back(apply_map(spow, J.row(q)));
        Mat Ji = echelon(Mat::from_rows(F, jr));
        if (subspace_intersection(Jech, Ji).rows > 0) {
            if (Ji == Jech) throw std::logic_error("twist power fixes the complement ideal");
            Vec z = Cs.alg.mul(*eJ, apply_map(spow, *eJ));
            Vec wv = Cs.alg.sub(*eJ, z);
            auto zd = embed_down(X, phiC.apply(z));
            auto wd = embed_down(X, phiC.apply(wv));
            if (!zd || !wd) throw std::logic_error("divisor pair escaped the base");
            ZeroDivisor out{*zd, *wd};
            if (!check_zero_divisor(X.A, out)) throw std::logic_error("idempotent pair failed to annihilate");
            return R::divisor(out);
        }
        spow = spow.mul(*sC);
    }
    throw std::logic_error("twist orbit of the complement ideal never overlaps");
}

// ---------------------------------------------------------------------------
// Bringing an automorphism of an overalgebra down into the embedded algebra
// ---------------------------------------------------------------------------

struct SubalgebraAutomorphism {
    Mat Cbasis; // rows in the coordinates of the original algebra
    Mat tau;    // automorphism of induced_algebra(A, Cbasis, A.one)
};

// D carries a semiregular automorphism tau of prime order r and an embedded
// copy of A given by the columns of P. Produces either a zero divisor of A or
// a subalgebra C of A with a semiregular order-r automorphism fixing the
// tau-fixed part of A.
inline Dichotomy<SubalgebraAutomorphism> bring_down_automorphism(const Algebra& A, Algebra Dcur,
                                                                 Mat taucur, u64 r, Mat P) {
    using R = Dichotomy<SubalgebraAutomorphism>;
    PrimeField F = A.F;
    for (size_t round = 0;; ++round) {
        if (round > Dcur.n + A.n + 16) throw std::logic_error("descent failed to converge");
        {
            Mat K = P.kernel();
            if (K.rows) return R::divisor(must_zero_divisor(A, K.row(0)));
        }
        Mat Aspan = echelon(P.transpose());
        std::optional<Vec> zdiv;
        if (auto nf = detail::nonfree_zero_divisor(Dcur, Aspan)) zdiv = nf->z;
        if (!zdiv) {
            auto sr = semiregular_or_zero_divisor(Dcur, {taucur});
            if (sr.is_divisor()) zdiv = sr.zd->z;
        }
        if (!zdiv) {
            CyclotomicExtension X = adjoin_zeta(Dcur, r);
            TeichmullerData td = teichmuller_resolvent(X, taucur);
            const Algebra& E = X.E;
            size_t w = r == 2 ? 1 : (size_t)r - 1;
            std::vector<Vec> azr;
            {
                std::vector<Vec> zp{E.one};
                for (size_t v = 1; v < w; ++v) zp.push_back(E.mul(zp.back(), X.zeta));
                for (size_t j = 0; j < Aspan.rows; ++j)
                    for (size_t v = 0; v < w; ++v)
                        azr.push_back(E.mul(embed_up(X, Aspan.row(j)), zp[v]));
            }
            Mat AZ = echelon(Mat::from_rows(F, azr));
            if (subspace_contains(AZ, td.x)) {
                // the resolvent landed inside A[zeta]: carve the subalgebra out
                Mat Dfix = fixed_subalgebra(Dcur, {taucur});
                Mat Atau = subspace_intersection(Aspan, Dfix);
                std::vector<Vec> crows;
                {
                    std::vector<Vec> zp{E.one};
                    for (size_t v = 1; v < w; ++v) zp.push_back(E.mul(zp.back(), X.zeta));
                    std::vector<Vec> xp{E.one};
                    for (u64 u = 1; u < r; ++u) xp.push_back(E.mul(xp.back(), td.x));
                    for (size_t j = 0; j < Atau.rows; ++j) {
                        Vec a = embed_up(X, Atau.row(j));
                        for (size_t v = 0; v < w; ++v)
                            for (u64 u = 0; u < r; ++u)
                                crows.push_back(E.mul(E.mul(a, zp[v]), xp[u]));
                    }
                }
                Mat CE = echelon(Mat::from_rows(F, crows));
                Mat Cfix = subspace_intersection(CE, echelon(X.emb));
                if (Cfix.rows != (size_t)r * Atau.rows)
                    throw std::logic_error("fixed part of the root subalgebra has unexpected rank");
                std::vector<Vec> cA;
                for (size_t j = 0; j < Cfix.rows; ++j) {
                    auto ed = embed_down(X, Cfix.row(j));
                    if (!ed) throw std::logic_error("subalgebra row escaped the base");
                    auto c = P.solve(*ed);
                    if (!c) throw std::logic_error("subalgebra row escaped the embedded copy");
                    cA.push_back(*c);
                }
                Mat Cb = echelon(Mat::from_rows(F, cA));
                SubAlg Cs = induced_algebra(A, Cb, A.one);
                Mat tc(F, Cb.rows, Cb.rows);
                for (size_t j = 0; j < Cb.rows; ++j) {
                    Vec img = apply_map(taucur, P.apply(Cb.row(j)));
                    auto xA = P.solve(img);
                    if (!xA) throw std::logic_error("restricted action escaped the embedded copy");
                    auto loc = down_coords(Cs, *xA);
                    if (!loc) throw std::logic_error("restricted action left the subalgebra");
                    for (size_t i = 0; i < Cb.rows; ++i) tc.at(i, j) = (*loc)[i];
                }
                if (!is_automorphism(Cs.alg, tc))
                    throw std::logic_error("restriction is not an automorphism");
                if (tc == Mat::identity(F, Cb.rows))
                    throw std::logic_error("restricted action collapsed to the identity");
                auto src = semiregular_or_zero_divisor(Cs.alg, {tc});
                if (src.is_divisor())
                    return R::divisor(must_zero_divisor(A, up_coords(Cs, src.zd->z)));
                return R::found(SubalgebraAutomorphism{std::move(Cb), std::move(tc)});
            }
            // otherwise walk the r-power chain until it falls back into
            // A[zeta] and adjoin a root of the last escapee
            Vec y = td.x, z = E.pow(td.x, r);
            for (size_t steps = 0; !subspace_contains(AZ, z); ++steps) {
                if (steps > 4096) throw std::logic_error("power chain never re-enters the base");
                y = z;
                z = E.pow(z, r);
            }
            auto ke = kummer_embed_or_zerodiv(X, Aspan, y);
            if (ke.is_divisor()) {
                zdiv = ke.zd->z;
            } else {
                auto nf = detail::nonfree_zero_divisor(Dcur, echelon(ke.val->fixed_rows));
                if (!nf) throw std::logic_error("expected a nonfree module over the root subalgebra");
                zdiv = nf->z;
            }
        }
        // refine along the divisor and descend into an invariant part
        IdealRepr half = ideal_of_element(Dcur, *zdiv);
        IdealRepr rest = complement_ideal(Dcur, half.e);
        auto parts = refine_invariant_decomposition(Dcur, {taucur}, {half, rest});
        std::vector<Mat> proj(parts.size());
        for (size_t j = 0; j < parts.size(); ++j) {
            Mat Pj(F, Dcur.n, A.n);
            for (size_t i = 0; i < A.n; ++i) {
                Vec v = Dcur.mul(parts[j].e, detail::mat_col(P, i));
                for (size_t q = 0; q < Dcur.n; ++q) Pj.at(q, i) = v[q];
            }
            Mat K = Pj.kernel();
            if (K.rows) return R::divisor(must_zero_divisor(A, K.row(0)));
            proj[j] = std::move(Pj);
        }
        int pick = -1, fallback = -1;
        for (size_t j = 0; j < parts.size(); ++j) {
            if (!(apply_map(taucur, parts[j].e) == parts[j].e)) continue;
            size_t dj = parts[j].basis.rows;
            if (fallback < 0) fallback = (int)j;
            if (dj % A.n == 0 && (dj / A.n) % r != 0) {
                pick = (int)j;
                break;
            }
        }
        if (pick < 0) pick = fallback;
        if (pick < 0) throw std::logic_error("no invariant part in the refined decomposition");
        SubAlg S = induced_algebra(Dcur, parts[pick].basis, parts[pick].e);
        Mat nP(F, S.alg.n, A.n);
        for (size_t i = 0; i < A.n; ++i) {
            auto c = down_coords(S, detail::mat_col(proj[pick], i));
            if (!c) throw std::logic_error("projection left the chosen part");
            for (size_t q = 0; q < S.alg.n; ++q) nP.at(q, i) = (*c)[q];
        }
        auto tl = detail::restrict_map(S, taucur);
        if (!tl) throw std::logic_error("action does not preserve the chosen part");
        Dcur = S.alg;
        P = std::move(nP);
        taucur = *tl;
    }
}

// ---------------------------------------------------------------------------
// Constructing automorphisms of subalgebras through the tensor power
// ---------------------------------------------------------------------------

// For a prime r dividing the free rank of A over B: either a zero divisor of
// A, or a subalgebra C with a semiregular order-r automorphism whose fixed
// part contains B.
inline Dichotomy<SubalgebraAutomorphism> construct_subalgebra_automorphism(const Algebra& A,
                                                                           const Mat& Bbasis,
                                                                           u64 r,
                                                                           size_t budget = 4096) {
    using R = Dichotomy<SubalgebraAutomorphism>;
    Mat Bb = echelon(Bbasis);
    SubAlg Bs = induced_algebra(A, Bb, A.one);
    std::vector<Vec> gens;
    for (size_t i = 0; i < A.n; ++i) gens.push_back(A.basis(i));
    auto fb = free_basis_or_zero_divisor(
        Bs.alg, A.n, [&](const Vec& b, const Vec& v) { return A.mul(up_coords(Bs, b), v); },
        gens);
    if (fb.is_divisor()) return R::divisor(must_zero_divisor(A, up_coords(Bs, fb.zd->z)));
    size_t m = fb.val->size();
    if (m % r != 0) throw std::invalid_argument("order must divide the module rank");
    size_t cost = Bb.rows;
    for (u64 i = 0; i < r; ++i) {
        cost *= m;
        if (cost > budget) throw RecursionBudgetExceeded();
    }
    EssentialTensorPower ET = essential_tensor_power(A, Bb, *fb.val, r);
    Mat tau = cyclic_slot_action(ET);
    return bring_down_automorphism(A, ET.ess.alg, tau, r, ET.mu[0]);
}

// ---------------------------------------------------------------------------
// The main recursion: Galois generators over a designated base
// ---------------------------------------------------------------------------

// Either a zero divisor of A, or a semiregular automorphism of A of order
// equal to the free rank of A over B whose fixed algebra is exactly B.
inline Dichotomy<Mat> evdokimov(const Algebra& A, const Mat& Bbasis, size_t budget = 4096) {
    using R = Dichotomy<Mat>;
    PrimeField F = A.F;
    if (A.n > budget) throw RecursionBudgetExceeded();
    Mat Bech = echelon(Bbasis);
    SubAlg Bs = induced_algebra(A, Bech, A.one);
    std::vector<Vec> gens;
    for (size_t i = 0; i < A.n; ++i) gens.push_back(A.basis(i));
    auto fb = free_basis_or_zero_divisor(
        Bs.alg, A.n, [&](const Vec& b, const Vec& v) { return A.mul(up_coords(Bs, b), v); },
        gens);
    if (fb.is_divisor()) return R::divisor(must_zero_divisor(A, up_coords(Bs, fb.zd->z)));
    size_t m = fb.val->size();

    auto finish = [&](const Mat& sigma) -> Dichotomy<Mat> {
        if (!is_automorphism(A, sigma)) throw std::logic_error("glued map is not an automorphism");
        auto sr = semiregular_or_zero_divisor(A, {sigma});
        if (sr.is_divisor()) return R::divisor(*sr.zd);
        if (!(fixed_subalgebra(A, {sigma}) == Bech))
            throw std::logic_error("fixed algebra of the glued map drifted");
        auto o = map_order(A, sigma);
        if (!o || *o != m) throw std::logic_error("glued map has the wrong order");
        return R::found(sigma);
    };
    if (m == 1) return finish(Mat::identity(F, A.n));

    // fields carry an explicit cyclic group
    if (component_degrees(A).size() == 1) return finish(frobenius_matrix(A).pow(Bech.rows));

    // small characteristic, several components: split along the rational part
    if (F.p <= (u64)m * m) {
        Mat rat = fixed_subalgebra(A, {frobenius_matrix(A)});
        Mat line = echelon(Mat::from_rows(F, {A.one}));
        for (size_t j = 0; j < rat.rows; ++j) {
            Vec v = rat.row(j);
            if (subspace_contains(line, v)) continue;
            for (u64 lam = 0; lam < F.p; ++lam) {
                auto d = try_zero_divisor(A, A.sub(v, A.smul(lam, A.one)));
                if (d) return R::divisor(*d);
            }
        }
        throw std::logic_error("rational splitting scan failed");
    }

    if (m % 2 == 0) {
        auto cs = construct_subalgebra_automorphism(A, Bech, 2, budget);
        if (cs.is_divisor()) return R::divisor(*cs.zd);
        const Mat& Crows = cs.val->Cbasis;
        const Mat& tau0 = cs.val->tau;
        SubAlg Cs = induced_algebra(A, Crows, A.one);
        auto d1 = evdokimov(A, Crows, budget);
        if (d1.is_divisor()) return d1;
        Mat Cf = fixed_subalgebra(Cs.alg, {tau0});
        SubAlg Cfs = induced_algebra(Cs.alg, Cf, Cs.alg.one);
        std::vector<Vec> bl;
        for (size_t u = 0; u < Bech.rows; ++u) {
            auto c1 = down_coords(Cs, Bech.row(u));
            if (!c1) throw std::logic_error("base escapes the constructed subalgebra");
            auto c2 = down_coords(Cfs, *c1);
            if (!c2) throw std::logic_error("base escapes the fixed part");
            bl.push_back(*c2);
        }
        auto d2 = evdokimov(Cfs.alg, echelon(Mat::from_rows(F, bl)), budget);
        if (d2.is_divisor())
            return R::divisor(
                must_zero_divisor(A, up_coords(Cs, up_coords(Cfs, d2.zd->z))));
        auto g1 = extend_automorphism(Cs.alg, tau0, *d2.val);
        if (g1.is_divisor())
            return R::divisor(must_zero_divisor(A, up_coords(Cs, g1.zd->z)));
        Mat F1 = fixed_subalgebra(A, {*d1.val});
        auto g2 = extend_automorphism(A, *d1.val, detail::change_basis(F, Crows, F1, *g1.val));
        if (g2.is_divisor()) return R::divisor(*g2.zd);
        return finish(*g2.val);
    }

    // odd rank: walk down the ideals of the essential tensor square
    auto mu_finish = [&](const Mat& mu) -> Dichotomy<Mat> {
        if (!is_automorphism(A, mu)) throw std::logic_error("pulled-back map is not an automorphism");
        if (mu == Mat::identity(F, A.n))
            throw std::logic_error("pulled-back map is trivial");
        auto sr = semiregular_or_zero_divisor(A, {mu});
        if (sr.is_divisor()) return R::divisor(*sr.zd);
        Mat Fm = fixed_subalgebra(A, {mu});
        SubAlg Fs = induced_algebra(A, Fm, A.one);
        std::vector<Vec> bl;
        for (size_t u = 0; u < Bech.rows; ++u) {
            auto c = down_coords(Fs, Bech.row(u));
            if (!c) throw std::logic_error("base escapes the fixed part");
            bl.push_back(*c);
        }
        auto dr = evdokimov(Fs.alg, echelon(Mat::from_rows(F, bl)), budget);
        if (dr.is_divisor())
            return R::divisor(must_zero_divisor(A, up_coords(Fs, dr.zd->z)));
        auto g = extend_automorphism(A, mu, *dr.val);
        if (g.is_divisor()) return R::divisor(*g.zd);
        return finish(*g.val);
    };

    if ((size_t)m * m * Bech.rows > budget) throw RecursionBudgetExceeded();
    EssentialTensorPower ET = essential_tensor_power(A, Bech, *fb.val, 2);
    Algebra Icur = ET.ess.alg;
    Mat M1 = ET.mu[0], M2 = ET.mu[1];
    for (size_t round = 0;; ++round) {
        if (round > Icur.n + 16) throw std::logic_error("ideal chain failed to stabilize");
        for (const Mat* Mp : {&M1, &M2}) {
            Mat K = Mp->kernel();
            if (K.rows) return R::divisor(must_zero_divisor(A, K.row(0)));
        }
        Mat B1 = echelon(M1.transpose());
        if (auto nf = detail::nonfree_zero_divisor(Icur, B1)) {
            auto x = M1.solve(nf->z);
            if (!x) throw std::logic_error("nonfree witness escaped the embedded copy");
            return R::divisor(must_zero_divisor(A, *x));
        }
        if (Icur.n == A.n) {
            // the ideal shrank to one copy of A: compare the two embeddings
            auto mu = detail::solve_cols(M2, M1);
            if (!mu) throw std::logic_error("right embedding is not invertible");
            return mu_finish(*mu);
        }
        std::optional<Vec> zdiv;
        auto ds = evdokimov(Icur, B1, budget);
        if (ds.is_divisor()) {
            zdiv = ds.zd->z;
        } else {
            Mat B2 = echelon(M2.transpose());
            auto ds2 = evdokimov(Icur, B2, budget);
            if (ds2.is_divisor()) {
                zdiv = ds2.zd->z;
            } else if (!(ds.val->mul(*ds2.val) == ds2.val->mul(*ds.val))) {
                zdiv = noncyclic_zero_divisor(Icur, {*ds.val, *ds2.val}).z;
            } else {
                auto mu2 = detail::solve_cols(M2, ds.val->mul(M2));
                if (!mu2) throw std::logic_error("action does not preserve the right copy");
                if (!(*mu2 == Mat::identity(F, A.n))) return mu_finish(*mu2);
                auto mu1 = detail::solve_cols(M1, ds2.val->mul(M1));
                if (!mu1) throw std::logic_error("action does not preserve the left copy");
                if (*mu1 == Mat::identity(F, A.n))
                    throw std::logic_error("both restricted actions are trivial");
                return mu_finish(*mu1);
            }
        }
        IdealRepr half = ideal_of_element(Icur, *zdiv);
        IdealRepr rest = complement_ideal(Icur, half.e);
        const IdealRepr& keep = half.basis.rows <= rest.basis.rows ? half : rest;
        if (keep.basis.rows == 0 || keep.basis.rows == Icur.n)
            throw std::logic_error("degenerate split of the tensor ideal");
        SubAlg S = induced_algebra(Icur, keep.basis, keep.e);
        for (Mat* Mp : {&M1, &M2}) {
            Mat nM(F, S.alg.n, A.n);
            for (size_t i = 0; i < A.n; ++i) {
                auto c = down_coords(S, Icur.mul(keep.e, detail::mat_col(*Mp, i)));
                if (!c) throw std::logic_error("embedding left the chosen part");
                for (size_t q = 0; q < S.alg.n; ++q) nM.at(q, i) = (*c)[q];
            }
            *Mp = std::move(nM);
        }
        Icur = S.alg;
    }
}

// ---------------------------------------------------------------------------
// Full decomposition with Galois generators per component
// ---------------------------------------------------------------------------

struct DecomposedComponent {
    Mat rows; // basis of the component inside the input algebra
    Vec unit;
    Algebra alg;
    Mat sigma; // generator of the component's cyclic group, local coordinates
};

inline std::vector<DecomposedComponent> main_decompose(const Algebra& A, size_t budget = 4096) {
    std::vector<DecomposedComponent> out;
    std::vector<std::pair<Mat, Vec>> work{{Mat::identity(A.F, A.n), A.one}};
    while (!work.empty()) {
        auto [rows, unit] = work.front();
        work.erase(work.begin());
        SubAlg S = induced_algebra(A, rows, unit);
        auto d = evdokimov(S.alg, echelon(Mat::from_rows(A.F, {S.alg.one})), budget);
        if (d.is_divisor()) {
            IdealRepr half = ideal_of_element(S.alg, d.zd->z);
            IdealRepr rest = complement_ideal(S.alg, half.e);
            for (const IdealRepr* ip : {&half, &rest}) {
                std::vector<Vec> lift;
                for (size_t q = 0; q < ip->basis.rows; ++q)
                    lift.push_back(up_coords(S, ip->basis.row(q)));
                work.push_back({echelon(Mat::from_rows(A.F, lift)), up_coords(S, ip->e)});
            }
        } else {
            out.push_back({std::move(rows), std::move(unit), std::move(S.alg), *d.val});
        }
    }
    std::sort(out.begin(), out.end(), [](const DecomposedComponent& a, const DecomposedComponent& b) {
        if (a.rows.rows != b.rows.rows) return a.rows.rows < b.rows.rows;
        return a.rows.a < b.rows.a;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Polynomial front end
// ---------------------------------------------------------------------------

struct FactorOrAutomorphism {
    std::optional<Poly> factor;        // proper monic divisor of the input
    std::optional<Mat> automorphism;   // Galois generator of the quotient ring
};

inline FactorOrAutomorphism factor_or_automorphism(const Poly& f_in, size_t budget = 4096) {
    Poly f = monic(f_in);
    if (f.deg() < 1) throw std::invalid_argument("need a polynomial of positive degree");
    Poly g = poly_gcd(f, derivative(f));
    if (g.deg() > 0) throw NotSquarefree(monic(g));
    Algebra A = from_polynomial(f);
    auto comps = main_decompose(A, budget);
    FactorOrAutomorphism out;
    if (comps.size() == 1) {
        out.automorphism = comps[0].sigma;
        return out;
    }
    // the identity of a component vanishes exactly on the other factors
    Poly e(f.F, comps[0].unit);
    Poly fac = monic(poly_gcd(f, e));
    if (fac.deg() <= 0 || fac.deg() >= f.deg())
        throw std::logic_error("component identity produced no proper factor");
    out.factor = std::move(fac);
    return out;
}

} // namespace fpalg

#endif
