#ifndef FPALG_SMOOTH_HPP
#define FPALG_SMOOTH_HPP

#include <stdexcept>
#include <vector>

#include "fpalg/noncomm.hpp"

namespace fpalg {

struct SmoothBoundExceeded : std::runtime_error {
    u64 factor;
    explicit SmoothBoundExceeded(u64 f)
        : std::runtime_error("p - 1 has the prime factor " + std::to_string(f) +
                             " above the smoothness bound"),
          factor(f) {}
};

struct NotSplit : std::invalid_argument {
    NotSplit() : std::invalid_argument("polynomial does not split into linear factors") {}
};

namespace detail {

// ascending list of distinct prime factors, enforcing the smoothness bound
inline std::vector<u64> smooth_prime_factors(u64 v, u64 S) {
    std::vector<u64> out;
    for (u64 q = 2; q * q <= v; ++q)
        if (v % q == 0) {
            if (q > S) throw SmoothBoundExceeded(q);
            out.push_back(q);
            while (v % q == 0) v /= q;
        }
    if (v > 1) {
        if (v > S) throw SmoothBoundExceeded(v);
        out.push_back(v);
    }
    return out;
}

// any zero divisor of a completely split algebra of dimension >= 2, via the
// roots of a basis element's minimal polynomial
inline ZeroDivisor split_zero_divisor(const Algebra& A) {
    for (size_t i = 0; i < A.n; ++i) {
        Poly mp = minimal_polynomial(A, A.basis(i));
        if (mp.deg() < 2) continue;
        Poly lin = berlekamp_deterministic(mp)[0];
        if (lin.deg() != 1) throw std::invalid_argument("algebra is not completely split");
        u64 root = A.F.neg(lin.coeff(0));
        return must_zero_divisor(A, A.sub(A.basis(i), A.smul(root, A.one)));
    }
    throw std::invalid_argument("no zero divisor in a one-dimensional algebra");
}

} // namespace detail

// Result of the Kummer-element search: a unit of r-power order sitting just
// outside B (or, when r equals the free rank, just outside at the second
// level of the exponent ladder).
struct SmoothKummer {
    Vec x;
    u64 r = 0;
    bool deep = false; // false: x not in B, x^r in B; true: x^r not in B, x^(r^2) in B
};

inline Dichotomy<SmoothKummer> smooth_kummer_element(const Algebra& A, const Mat& Brows,
                                                     size_t d, u64 S) {
    using R = Dichotomy<SmoothKummer>;
    PrimeField F = A.F;
    std::vector<u64> primes = detail::smooth_prime_factors(F.p - 1, S);
    auto inB = [&](const Vec& v) { return subspace_contains(Brows, v); };

    // small primes: a complete split is cheap, so surface a divisor directly
    u64 logp = 0;
    for (u64 v = F.p; v; v >>= 1) ++logp;
    if (F.p < S * logp + 1) return R::divisor(detail::split_zero_divisor(A));

    Vec y;
    for (size_t i = 0; i < A.n; ++i)
        if (!inB(A.basis(i))) {
            y = A.basis(i);
            break;
        }
    if (y.empty()) throw std::invalid_argument("subalgebra is not proper");

    // shift scan: y + a with every prime power of it still outside B
    Vec z;
    for (u64 a = 0; a <= S * logp; ++a) {
        Vec cand = A.add(y, A.smul(a % F.p, A.one));
        if (!A.is_unit(cand)) {
            if (vec_is_zero(cand)) continue;
            return R::divisor(must_zero_divisor(A, cand));
        }
        bool good = true;
        for (u64 q : primes)
            if (inB(A.pow(cand, q))) {
                good = false;
                break;
            }
        if (good) {
            z = cand;
            break;
        }
    }
    if (z.empty()) throw std::logic_error("shift scan exhausted without a deep unit");

    // walk the exponent lattice of p - 1: a divisor m minimal under
    // divisibility with z^m inside B is neither one nor prime, and writing
    // m = e * r1 * r2 puts z^(e*r1) and z^(e*r2) on the outside
    std::vector<u64> divisors;
    for (u64 e = 1; e * e <= F.p - 1; ++e)
        if ((F.p - 1) % e == 0) {
            divisors.push_back(e);
            if (e != (F.p - 1) / e) divisors.push_back((F.p - 1) / e);
        }
    std::sort(divisors.begin(), divisors.end());
    auto finish = [&](Vec x, u64 r, bool deep) {
        // force an r-power order by stripping the other primes off p - 1
        u64 er = 0;
        BigUint M1 = strip_factor(BigUint(F.p - 1), r, er);
        x = A.pow_big(x, M1);
        bool ok = deep ? (!inB(A.pow(x, r)) && inB(A.pow(x, r * r)))
                       : (!inB(x) && inB(A.pow(x, r)));
        if (!ok) throw std::logic_error("membership pattern lost in the order reduction");
        return R::found(SmoothKummer{std::move(x), r, deep});
    };
    for (u64 m : divisors) {
        if (!inB(A.pow(z, m))) continue;
        for (u64 r1 : primes) {
            if (m % r1 != 0) continue;
            for (u64 r2 : primes) {
                if ((m / r1) % r2 != 0) continue;
                u64 e = m / (r1 * r2);
                if (inB(A.pow(z, e * r1)) || inB(A.pow(z, e * r2))) continue;
                if (r1 == d && r2 == d) return finish(A.pow(z, e), d, true);
                // one of the primes differs from the free rank: shallow case
                u64 ra = r1 != d ? r1 : r2;
                u64 rb = r1 != d ? r2 : r1;
                return finish(A.pow(z, e * rb), ra, false);
            }
        }
    }
    throw std::logic_error("exponent lattice holds no boundary pattern");
}

// ---------------------------------------------------------------------------
// Cyclotomic covers
// ---------------------------------------------------------------------------

// Surjective homomorphism from a cyclotomic coordinate ring onto a subalgebra
// of the ambient algebra. The empty index set is the unit cover from
// k[X]/(X - 1).
struct CyclotomicCover {
    std::vector<u64> I; // distinct primes of p - 1 whose product is rI
    u64 rI = 1;
    Algebra source;  // k[X]/(Phi_rI)
    Mat Brows;       // echelon basis of the image inside the ambient algebra
    Mat psi;         // ambient-dim x source-dim matrix of the homomorphism
};

inline CyclotomicCover unit_cover(const Algebra& A) {
    CyclotomicCover c;
    c.rI = 1;
    c.source = from_polynomial(cyclotomic(1, A.F));
    c.Brows = echelon(Mat::from_rows(A.F, {A.one}));
    c.psi = Mat(A.F, A.n, 1);
    for (size_t i = 0; i < A.n; ++i) c.psi.at(i, 0) = A.one[i];
    return c;
}

inline bool verify_cover(const Algebra& A, const CyclotomicCover& c) {
    const Algebra& C = c.source;
    if (!(c.psi.apply(C.one) == A.one)) return false;
    for (size_t i = 0; i < C.n; ++i)
        for (size_t j = 0; j < C.n; ++j) {
            Vec lhs = c.psi.apply(C.mul(C.basis(i), C.basis(j)));
            Vec rhs = A.mul(c.psi.apply(C.basis(i)), c.psi.apply(C.basis(j)));
            if (!(lhs == rhs)) return false;
        }
    std::vector<Vec> img;
    for (size_t i = 0; i < C.n; ++i) img.push_back(c.psi.apply(C.basis(i)));
    return echelon(Mat::from_rows(A.F, img)) == c.Brows;
}

namespace detail {

// power of the cover generator X, pushed into the ambient algebra
inline Vec cover_image_xpow(const Algebra& A, const CyclotomicCover& c, u64 e) {
    const Algebra& C = c.source;
    Vec xe = C.n == 1 ? C.one : C.pow(C.basis(1), e % c.rI);
    return c.psi.apply(xe);
}

// smallest zeta != 1 in the cyclic tower over v with zeta^r = 1; v must have
// r-power order larger than one
inline Vec top_root_of_unity(const Algebra& A, Vec v, u64 r) {
    if (v == A.one) throw std::invalid_argument("unit element has no proper root of unity");
    for (size_t guard = 0; guard <= 64 * A.n; ++guard) {
        Vec nxt = A.pow(v, r);
        if (nxt == A.one) return v;
        v = std::move(nxt);
    }
    throw std::invalid_argument("element does not have r-power order");
}

// B-linear map determined by x^i -> zeta^i x^i on the free power basis, or
// nothing when the powers of x fail to be one
inline std::optional<Mat> power_twist_map(const Algebra& A, const Mat& Brows, const Vec& x,
                                          const Vec& zeta, size_t d) {
    std::vector<Vec> powers{A.one};
    for (size_t i = 1; i < d; ++i) powers.push_back(A.mul(powers.back(), x));
    Mat M(A.F, A.n, A.n);
    Vec zp = A.one;
    std::vector<Vec> twisted;
    for (size_t i = 0; i < d; ++i) {
        twisted.push_back(A.mul(zp, powers[i]));
        zp = A.mul(zp, zeta);
    }
    for (size_t j = 0; j < A.n; ++j) {
        auto co = free_coords(A, Brows, powers, A.basis(j));
        if (!co) return std::nullopt;
        Vec img(A.n, 0);
        for (size_t i = 0; i < d; ++i) img = A.add(img, A.mul((*co)[i], twisted[i]));
        for (size_t i = 0; i < A.n; ++i) M.at(i, j) = img[i];
    }
    return M;
}

} // namespace detail

// One step of the cover induction: either a zero divisor of A or a cover of
// a strictly larger subalgebra.
inline Dichotomy<CyclotomicCover> cyclotomic_cover_extend(const Algebra& A,
                                                          const CyclotomicCover& cover,
                                                          u64 S) {
    using R = Dichotomy<CyclotomicCover>;
    PrimeField F = A.F;
    const Mat& Brows = cover.Brows;
    if (Brows.rows >= A.n) throw std::invalid_argument("cover already reaches the algebra");
    if (auto zd = detail::nonfree_zero_divisor(A, Brows)) return R::divisor(*zd);
    size_t d = A.n / Brows.rows;

    auto sk = smooth_kummer_element(A, Brows, d, S);
    if (sk.is_divisor()) return R::divisor(*sk.zd);
    const Vec& x = sk.val->x;
    u64 r = sk.val->r;

    // recursion into a proper intermediate subalgebra: extend the cover
    // there and lift the outcome back into the ambient algebra
    auto recurse_below = [&](const Mat& Sub) -> R {
        SubAlg S1 = induced_algebra(A, Sub, A.one);
        CyclotomicCover local = cover;
        std::vector<Vec> br;
        for (size_t i = 0; i < Brows.rows; ++i) {
            auto dc = down_coords(S1, Brows.row(i));
            if (!dc) throw std::logic_error("cover image escaped its own extension");
            br.push_back(*dc);
        }
        local.Brows = echelon(Mat::from_rows(F, br));
        Mat lp(F, S1.alg.n, cover.source.n);
        for (size_t j = 0; j < cover.source.n; ++j) {
            auto dc = down_coords(S1, detail::mat_col(cover.psi, j));
            if (!dc) throw std::logic_error("cover image escaped its own extension");
            for (size_t i = 0; i < S1.alg.n; ++i) lp.at(i, j) = (*dc)[i];
        }
        local.psi = std::move(lp);
        auto rec = cyclotomic_cover_extend(S1.alg, local, S);
        if (rec.is_divisor())
            return R::divisor(must_zero_divisor(A, up_coords(S1, rec.zd->z)));
        CyclotomicCover out = std::move(*rec.val);
        std::vector<Vec> ur;
        for (size_t i = 0; i < out.Brows.rows; ++i)
            ur.push_back(up_coords(S1, out.Brows.row(i)));
        out.Brows = echelon(Mat::from_rows(F, ur));
        Mat up(F, A.n, out.source.n);
        for (size_t j = 0; j < out.source.n; ++j) {
            Vec c = up_coords(S1, detail::mat_col(out.psi, j));
            for (size_t i = 0; i < A.n; ++i) up.at(i, j) = c[i];
        }
        out.psi = std::move(up);
        return R::found(std::move(out));
    };

    auto adjoin = [&](const Vec& g) {
        std::vector<Vec> gens;
        for (size_t i = 0; i < Brows.rows; ++i) gens.push_back(Brows.row(i));
        gens.push_back(g);
        return detail::generated_subalgebra(A, gens);
    };

    // proper B[x]: handle the smaller pair first
    Mat Bx = adjoin(x);
    if (Bx.rows < A.n) return recurse_below(Bx);

    // base case A = B[x]
    if (sk.val->deep) {
        // r = d: the norm of x along the twist automorphism collapses
        Vec xr = A.pow(x, r);
        Mat Bxr = adjoin(xr);
        if (Bxr.rows < A.n) return recurse_below(Bxr);
        Vec xr2 = A.pow(x, r * r);
        if (xr2 == A.one) {
            // Phi_r(x^r) divides x^(r^2) - 1 = 0 but cannot vanish
            Poly phi = cyclotomic(r, F);
            Vec v(A.n, 0);
            for (size_t i = 0; i <= (size_t)phi.deg(); ++i)
                if (phi.coeff(i)) v = A.add(v, A.smul(phi.coeff(i), A.pow(xr, i)));
            if (vec_is_zero(v)) throw std::logic_error("cyclotomic value vanished at full rank");
            return R::divisor(must_zero_divisor(A, v));
        }
        Vec zeta = detail::top_root_of_unity(A, xr2, r);
        // a root of unity that is one in some component but not all is a
        // zero divisor outright; past this point zeta is componentwise
        // primitive
        if (auto zd = try_zero_divisor(A, A.sub(zeta, A.one))) return R::divisor(*zd);
        auto tw = detail::power_twist_map(A, Brows, xr, zeta, r);
        if (!tw) {
            if (auto zd = detail::nonfree_zero_divisor(A, Brows)) return R::divisor(*zd);
            throw std::logic_error("power basis failed over a free module");
        }
        // norm z of x under the twist lies in B; its r-th power collides
        Vec z = x;
        Vec xi = x;
        for (u64 i = 1; i < r; ++i) {
            xi = apply_map(*tw, xi);
            z = A.mul(z, xi);
        }
        if (r % 2 == 1) {
            // z^r = x^(r^2): some z - zeta^i x^r kills a component
            Vec zp = A.one;
            for (u64 i = 0; i < r; ++i) {
                Vec cand = A.sub(z, A.mul(zp, xr));
                if (auto zd = try_zero_divisor(A, cand)) return R::divisor(*zd);
                zp = A.mul(zp, zeta);
            }
            throw std::logic_error("norm collision produced no divisor");
        }
        // r = 2: (wz)^2 = x^4 with w^2 = -1 in k by ascending scan
        u64 w = 0;
        for (u64 c = 1; c < F.p; ++c)
            if (F.mul(c, c) == F.p - 1) {
                w = c;
                break;
            }
        if (w == 0) throw std::logic_error("square root of minus one missing");
        Vec wz = A.smul(w, z);
        for (Vec cand : {A.sub(wz, xr), A.add(wz, xr)})
            if (auto zd = try_zero_divisor(A, cand)) return R::divisor(*zd);
        throw std::logic_error("square norm collision produced no divisor");
    }

    Vec xr = A.pow(x, r);
    if (!(xr == A.one)) {
        // d < r with c = x^r inside B: the minimal polynomial g of x over B
        // has degree d and divides X^r - c, so componentwise its roots are d
        // out of the r elements of a single zeta-orbit. Multiplying a root
        // by a primitive power of zeta therefore leaves the root set in at
        // least one component and exits it in at least one other, making
        // some g(zeta^j x) a zero divisor.
        Vec zeta = detail::top_root_of_unity(A, xr, r);
        if (auto zd = try_zero_divisor(A, A.sub(zeta, A.one))) return R::divisor(*zd);
        std::vector<Vec> powers{A.one};
        for (size_t i = 1; i < d; ++i) powers.push_back(A.mul(powers.back(), x));
        auto co = free_coords(A, Brows, powers, A.mul(powers.back(), x));
        if (!co) throw std::logic_error("power basis failed over a free module");
        Vec zx = x;
        for (u64 j = 1; j < r; ++j) {
            zx = A.mul(zeta, zx);
            Vec w = zx;
            for (size_t i = 1; i < d; ++i) w = A.mul(w, zx);
            Vec zxp = A.one;
            for (size_t i = 0; i < d; ++i) {
                w = A.sub(w, A.mul((*co)[i], zxp));
                zxp = A.mul(zxp, zx);
            }
            if (auto zd = try_zero_divisor(A, w)) return R::divisor(*zd);
        }
        throw std::logic_error("twisted minimal-polynomial scan produced no divisor");
    }

    // x^r = 1: extend the cover through the Chinese remainder surgery
    for (u64 q : cover.I)
        if (q == r) {
            // the cover already supplies an r-th root of unity y with
            // y^r = 1 = x^r but y in B, x outside: some x - x^i y collapses
            Vec y = detail::cover_image_xpow(A, cover, cover.rI / r);
            Vec xp = A.one;
            for (u64 i = 0; i < r; ++i) {
                Vec cand = A.sub(x, A.mul(xp, y));
                if (auto zd = try_zero_divisor(A, cand)) return R::divisor(*zd);
                xp = A.mul(xp, x);
            }
            throw std::logic_error("coinciding r-th powers produced no divisor");
        }

    // the surgery needs x to be componentwise primitive: the r-th
    // cyclotomic value of x vanishes exactly then, and otherwise it is a
    // zero divisor (it cannot be a unit, since x itself is not one)
    {
        Vec phi(A.n, 0);
        Vec xp = A.one;
        for (u64 i = 0; i < r; ++i) {
            phi = A.add(phi, xp);
            xp = A.mul(xp, x);
        }
        if (!vec_is_zero(phi)) return R::divisor(must_zero_divisor(A, phi));
    }

    CyclotomicCover out;
    out.I = cover.I;
    out.I.push_back(r);
    std::sort(out.I.begin(), out.I.end());
    out.rI = cover.rI * r;
    out.source = from_polynomial(cyclotomic(out.rI, F));
    Mat psi(F, A.n, out.source.n);
    Vec xp = A.one;
    for (size_t j = 0; j < out.source.n; ++j) {
        Vec img = A.mul(detail::cover_image_xpow(A, cover, j), xp);
        for (size_t i = 0; i < A.n; ++i) psi.at(i, j) = img[i];
        xp = A.mul(xp, x);
    }
    out.psi = std::move(psi);
    std::vector<Vec> img;
    for (size_t j = 0; j < out.source.n; ++j)
        img.push_back(detail::mat_col(out.psi, j));
    out.Brows = echelon(Mat::from_rows(F, img));
    if (out.Brows.rows <= Brows.rows)
        throw std::logic_error("cover extension made no progress");
    if (!verify_cover(A, out)) throw std::logic_error("extended cover failed verification");
    return R::found(std::move(out));
}

// ---------------------------------------------------------------------------
// The factor-or-automorphism wrapper for fully split polynomials
// ---------------------------------------------------------------------------

struct SmoothOutcome {
    std::optional<Poly> factor;
    std::optional<Mat> automorphism; // order deg f, on F_p[X]/(f)
    std::optional<CyclotomicCover> cover;
};

inline SmoothOutcome smooth_factor(const Poly& f_in, u64 S = 64) {
    Poly f = monic(f_in);
    if (f.deg() < 1) throw std::invalid_argument("need a polynomial of positive degree");
    PrimeField F = f.F;
    {
        Poly g = poly_gcd(f, derivative(f));
        if (g.deg() > 0) throw NotSquarefree(monic(g));
        Poly xp = powmod_poly(Poly(F, {0, 1}), F.p, f);
        Poly split = poly_gcd(f, sub(xp, Poly(F, {0, 1})));
        if (split.deg() != f.deg()) throw NotSplit();
    }
    Algebra A = from_polynomial(f);
    size_t n = A.n;
    SmoothOutcome out;
    CyclotomicCover cover = unit_cover(A);
    while (cover.Brows.rows < n) {
        auto step = cyclotomic_cover_extend(A, cover, S);
        if (step.is_divisor()) {
            Poly g = monic(poly_gcd(f, Poly(F, step.zd->z)));
            if (g.deg() <= 0 || g.deg() >= f.deg())
                throw std::logic_error("zero divisor produced a trivial factor");
            out.factor = std::move(g);
            return out;
        }
        cover = std::move(*step.val);
    }
    if (n == 1) {
        out.automorphism = Mat::identity(F, 1);
        out.cover = std::move(cover);
        return out;
    }
    // idempotents of the cyclotomic source, pushed through the cover
    std::vector<Poly> facs = berlekamp_deterministic(cyclotomic(cover.rI, F));
    std::vector<Vec> units;
    for (const Poly& g : facs) {
        Poly rest = divexact(cyclotomic(cover.rI, F), g);
        // idempotent supported on the component of g: rest * (rest^{-1} mod g)
        Poly inv = rest;
        {
            // extended gcd of rest and g
            Poly a = g, b = mod(rest, g), x0 = Poly(F, {}), x1 = Poly(F, {1});
            while (!b.is_zero()) {
                Poly q = divexact(sub(a, mod(a, b)), b);
                Poly t = sub(x0, mul(q, x1));
                a = std::exchange(b, mod(a, b));
                x0 = std::exchange(x1, t);
            }
            if (a.deg() != 0) throw std::logic_error("cyclotomic components are not coprime");
            inv = scale(x0, F.inv(a.coeff(0)));
        }
        Poly e = mod(mul(rest, inv), cyclotomic(cover.rI, F));
        Vec ec(cover.source.n, 0);
        for (size_t i = 0; i <= (size_t)e.deg(); ++i) ec[i] = e.coeff(i);
        Vec u = cover.psi.apply(ec);
        if (!vec_is_zero(u)) units.push_back(u);
    }
    if (cover.source.n > n) {
        // non-injective cover: a surviving idempotent below one is a divisor
        for (const Vec& u : units)
            if (!(u == A.one)) {
                Poly g = monic(poly_gcd(f, Poly(F, u)));
                if (g.deg() > 0 && g.deg() < f.deg()) {
                    out.factor = std::move(g);
                    return out;
                }
            }
        throw std::logic_error("non-injective cover without a proper idempotent");
    }
    // injective cover: transport an order-n cycle on the split components
    std::sort(units.begin(), units.end());
    if (units.size() != n) throw std::logic_error("wrong component count under a bijective cover");
    Mat sigma(F, n, n);
    for (size_t j = 0; j < n; ++j) {
        // component coordinates of basis(j), advanced by one position
        Vec img(n, 0);
        for (size_t c = 0; c < n; ++c) {
            Vec piece = A.mul(A.basis(j), units[c]);
            // piece = lambda * units[c] in a split line; read off lambda
            u64 lambda = 0;
            for (size_t i = 0; i < n; ++i)
                if (units[c][i]) {
                    lambda = F.mul(piece[i], F.inv(units[c][i]));
                    break;
                }
            img = A.add(img, A.smul(lambda, units[(c + 1) % n]));
        }
        for (size_t i = 0; i < n; ++i) sigma.at(i, j) = img[i];
    }
    if (!is_automorphism(A, sigma)) throw std::logic_error("component cycle is not an automorphism");
    auto o = map_order(A, sigma);
    if (!o || *o != n) throw std::logic_error("component cycle has the wrong order");
    out.automorphism = std::move(sigma);
    out.cover = std::move(cover);
    return out;
}

} // namespace fpalg

#endif
