#ifndef FPALG_NONCOMM_HPP
#define FPALG_NONCOMM_HPP

#include <stdexcept>
#include <utility>
#include <vector>

#include "fpalg/tensoraut.hpp"

namespace fpalg {

struct CommutativeInput : std::invalid_argument {
    CommutativeInput() : std::invalid_argument("input algebra is commutative") {}
};

struct NoSolution : std::runtime_error {
    explicit NoSolution(const char* what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Preprocessing: matrix-algebra form over the center
// ---------------------------------------------------------------------------

namespace detail {

// echelon basis of {x : x*s = s*x for all rows s of S}
inline Mat centralizer(const Algebra& A, const Mat& S) {
    Mat sys(A.F, S.rows * A.n, A.n);
    for (size_t j = 0; j < S.rows; ++j) {
        Mat l = A.lmat(S.row(j));
        Mat r = A.rmat(S.row(j));
        for (size_t i = 0; i < A.n; ++i)
            for (size_t k = 0; k < A.n; ++k)
                sys.at(j * A.n + i, k) = A.F.sub(r.at(i, k), l.at(i, k));
    }
    return echelon(sys.kernel());
}

// smallest unital subalgebra containing the given elements
inline Mat generated_subalgebra(const Algebra& A, std::vector<Vec> gens) {
    gens.push_back(A.one);
    Mat span = echelon(Mat::from_rows(A.F, gens));
    for (bool grew = true; grew;) {
        grew = false;
        std::vector<Vec> rows;
        for (size_t i = 0; i < span.rows; ++i) rows.push_back(span.row(i));
        size_t before = rows.size();
        for (size_t i = 0; i < before; ++i)
            for (size_t j = 0; j < before; ++j) {
                Vec pr = A.mul(rows[i], rows[j]);
                if (!subspace_contains(span, pr)) {
                    rows.push_back(pr);
                    span = echelon(Mat::from_rows(A.F, rows));
                    grew = true;
                }
            }
    }
    return span;
}

// a multiple of the multiplicative order of the unit u, read off from the
// degrees of the irreducible factors of its minimal polynomial; a repeated
// factor betrays a nilpotent element, i.e. a zero divisor
inline Dichotomy<BigUint> order_multiple(const Algebra& A, const Vec& u) {
    using R = Dichotomy<BigUint>;
    Mat span = generated_subalgebra(A, {u});
    SubAlg S = induced_algebra(A, span, A.one);
    Mat rad = radical_commutative(S.alg);
    if (rad.rows > 0) return R::divisor(must_zero_divisor(A, up_coords(S, rad.row(0))));
    Poly f = minimal_polynomial(A, u);
    BigUint M(1);
    for (const auto& [d, part] : distinct_degree_factorization(f))
        M = M.mul(BigUint::pow_u64(A.F.p, d).sub_u64(1));
    return R::found(std::move(M));
}

// exponent t with v^(r^t) = 1; caller guarantees v has r-power order
inline u64 r_order_exp(const Algebra& A, Vec v, u64 r) {
    for (u64 t = 0; t <= 64 * A.n; ++t) {
        if (v == A.one) return t;
        v = A.pow(v, r);
    }
    throw std::invalid_argument("element does not have r-power order");
}

} // namespace detail

// Structural description of a semisimple algebra as full matrices over its
// center, or a zero divisor blocking that shape.
struct MatrixForm {
    Mat Crows; // echelon basis of the center inside A
    size_t m;  // A is structurally m-by-m matrices over the center
};

inline Dichotomy<MatrixForm> preprocess(const Algebra& A) {
    using R = Dichotomy<MatrixForm>;
    if (A.commutative) throw CommutativeInput();
    Mat rad = radical_any(A);
    if (rad.rows > 0) return R::divisor(must_zero_divisor(A, rad.row(0)));
    Mat C = echelon(center(A));
    if (auto zd = detail::nonfree_zero_divisor(A, C)) return R::divisor(*zd);
    if (A.n % C.rows != 0)
        throw std::logic_error("free module rank over the center is fractional");
    size_t q = A.n / C.rows, m = 0;
    while ((m + 1) * (m + 1) <= q) ++m;
    if (m * m != q) throw std::logic_error("module rank over the center is not a square");
    return R::found(MatrixForm{std::move(C), m});
}

// Greedy enlargement to a self-centralizing commutative semisimple
// subalgebra: as long as the centralizer is larger, adjoin its first basis
// vector outside the current span; a nonzero radical on the way is a
// nilpotent of A.
inline Dichotomy<Mat> max_comm_semisimple(const Algebra& A, const MatrixForm& MF) {
    using R = Dichotomy<Mat>;
    Mat D = MF.Crows;
    for (;;) {
        Mat Z = detail::centralizer(A, D);
        if (Z.rows == D.rows) break;
        Vec v;
        for (size_t i = 0; i < Z.rows; ++i)
            if (!subspace_contains(D, Z.row(i))) {
                v = Z.row(i);
                break;
            }
        if (v.empty()) throw std::logic_error("centralizer mismatch without a new vector");
        std::vector<Vec> gens;
        for (size_t i = 0; i < D.rows; ++i) gens.push_back(D.row(i));
        gens.push_back(v);
        Mat next = detail::generated_subalgebra(A, gens);
        SubAlg S = induced_algebra(A, next, A.one);
        Mat rad = radical_commutative(S.alg);
        if (rad.rows > 0) return R::divisor(must_zero_divisor(A, up_coords(S, rad.row(0))));
        D = std::move(next);
    }
    {
        SubAlg S = induced_algebra(A, D, A.one);
        std::vector<Vec> cl;
        for (size_t i = 0; i < MF.Crows.rows; ++i) {
            auto c = down_coords(S, MF.Crows.row(i));
            if (!c) throw std::logic_error("center escaped its maximal overalgebra");
            cl.push_back(*c);
        }
        if (auto zd = detail::nonfree_zero_divisor(S.alg, echelon(Mat::from_rows(A.F, cl))))
            return R::divisor(must_zero_divisor(A, up_coords(S, zd->z)));
    }
    if (D.rows != MF.m * MF.Crows.rows)
        throw std::logic_error("maximal commutative subalgebra has unexpected rank");
    return R::found(std::move(D));
}

// Noether-Skolem style conjugator: a nonzero y with y * b^sigma = b * y for
// every b in the subalgebra spanned by Brows; sigma acts in the local
// coordinates of that subalgebra. A singular solution is itself the divisor.
inline Dichotomy<Vec> conjugator(const Algebra& A, const Mat& Brows, const Mat& sigma) {
    using R = Dichotomy<Vec>;
    SubAlg B = induced_algebra(A, Brows, A.one);
    Mat sys(A.F, Brows.rows * A.n, A.n);
    for (size_t j = 0; j < Brows.rows; ++j) {
        Mat l = A.lmat(Brows.row(j));
        Mat rr = A.rmat(up_coords(B, apply_map(sigma, B.alg.basis(j))));
        for (size_t i = 0; i < A.n; ++i)
            for (size_t k = 0; k < A.n; ++k)
                sys.at(j * A.n + i, k) = A.F.sub(rr.at(i, k), l.at(i, k));
    }
    Mat K = sys.kernel();
    if (K.rows == 0)
        throw NoSolution("no conjugating element; hypothesis of the lemma violated");
    // prefer an invertible solution: single rows first, then their sum
    Vec sum(A.n, 0);
    for (size_t i = 0; i < K.rows; ++i) {
        Vec y = K.row(i);
        if (A.is_unit(y)) return R::found(std::move(y));
        sum = A.add(sum, y);
    }
    if (A.is_unit(sum)) return R::found(std::move(sum));
    return R::divisor(must_zero_divisor(A, K.row(0)));
}

// y of r-power order whose conjugation permutes a commutative semisimple
// subalgebra nontrivially has minimal polynomial X^r - 1, so the geometric
// sum against y - 1 telescopes to zero.
inline ZeroDivisor order_r_conjugation_zerodiv(const Algebra& A, const Vec& y, u64 r) {
    Vec z = A.sub(y, A.one);
    Vec w(A.n, 0);
    Vec pw = A.one;
    for (u64 i = 0; i < r; ++i) {
        w = A.add(w, pw);
        pw = A.mul(pw, y);
    }
    ZeroDivisor out{std::move(z), std::move(w)};
    if (!check_zero_divisor(A, out))
        throw std::logic_error("conjugating element failed the minimal polynomial identity");
    return out;
}

// alpha^2 + beta^2 = -1 mod p by ascending scan with Euler's criterion
inline std::pair<u64, u64> sum_of_two_squares(u64 p) {
    PrimeField F(p);
    auto is_square = [&](u64 a) { return a == 0 || F.pow(a, (p - 1) / 2) == 1; };
    for (u64 al = 0; al < p; ++al) {
        u64 target = F.sub(F.neg(1), F.mul(al, al));
        if (!is_square(target)) continue;
        for (u64 be = 0; be < p; ++be)
            if (F.mul(be, be) == target) return {al, be};
    }
    throw std::logic_error("no sum of two squares found");
}

// ---------------------------------------------------------------------------
// The full pipeline: zero divisors of noncommutative algebras
// ---------------------------------------------------------------------------

inline ZeroDivisor find_zero_divisor(const Algebra& A, size_t budget = 4096) {
    auto pre = preprocess(A);
    if (pre.is_divisor()) return *pre.zd;
    const MatrixForm& MF = *pre.val;
    size_t m = MF.m;
    PrimeField F = A.F;

    auto dmax = max_comm_semisimple(A, MF);
    if (dmax.is_divisor()) return *dmax.zd;
    Mat Drows = *dmax.val;
    SubAlg Ds = induced_algebra(A, Drows, A.one);
    const Algebra& D = Ds.alg;
    auto lift = [&](const ZeroDivisor& zd) {
        return must_zero_divisor(A, up_coords(Ds, zd.z));
    };

    // Galois generator of D over the center
    std::vector<Vec> cl;
    for (size_t i = 0; i < MF.Crows.rows; ++i) {
        auto c = down_coords(Ds, MF.Crows.row(i));
        if (!c) throw std::logic_error("center escaped its maximal overalgebra");
        cl.push_back(*c);
    }
    auto ev = evdokimov(D, echelon(Mat::from_rows(F, cl)), budget);
    if (ev.is_divisor()) return lift(*ev.zd);
    Mat sigma = *ev.val; // order m, fixed algebra = center

    auto cj = conjugator(A, Drows, sigma);
    if (cj.is_divisor()) return *cj.zd;
    Vec y = *cj.val;

    u64 r = 0;
    for (u64 q = 2; q <= m; ++q)
        if (m % q == 0 && q != F.p && is_prime_u64(q)) {
            r = q;
            break;
        }
    if (r == 0) throw std::invalid_argument("matrix rank has no usable prime factor");
    u64 a = 0;
    for (u64 t = m; t % r == 0; t /= r) ++a;

    // power y and sigma so that ord(y) is an r-power and ord(sigma) = r
    auto om = detail::order_multiple(A, y);
    if (om.is_divisor()) return *om.zd;
    u64 e = 0;
    BigUint M1 = strip_factor(*om.val, r, e);
    y = A.pow_big(y, M1);
    sigma = sigma.pow(M1.mod(m));
    for (u64 i = 1; i < a; ++i) {
        y = A.pow(y, r);
        sigma = sigma.pow(r);
    }

    Vec zA = A.pow(y, r);
    if (zA == A.one) return order_r_conjugation_zerodiv(A, y, r);
    auto zl0 = down_coords(Ds, zA);
    if (!zl0) throw std::logic_error("r-th power of the conjugator escaped the subalgebra");
    u64 t0 = detail::r_order_exp(D, *zl0, r);
    Vec zeta = *zl0;
    for (u64 i = 1; i < t0; ++i) zeta = D.pow(zeta, r);

    // zeta must kill the geometric sum in every component
    {
        Vec s(D.n, 0), pw = D.one;
        for (u64 i = 0; i < r; ++i) {
            s = D.add(s, pw);
            pw = D.mul(pw, zeta);
        }
        if (!vec_is_zero(s)) {
            ZeroDivisor zd{up_coords(Ds, D.sub(zeta, D.one)), up_coords(Ds, s)};
            if (!check_zero_divisor(A, zd)) throw std::logic_error("bad cyclotomic witness");
            return zd;
        }
    }

    // eigenvector x with x^sigma = zeta * x, powered into the r-Sylow part
    Vec x = lagrange_resolvent(D, sigma, r, zeta);
    if (!D.is_unit(x)) return lift(must_zero_divisor(D, x));
    auto omx = detail::order_multiple(D, x);
    if (omx.is_divisor()) return lift(*omx.zd);
    u64 ex = 0;
    BigUint N1 = strip_factor(*omx.val, r, ex);
    x = D.pow_big(x, N1);
    zeta = D.pow(zeta, N1.mod(r));
    if (!(apply_map(sigma, x) == D.mul(zeta, x)))
        throw std::logic_error("eigenvector relation lost under powering");
    Vec xA = up_coords(Ds, x);

    // cyclic-algebra endgame on x, y with x*y = zeta*y*x
    for (size_t guard = 0; guard <= 64 * A.n; ++guard) {
        Vec zcur = A.pow(y, r), wcur = A.pow(xA, r);
        if (zcur == A.one) return order_r_conjugation_zerodiv(A, y, r);
        if (wcur == A.one) return order_r_conjugation_zerodiv(A, xA, r);
        auto zl = down_coords(Ds, zcur);
        auto wl = down_coords(Ds, wcur);
        if (!zl || !wl) throw std::logic_error("r-th powers escaped the maximal subalgebra");
        u64 tz = detail::r_order_exp(D, *zl, r);
        u64 tw = detail::r_order_exp(D, *wl, r);
        if (tz != tw) {
            // the shorter of w, z has an r-th root in the cyclic group of the
            // longer; dividing it out of x (resp. y) trivializes its r-th power
            bool zbig = tz > tw;
            DiscreteLog dl = discrete_log_r_elements(D, zbig ? *zl : *wl, zbig ? *wl : *zl, r);
            if (!dl.is_log) return lift(dl.zd);
            u64 rem = 0;
            BigUint sdiv = dl.s.divmod(r, rem);
            if (rem != 0) throw std::logic_error("smaller order without a divisible exponent");
            Vec u = D.pow_big(zbig ? *zl : *wl, sdiv);
            auto uinv = A.inv(up_coords(Ds, u));
            if (!uinv) throw std::logic_error("root of a unit is not a unit");
            Vec fixed = A.mul(*uinv, zbig ? xA : y);
            return order_r_conjugation_zerodiv(A, fixed, r);
        }
        // equal orders r^t: pick j with ord(w^j z) < r^t and twist y by x^j
        DiscreteLog dl = discrete_log_r_elements(D, *zl, *wl, r);
        if (!dl.is_log) return lift(dl.zd);
        u64 s = dl.s.mod(r);
        if (s == 0) throw std::logic_error("equal orders with a degenerate top layer");
        u64 j = ((r - 1) * detail::inv_mod_small(s, r)) % r;
        Vec yp = A.mul(A.pow(xA, j), y);
        Vec zp = A.pow(yp, r);
        if (zp == A.one) return order_r_conjugation_zerodiv(A, yp, r);
        auto zpl = down_coords(Ds, zp);
        if (!zpl) throw std::logic_error("twisted r-th power escaped the maximal subalgebra");
        if (detail::r_order_exp(D, *zpl, r) < tz) {
            y = std::move(yp);
            continue;
        }
        if (r != 2) throw std::logic_error("order failed to drop for an odd prime");
        // quaternion endgame: x^2 = y^2 = -1, xy = -yx
        Vec minus1 = A.smul(F.p - 1, A.one);
        if (!(wcur == minus1) || !(zcur == minus1))
            throw std::logic_error("stuck orders outside the quaternion case");
        auto [al, be] = sum_of_two_squares(F.p);
        Vec u = A.add(A.smul(al, y), A.smul(be, A.one));
        Vec xp = A.mul(u, xA);
        ZeroDivisor out{A.sub(xp, A.one), A.add(xp, A.one)};
        if (!check_zero_divisor(A, out)) throw std::logic_error("quaternion twist failed");
        return out;
    }
    throw std::logic_error("cyclic-algebra descent failed to terminate");
}

} // namespace fpalg

#endif
