#ifndef FPALG_ZERODIV_HPP
#define FPALG_ZERODIV_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "fpalg/algebra.hpp"
#include "fpalg/bigint.hpp"

namespace fpalg {

struct OrderViolation : std::runtime_error {
    OrderViolation() : std::runtime_error("order of a is smaller than order of b") {}
};

// Outcome of the discrete log attempt for r-elements. On the log arm,
// a^s = b. Otherwise a^s - b^sp is the recorded zero divisor.
struct DiscreteLog {
    bool is_log = false;
    BigUint s, sp;
    ZeroDivisor zd;
};

namespace detail {

// smallest t with x^(r^t) = 1, or a zero divisor x^(r^t) - 1 on the way up
inline std::optional<u64> r_order_exponent(const Algebra& A, const Vec& x, u64 r,
                                           DiscreteLog& out, bool x_is_a) {
    Vec cur = x;
    for (u64 t = 0;; ++t) {
        Vec diff = A.sub(cur, A.one);
        if (vec_is_zero(diff)) return t;
        if (auto d = try_zero_divisor(A, diff)) {
            // diff = x^(r^t) - 1; cast as a^s - b^sp
            out.is_log = false;
            out.zd = *d;
            if (x_is_a) {
                out.s = BigUint::pow_u64(r, t);
                out.sp = BigUint(0);
            } else {
                // 1 - b^(r^t) is the negated divisor, same annihilator
                out.s = BigUint(0);
                out.sp = BigUint::pow_u64(r, t);
                out.zd.z = A.sub(A.one, cur);
            }
            return std::nullopt;
        }
        if (t > 64 * A.n) throw std::invalid_argument("element is not an r-element");
        cur = A.pow(cur, r);
    }
}

} // namespace detail

// Pohlig-Hellman digit recovery with the equality test replaced by a
// zero-divisor test. A must be commutative semisimple, a and b units of
// r-power order with ord(a) >= ord(b).
inline DiscreteLog discrete_log_r_elements(const Algebra& A, const Vec& a, const Vec& b,
                                           u64 r) {
    if (A.F.p % r == 0) throw std::invalid_argument("r must differ from the characteristic");
    DiscreteLog out;
    auto ta = detail::r_order_exponent(A, a, r, out, true);
    if (!ta) return out;
    auto tb = detail::r_order_exponent(A, b, r, out, false);
    if (!tb) return out;
    if (*ta < *tb) throw OrderViolation();
    // align orders: work with a^(r^(ta-tb)), fold the shift back in at the end
    BigUint shift = BigUint::pow_u64(r, *ta - *tb);
    Vec a0 = A.pow_big(a, shift);
    u64 t = *tb;

    BigUint s(0);
    for (u64 j = 0; j < t; ++j) {
        BigUint E = BigUint::pow_u64(r, t - j - 1);
        Vec bE = A.pow_big(b, E);
        BigUint step = BigUint::pow_u64(r, j);
        // first pass: an exact digit keeps the loop alive
        bool exact = false;
        for (u64 d = 0; d < r && !exact; ++d) {
            BigUint cand = s.add(step.mul(d));
            Vec diff = A.sub(A.pow_big(A.pow_big(a0, cand), E), bE);
            if (vec_is_zero(diff)) {
                s = cand;
                exact = true;
            }
        }
        if (exact) continue;
        // second pass: settle for a zero-divisor difference
        for (u64 d = 0; d < r; ++d) {
            BigUint cand = s.add(step.mul(d));
            Vec diff = A.sub(A.pow_big(A.pow_big(a0, cand), E), bE);
            if (auto zd = try_zero_divisor(A, diff)) {
                out.is_log = false;
                out.s = cand.mul(E).mul(shift);
                out.sp = E;
                out.zd = *zd;
                return out;
            }
        }
        throw std::logic_error("digit search failed; input not semisimple?");
    }
    out.is_log = true;
    out.s = s.mul(shift);
    out.sp = BigUint(0);
    return out;
}

// ---------------------------------------------------------------------------
// Free bases of modules
// ---------------------------------------------------------------------------

// Greedy free-basis construction for the A-module V spanned by the orbit of
// the generators. The action maps (element of A, vector in the ambient space)
// to a vector. When V is not free the linear algebra surfaces a nonzero
// non-unit coefficient, i.e. a zero divisor of A.
template <class Action>
inline Dichotomy<std::vector<Vec>> free_basis_or_zero_divisor(const Algebra& A, size_t ambient,
                                                              Action&& act,
                                                              const std::vector<Vec>& gens) {
    // k-span of the module generated by gens: one sweep of basis actions
    std::vector<Vec> rows;
    for (const Vec& g : gens) {
        rows.push_back(g);
        for (size_t i = 0; i < A.n; ++i) rows.push_back(act(A.basis(i), g));
    }
    Mat V = echelon(Mat::from_rows(A.F, rows));

    std::vector<Vec> basis;
    Mat cur(A.F, 0, ambient); // k-span of the A-module generated by basis
    while (cur.rows < V.rows) {
        // first spanning row outside the current module
        Vec v;
        for (size_t i = 0; i < V.rows; ++i)
            if (cur.rows == 0 || !subspace_contains(cur, V.row(i))) {
                v = V.row(i);
                break;
            }
        // solve x.v in cur with unknowns (x, combination coefficients)
        Mat sys(A.F, ambient, A.n + cur.rows);
        for (size_t j = 0; j < A.n; ++j) {
            Vec col = act(A.basis(j), v);
            for (size_t i = 0; i < ambient; ++i) sys.at(i, j) = col[i];
        }
        for (size_t kk = 0; kk < cur.rows; ++kk)
            for (size_t i = 0; i < ambient; ++i) sys.at(i, A.n + kk) = cur.at(kk, i);
        Mat K = sys.kernel();
        for (size_t i = 0; i < K.rows; ++i) {
            Vec kr = K.row(i);
            Vec x(kr.begin(), kr.begin() + A.n);
            if (!vec_is_zero(x)) return Dichotomy<std::vector<Vec>>::divisor(must_zero_divisor(A, x));
        }
        basis.push_back(v);
        std::vector<Vec> ext;
        for (size_t i = 0; i < cur.rows; ++i) ext.push_back(cur.row(i));
        for (size_t j = 0; j < A.n; ++j) ext.push_back(act(A.basis(j), v));
        cur = echelon(Mat::from_rows(A.F, ext));
    }
    return Dichotomy<std::vector<Vec>>::found(std::move(basis));
}

// A acting on itself by multiplication, restricted to nothing: the module is
// the ideal (or all of A) generated by gens.
inline Dichotomy<std::vector<Vec>> free_basis_or_zero_divisor(const Algebra& A,
                                                              const std::vector<Vec>& gens) {
    return free_basis_or_zero_divisor(
        A, A.n, [&](const Vec& x, const Vec& v) { return A.mul(x, v); }, gens);
}

// ---------------------------------------------------------------------------
// Invariant ideal decompositions
// ---------------------------------------------------------------------------

namespace detail {

inline bool ideal_less(const IdealRepr& a, const IdealRepr& b) {
    if (a.basis.rows != b.basis.rows) return a.basis.rows < b.basis.rows;
    return a.e < b.e;
}

} // namespace detail

// Refine a pairwise-orthogonal ideal decomposition until the group generated
// by the given automorphisms permutes its members. Each round replaces some
// ideal by the pair (I cap I^sigma, complement within I) via the idempotent
// product e * e^sigma, so the total number of rounds is at most dim A.
inline std::vector<IdealRepr> refine_invariant_decomposition(const Algebra& A,
                                                             const std::vector<Mat>& gamma,
                                                             std::vector<IdealRepr> parts) {
    for (bool changed = true; changed;) {
        changed = false;
        for (const Mat& sig : gamma) {
            for (size_t i = 0; i < parts.size() && !changed; ++i) {
                Vec f = apply_map(sig, parts[i].e); // image idempotent
                // f must be a sum of current idempotents; find a part it cuts
                for (size_t j = 0; j < parts.size() && !changed; ++j) {
                    Vec q = A.mul(parts[j].e, f);
                    if (vec_is_zero(q) || q == parts[j].e) continue;
                    // q is a proper idempotent inside part j: split it
                    IdealRepr lo = ideal_of_element(A, q);
                    IdealRepr hi = ideal_of_element(A, A.sub(parts[j].e, q));
                    parts.erase(parts.begin() + j);
                    parts.push_back(std::move(lo));
                    parts.push_back(std::move(hi));
                    changed = true;
                }
            }
        }
    }
    std::sort(parts.begin(), parts.end(), detail::ideal_less);
    return parts;
}

} // namespace fpalg

#endif
