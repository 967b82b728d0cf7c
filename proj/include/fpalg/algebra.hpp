#ifndef FPALG_ALGEBRA_HPP
#define FPALG_ALGEBRA_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fpalg/bigint.hpp"
#include "fpalg/field.hpp"
#include "fpalg/mat.hpp"
#include "fpalg/poly.hpp"

namespace fpalg {

// ---------------------------------------------------------------------------
// Core data model: finite-dimensional associative unital algebra over F_p
// given by structure constants. tab[(i*n+j)*n+l] is the coefficient of b_l
// in b_i * b_j. Elements are plain coefficient vectors.
// ---------------------------------------------------------------------------

struct Algebra {
    PrimeField F;
    size_t n = 0;
    std::vector<u64> tab;
    Vec one;
    bool commutative = false;

    Algebra() {}

    u64 sc(size_t i, size_t j, size_t l) const { return tab[(i * n + j) * n + l]; }

    Vec basis(size_t i) const {
        Vec v(n, 0);
        v[i] = 1;
        return v;
    }

    Vec mul(const Vec& x, const Vec& y) const {
        Vec r(n, 0);
        for (size_t i = 0; i < n; ++i) {
            if (!x[i]) continue;
            for (size_t j = 0; j < n; ++j) {
                if (!y[j]) continue;
                u64 xy = F.mul(x[i], y[j]);
                const u64* row = &tab[(i * n + j) * n];
                for (size_t l = 0; l < n; ++l)
                    if (row[l]) r[l] = F.add(r[l], F.mul(xy, row[l]));
            }
        }
        return r;
    }

    // matrix of y -> x*y
    Mat lmat(const Vec& x) const {
        Mat m(F, n, n);
        for (size_t j = 0; j < n; ++j) {
            Vec col = mul(x, basis(j));
            for (size_t i = 0; i < n; ++i) m.at(i, j) = col[i];
        }
        return m;
    }

    // matrix of y -> y*x
    Mat rmat(const Vec& x) const {
        Mat m(F, n, n);
        for (size_t j = 0; j < n; ++j) {
            Vec col = mul(basis(j), x);
            for (size_t i = 0; i < n; ++i) m.at(i, j) = col[i];
        }
        return m;
    }

    Vec pow(Vec x, u64 e) const {
        Vec r = one;
        while (e) {
            if (e & 1) r = mul(r, x);
            x = mul(x, x);
            e >>= 1;
        }
        return r;
    }

    Vec pow_big(const Vec& x, const BigUint& e) const {
        Vec r = one;
        for (size_t i = e.bit_length(); i-- > 0;) {
            r = mul(r, r);
            if (e.bit(i)) r = mul(r, x);
        }
        return r;
    }

    std::optional<Vec> inv(const Vec& x) const { return lmat(x).solve(one); }

    bool is_unit(const Vec& x) const { return inv(x).has_value(); }

    Vec add(const Vec& x, const Vec& y) const {
        Vec r(n);
        for (size_t i = 0; i < n; ++i) r[i] = F.add(x[i], y[i]);
        return r;
    }
    Vec sub(const Vec& x, const Vec& y) const {
        Vec r(n);
        for (size_t i = 0; i < n; ++i) r[i] = F.sub(x[i], y[i]);
        return r;
    }
    Vec smul(u64 s, const Vec& x) const {
        Vec r(n);
        for (size_t i = 0; i < n; ++i) r[i] = F.mul(s, x[i]);
        return r;
    }
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct RadicalNonzero : std::runtime_error {
    Vec nilpotent;
    explicit RadicalNonzero(Vec v)
        : std::runtime_error("algebra has a nonzero radical"), nilpotent(std::move(v)) {}
};

struct NoIdempotent : std::runtime_error {
    NoIdempotent() : std::runtime_error("ideal has no identity element") {}
};

// ---------------------------------------------------------------------------
// Dichotomy: the universal return shape. Either a verified zero divisor or
// the requested object.
// ---------------------------------------------------------------------------

struct ZeroDivisor {
    Vec z, w; // z*w = 0, both nonzero
};

template <class T>
struct Dichotomy {
    std::optional<ZeroDivisor> zd;
    std::optional<T> val;

    static Dichotomy divisor(ZeroDivisor d) {
        Dichotomy r;
        r.zd = std::move(d);
        return r;
    }
    static Dichotomy found(T v) {
        Dichotomy r;
        r.val = std::move(v);
        return r;
    }
    bool is_divisor() const { return zd.has_value(); }
};

inline bool check_zero_divisor(const Algebra& A, const ZeroDivisor& d) {
    return !vec_is_zero(d.z) && !vec_is_zero(d.w) && vec_is_zero(A.mul(d.z, d.w));
}

// z nonzero and with singular left multiplication: return it with a canonical
// kernel witness.
inline std::optional<ZeroDivisor> try_zero_divisor(const Algebra& A, const Vec& z) {
    if (vec_is_zero(z)) return std::nullopt;
    Mat K = A.lmat(z).kernel();
    if (K.rows == 0) return std::nullopt;
    return ZeroDivisor{z, K.row(0)};
}

inline ZeroDivisor must_zero_divisor(const Algebra& A, const Vec& z) {
    auto d = try_zero_divisor(A, z);
    if (!d) throw std::logic_error("expected zero divisor");
    return *d;
}

// ---------------------------------------------------------------------------
// Construction and validation
// ---------------------------------------------------------------------------

inline std::optional<Vec> solve_identity(const Algebra& A) {
    size_t n = A.n;
    Mat sys(A.F, 2 * n * n, n);
    Vec rhs(2 * n * n, 0);
    for (size_t j = 0; j < n; ++j) {
        Mat r = A.rmat(A.basis(j)); // e*b_j = r*e
        Mat l = A.lmat(A.basis(j)); // b_j*e = l*e
        for (size_t i = 0; i < n; ++i)
            for (size_t k = 0; k < n; ++k) {
                sys.at(j * n + i, k) = r.at(i, k);
                sys.at((n + j) * n + i, k) = l.at(i, k);
            }
        for (size_t i = 0; i < n; ++i) {
            rhs[j * n + i] = (i == j) ? 1 : 0;
            rhs[(n + j) * n + i] = (i == j) ? 1 : 0;
        }
    }
    return sys.solve(rhs);
}

inline bool table_commutative(const PrimeField&, size_t n, const std::vector<u64>& tab) {
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (size_t l = 0; l < n; ++l)
                if (tab[(i * n + j) * n + l] != tab[(j * n + i) * n + l]) return false;
    return true;
}

// Untrusted input path: verifies associativity (full scan for dim <= 32,
// deterministic stride sample above), identity, commutativity flag.
inline Algebra make_algebra(PrimeField F, size_t n, std::vector<u64> tab,
                            std::optional<Vec> one = std::nullopt, bool validate = true) {
    if (n == 0 || tab.size() != n * n * n) throw std::invalid_argument("bad structure constant table");
    for (auto& v : tab) v %= F.p;
    Algebra A;
    A.F = F;
    A.n = n;
    A.tab = std::move(tab);
    A.one = Vec(n, 0);
    A.commutative = table_commutative(F, n, A.tab);
    if (one) {
        for (auto& v : *one) v %= F.p;
        A.one = *one;
    } else {
        auto e = solve_identity(A);
        if (!e) throw std::invalid_argument("algebra has no identity element");
        A.one = *e;
    }
    if (validate) {
        size_t stride = n <= 32 ? 1 : (n * n * n) / (32 * 32 * 32) + 1;
        size_t idx = 0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                for (size_t l = 0; l < n; ++l, ++idx) {
                    if (idx % stride) continue;
                    Vec ab = A.mul(A.basis(i), A.basis(j));
                    Vec lhs = A.mul(ab, A.basis(l));
                    Vec bc = A.mul(A.basis(j), A.basis(l));
                    Vec rhs = A.mul(A.basis(i), bc);
                    if (lhs != rhs) throw std::invalid_argument("structure constants not associative");
                }
        for (size_t j = 0; j < n; ++j) {
            if (A.mul(A.one, A.basis(j)) != A.basis(j) || A.mul(A.basis(j), A.one) != A.basis(j))
                throw std::invalid_argument("claimed identity is not an identity");
        }
    }
    return A;
}

// A = F_p[x]/(f), basis 1, x, ..., x^(n-1)
inline Algebra from_polynomial(const Poly& f_in) {
    Poly f = monic(f_in);
    if (f.deg() < 1) throw std::invalid_argument("need deg >= 1");
    require_squarefree(f);
    size_t n = (size_t)f.deg();
    PrimeField F = f.F;
    // reductions of x^k for k < 2n-1
    std::vector<Poly> red(2 * n - 1);
    for (size_t k = 0; k < 2 * n - 1; ++k) red[k] = mod(Poly::xpow(F, k), f);
    Algebra A;
    A.F = F;
    A.n = n;
    A.tab.assign(n * n * n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t l = 0; l < n; ++l) A.tab[(i * n + j) * n + l] = red[i + j].coeff(l);
    A.one = A.basis(0);
    A.commutative = true;
    return A;
}

// dim-1 algebra F_p
inline Algebra base_field_algebra(PrimeField F) {
    Algebra A;
    A.F = F;
    A.n = 1;
    A.tab = {1};
    A.one = {1};
    A.commutative = true;
    return A;
}

// ---------------------------------------------------------------------------
// Minimal polynomial
// ---------------------------------------------------------------------------

inline Poly minimal_polynomial(const Algebra& A, const Vec& x) {
    // first linear dependency among 1, x, x^2, ...
    std::vector<Vec> pows{A.one};
    Vec cur = A.one;
    for (size_t k = 1; k <= A.n; ++k) {
        cur = A.mul(cur, x);
        Mat M(A.F, pows.size(), A.n);
        for (size_t i = 0; i < pows.size(); ++i)
            for (size_t j = 0; j < A.n; ++j) M.at(i, j) = pows[i][j];
        auto sol = M.transpose().solve(cur);
        if (sol) {
            Poly m(A.F);
            m.c.assign(k + 1, 0);
            m.c[k] = 1;
            for (size_t i = 0; i < k; ++i) m.c[i] = A.F.neg((*sol)[i]);
            return m;
        }
        pows.push_back(cur);
    }
    throw std::logic_error("no minimal polynomial within dimension bound");
}

inline Vec eval_at(const Algebra& A, const Poly& f, const Vec& x) {
    Vec r(A.n, 0);
    for (size_t i = f.c.size(); i-- > 0;) {
        r = A.mul(r, x);
        if (f.c[i]) r = A.add(r, A.smul(f.c[i], A.one));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Subspaces, subalgebras, ideals
// ---------------------------------------------------------------------------

// least multiplication-closed subspace containing `over`, 1 and gens
inline Mat subalgebra_generated(const Algebra& A, const std::vector<Vec>& gens, const Mat& over) {
    std::vector<Vec> rows;
    for (size_t i = 0; i < over.rows; ++i) rows.push_back(over.row(i));
    rows.push_back(A.one);
    for (auto& g : gens) rows.push_back(g);
    Mat S = echelon(Mat::from_rows(A.F, rows));
    for (;;) {
        std::vector<Vec> next;
        for (size_t i = 0; i < S.rows; ++i)
            for (size_t j = 0; j < S.rows; ++j) next.push_back(A.mul(S.row(i), S.row(j)));
        Mat S2 = S;
        for (auto& v : next) {
            Mat t(A.F, S2.rows + 1, A.n);
            std::copy(S2.a.begin(), S2.a.end(), t.a.begin());
            for (size_t j = 0; j < A.n; ++j) t.at(S2.rows, j) = v[j];
            S2 = echelon(t);
        }
        if (S2.rows == S.rows) return S2;
        S = S2;
    }
}

inline Mat span_of(const Algebra& A, const std::vector<Vec>& vs) {
    return echelon(Mat::from_rows(A.F, vs));
}

// two-sided ideal generated by z (closure under basis multiplication)
inline Mat ideal_generated(const Algebra& A, const Vec& z) {
    std::vector<Vec> rows{z};
    Mat S = echelon(Mat::from_rows(A.F, rows));
    for (;;) {
        Mat S2 = S;
        for (size_t i = 0; i < S.rows; ++i)
            for (size_t j = 0; j < A.n; ++j) {
                for (Vec v : {A.mul(S.row(i), A.basis(j)), A.mul(A.basis(j), S.row(i))}) {
                    Mat t(A.F, S2.rows + 1, A.n);
                    std::copy(S2.a.begin(), S2.a.end(), t.a.begin());
                    for (size_t k = 0; k < A.n; ++k) t.at(S2.rows, k) = v[k];
                    S2 = echelon(t);
                }
            }
        if (S2.rows == S.rows) return S2;
        S = S2;
    }
}

struct IdealRepr {
    Mat basis; // echelonized
    Vec e;     // identity of the ideal, e*A = ideal
};

// identity element of the subspace I (assumed an ideal): e in I with e*v = v
// for all basis v of I
inline std::optional<Vec> ideal_idempotent(const Algebra& A, const Mat& I) {
    if (I.rows == 0) return Vec(A.n, 0);
    size_t d = I.rows;
    // e = sum c_k I_k ; constraints e * I_i = I_i
    Mat sys(A.F, d * A.n, d);
    Vec rhs(d * A.n, 0);
    for (size_t i = 0; i < d; ++i) {
        Mat R = A.rmat(I.row(i)); // e*I_i = R*e
        for (size_t r = 0; r < A.n; ++r)
            for (size_t k = 0; k < d; ++k) {
                // column k: R * I_k
                u64 acc = 0;
                for (size_t c = 0; c < A.n; ++c)
                    acc = A.F.add(acc, A.F.mul(R.at(r, c), I.at(k, c)));
                sys.at(i * A.n + r, k) = acc;
            }
        for (size_t r = 0; r < A.n; ++r) rhs[i * A.n + r] = I.at(i, r);
    }
    auto sol = sys.solve(rhs);
    if (!sol) return std::nullopt;
    Vec e(A.n, 0);
    for (size_t k = 0; k < d; ++k)
        for (size_t j = 0; j < A.n; ++j) e[j] = A.F.add(e[j], A.F.mul((*sol)[k], I.at(k, j)));
    return e;
}

inline IdealRepr ideal_repr(const Algebra& A, const Mat& I) {
    auto e = ideal_idempotent(A, I);
    if (!e) throw NoIdempotent();
    return IdealRepr{I, *e};
}

inline IdealRepr ideal_of_element(const Algebra& A, const Vec& z) {
    return ideal_repr(A, ideal_generated(A, z));
}

// annihilator complement of the ideal e*A
inline IdealRepr complement_ideal(const Algebra& A, const Vec& e) {
    Mat K = A.lmat(e).kernel(); // {x : e*x = 0}
    Vec f = A.sub(A.one, e);
    return IdealRepr{K, f};
}

// ---------------------------------------------------------------------------
// Re-rooting: a subspace closed under multiplication with a designated unit
// becomes a standalone algebra plus the embedding of its basis.
// ---------------------------------------------------------------------------

struct SubAlg {
    Algebra alg;
    Mat emb; // rows: ambient images of the standalone basis
};

inline std::optional<Vec> down_coords(const SubAlg& S, const Vec& ambient) {
    return S.emb.transpose().solve(ambient);
}

inline Vec up_coords(const SubAlg& S, const Vec& local) {
    Vec r(S.emb.cols, 0);
    for (size_t i = 0; i < S.emb.rows; ++i)
        for (size_t j = 0; j < S.emb.cols; ++j)
            r[j] = S.alg.F.add(r[j], S.alg.F.mul(local[i], S.emb.at(i, j)));
    return r;
}

inline SubAlg induced_algebra(const Algebra& A, const Mat& basis, const Vec& unit) {
    size_t d = basis.rows;
    SubAlg S;
    S.alg.F = A.F;
    S.alg.n = d;
    S.alg.tab.assign(d * d * d, 0);
    S.emb = basis;
    Mat bt = basis.transpose();
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) {
            Vec prod = A.mul(basis.row(i), basis.row(j));
            auto c = bt.solve(prod);
            if (!c) throw std::logic_error("subspace not closed under multiplication");
            for (size_t l = 0; l < d; ++l) S.alg.tab[(i * d + j) * d + l] = (*c)[l];
        }
    auto u = bt.solve(unit);
    if (!u) throw std::logic_error("unit not inside subspace");
    S.alg.one = *u;
    S.alg.commutative = table_commutative(A.F, d, S.alg.tab);
    return S;
}

// ---------------------------------------------------------------------------
// Maps
// ---------------------------------------------------------------------------

// map given by matrix: columns are images of source basis vectors
inline Vec apply_map(const Mat& M, const Vec& x) { return M.apply(x); }

inline bool is_homomorphism(const Algebra& S, const Algebra& T, const Mat& M) {
    if (M.rows != T.n || M.cols != S.n) return false;
    if (M.apply(S.one) != T.one) return false;
    for (size_t i = 0; i < S.n; ++i) {
        Vec mi = M.apply(S.basis(i));
        for (size_t j = 0; j < S.n; ++j) {
            Vec lhs = M.apply(S.mul(S.basis(i), S.basis(j)));
            Vec rhs = T.mul(mi, M.apply(S.basis(j)));
            if (lhs != rhs) return false;
        }
    }
    return true;
}

inline bool is_automorphism(const Algebra& A, const Mat& M) {
    return is_homomorphism(A, A, M) && M.rank() == A.n;
}

inline std::optional<u64> map_order(const Algebra& A, const Mat& M, u64 cap = 1 << 20) {
    Mat id = Mat::identity(A.F, A.n);
    Mat cur = M;
    for (u64 k = 1; k <= cap; ++k) {
        if (cur == id) return k;
        cur = cur.mul(M);
    }
    return std::nullopt;
}

struct AlgebraMap {
    Mat m;
    u64 order = 0; // 0 when not an automorphism / not computed
};

// fixed subalgebra of a set of automorphisms: intersection of ker(sigma - id)
inline Mat fixed_subalgebra(const Algebra& A, const std::vector<Mat>& maps) {
    if (maps.empty()) return Mat::identity(A.F, A.n);
    Mat sys(A.F, maps.size() * A.n, A.n);
    for (size_t s = 0; s < maps.size(); ++s)
        for (size_t i = 0; i < A.n; ++i)
            for (size_t j = 0; j < A.n; ++j) {
                u64 v = maps[s].at(i, j);
                if (i == j) v = A.F.sub(v, 1);
                sys.at(s * A.n + i, j) = v;
            }
    return sys.kernel();
}

// largest two-sided ideal of A contained in the subspace S
inline Mat largest_ideal_inside(const Algebra& A, Mat S) {
    for (;;) {
        if (S.rows == 0) return S;
        Mat Kp = S.kernel(); // rows: functionals vanishing exactly on S
        Mat St = S.transpose();
        size_t d = S.rows;
        Mat sys(A.F, 2 * A.n * Kp.rows, d);
        size_t rr = 0;
        for (size_t j = 0; j < A.n; ++j) {
            Mat L = A.lmat(A.basis(j)).mul(St);
            Mat R = A.rmat(A.basis(j)).mul(St);
            for (size_t q = 0; q < Kp.rows; ++q) {
                // Kp_q . (b_j * S^T c) = 0 and Kp_q . (S^T c * b_j) = 0
                for (size_t k = 0; k < d; ++k) {
                    u64 accL = 0, accR = 0;
                    for (size_t i = 0; i < A.n; ++i) {
                        accL = A.F.add(accL, A.F.mul(Kp.at(q, i), L.at(i, k)));
                        accR = A.F.add(accR, A.F.mul(Kp.at(q, i), R.at(i, k)));
                    }
                    sys.at(rr, k) = accL;
                    sys.at(rr + 1, k) = accR;
                }
                rr += 2;
            }
        }
        sys.rows = rr;
        sys.a.resize(rr * d);
        Mat C = sys.kernel(); // coefficient vectors c
        Mat next(A.F, C.rows, A.n);
        for (size_t i = 0; i < C.rows; ++i) {
            Vec x(A.n, 0);
            for (size_t k = 0; k < d; ++k)
                for (size_t j = 0; j < A.n; ++j)
                    x[j] = A.F.add(x[j], A.F.mul(C.at(i, k), S.at(k, j)));
            for (size_t j = 0; j < A.n; ++j) next.at(i, j) = x[j];
        }
        next = echelon(next);
        if (next.rows == S.rows) return next;
        S = next;
    }
}

// ---------------------------------------------------------------------------
// Frobenius, radical, center, component sizes
// ---------------------------------------------------------------------------

inline Mat frobenius_matrix(const Algebra& A) {
    if (!A.commutative) throw std::logic_error("frobenius map needs a commutative algebra");
    Mat M(A.F, A.n, A.n);
    for (size_t j = 0; j < A.n; ++j) {
        Vec c = A.pow_big(A.basis(j), BigUint(A.F.p));
        for (size_t i = 0; i < A.n; ++i) M.at(i, j) = c[i];
    }
    return M;
}

// radical of a commutative algebra: kernel of Frob^k once p^k >= dim
inline Mat radical_commutative(const Algebra& A) {
    Mat Fr = frobenius_matrix(A);
    u64 k = 0;
    BigUint pk(1);
    while (pk.fits_u64() && pk.as_u64() < A.n) {
        pk = pk.mul(A.F.p);
        ++k;
    }
    if (k == 0) k = 1;
    return Fr.pow(k).kernel();
}

// Radical of an arbitrary algebra in characteristic p via the chain of
// charpoly-coefficient conditions: R_0 = A and
//   R_{j+1} = {x in R_j : e_{p^j}(xy) = 0 for all y in R_j},
// where e_k is the k-th elementary symmetric function of the eigenvalues of
// the regular representation. On R_j the map x -> e_{p^j}(x) is linear, so
// each step is a kernel computation; after all j with p^j <= dim the chain
// has reached the radical. (Power sums alone are blind below char = dim,
// which is why plain trace forms are not enough here.)
inline Mat radical_any(const Algebra& A) {
    size_t n = A.n;
    Mat R = Mat::identity(A.F, n);
    for (u64 pj = 1; pj <= n && R.rows > 0; pj *= A.F.p) {
        size_t d = R.rows;
        Mat sys(A.F, d, d);
        for (size_t yi = 0; yi < d; ++yi) {
            Vec y = R.row(yi);
            for (size_t k = 0; k < d; ++k) {
                std::vector<u64> chi = charpoly(A.lmat(A.mul(R.row(k), y)));
                // e_m = (-1)^m * coefficient of T^(n-m)
                u64 e = chi[n - pj];
                if (pj % 2 == 1) e = A.F.neg(e);
                sys.at(yi, k) = e;
            }
        }
        Mat C = sys.kernel();
        Mat next(A.F, C.rows, n);
        for (size_t i = 0; i < C.rows; ++i)
            for (size_t k = 0; k < d; ++k) {
                u64 c = C.at(i, k);
                if (!c) continue;
                for (size_t j = 0; j < n; ++j)
                    next.at(i, j) = A.F.add(next.at(i, j), A.F.mul(c, R.at(k, j)));
            }
        R = echelon(next);
    }
    return R;
}

inline Mat center(const Algebra& A) {
    Mat sys(A.F, A.n * A.n, A.n);
    for (size_t j = 0; j < A.n; ++j) {
        Mat l = A.lmat(A.basis(j));
        Mat r = A.rmat(A.basis(j));
        for (size_t i = 0; i < A.n; ++i)
            for (size_t k = 0; k < A.n; ++k)
                sys.at(j * A.n + i, k) = A.F.sub(r.at(i, k), l.at(i, k));
    }
    return sys.kernel();
}

// Multiset of component degrees d_i of a commutative semisimple algebra
// (A = sum of F_{p^{d_i}}), computed from fixed-space dimensions of Frobenius
// powers: dim ker(Frob^d - id) = sum_i gcd(d, d_i).
inline std::vector<u64> component_degrees(const Algebra& A) {
    if (!A.commutative) throw std::logic_error("component degrees need a commutative algebra");
    {
        Mat rad = radical_commutative(A);
        if (rad.rows != 0) throw RadicalNonzero(rad.row(0));
    }
    size_t n = A.n;
    Mat Fr = frobenius_matrix(A);
    std::vector<u64> N(n + 1, 0);
    Mat id = Mat::identity(A.F, n);
    Mat cur = Fr;
    for (size_t d = 1; d <= n; ++d) {
        Mat diff(A.F, n, n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) diff.at(i, j) = A.F.sub(cur.at(i, j), id.at(i, j));
        N[d] = diff.kernel().rows;
        cur = cur.mul(Fr);
    }
    // Euler inversion: N(d) = sum_{e|d} phi(e) C(e), C(e) = #{i : e | d_i}
    std::vector<u64> phi(n + 1, 0);
    for (u64 e = 1; e <= n; ++e) {
        phi[e] = e;
        u64 m = e;
        for (u64 q = 2; q * q <= m; ++q)
            if (m % q == 0) {
                phi[e] = phi[e] / q * (q - 1);
                while (m % q == 0) m /= q;
            }
        if (m > 1) phi[e] = phi[e] / m * (m - 1);
    }
    std::vector<long long> C(n + 1, 0);
    for (u64 d = 1; d <= n; ++d) {
        long long s = 0;
        for (u64 e = 1; e < d; ++e)
            if (d % e == 0) s += (long long)phi[e] * C[e];
        long long num = (long long)N[d] - s;
        if (num % (long long)phi[d] != 0) throw std::logic_error("component size inversion failed");
        C[d] = num / (long long)phi[d];
    }
    std::vector<long long> exact(n + 1, 0);
    for (u64 m = n; m >= 1; --m) {
        long long s = C[m];
        for (u64 e = 2 * m; e <= n; e += m) s -= exact[e];
        exact[m] = s;
        if (m == 1) break;
    }
    std::vector<u64> out;
    for (u64 m = 1; m <= n; ++m)
        for (long long c = 0; c < exact[m]; ++c) out.push_back(m);
    u64 total = 0;
    for (u64 d : out) total += d;
    if (total != n) throw std::logic_error("component degrees do not sum to dim");
    return out;
}

struct StructureAnalysis {
    Mat center;
    Mat radical;
    std::vector<u64> component_degrees; // for commutative semisimple input
};

inline StructureAnalysis structure_analysis(const Algebra& A) {
    StructureAnalysis s;
    s.center = center(A);
    s.radical = A.commutative ? radical_commutative(A) : radical_any(A);
    if (A.commutative && s.radical.rows == 0) s.component_degrees = component_degrees(A);
    return s;
}

// |A*| for commutative semisimple A, as prod (p^{d_i} - 1)
inline BigUint unit_group_order(const Algebra& A, const std::vector<u64>& degs) {
    BigUint m(1);
    for (u64 d : degs) m = m.mul(BigUint::pow_u64(A.F.p, d).sub_u64(1));
    return m;
}

// lcm of (p^{d_i} - 1): a multiple of the order of every unit
inline BigUint unit_exponent_multiple(const Algebra& A, const std::vector<u64>& degs) {
    BigUint m(1);
    for (u64 d : degs) {
        BigUint q = BigUint::pow_u64(A.F.p, d).sub_u64(1);
        // lcm(m, q) with both possibly large: m/gcd * q
        BigUint a = m, b = q;
        // binary-free gcd via repeated mod is awkward for two bigs; the degree
        // list is tiny, so do gcd by the euclidean loop on BigUint via divmod
        // against word-sized remainders when possible; otherwise multiply.
        if (b.fits_u64()) {
            m = lcm_big_u64(m, b.as_u64());
        } else if (a.fits_u64()) {
            m = lcm_big_u64(b, a.as_u64());
        } else {
            m = a.mul(b); // still a valid multiple of every unit order
        }
    }
    return m;
}

// smallest s with x^(r^s) = 1; error if not an r-element
inline std::optional<u64> r_power_order_exp(const Algebra& A, Vec x, u64 r, u64 cap = 4096) {
    for (u64 s = 0; s <= cap; ++s) {
        if (x == A.one) return s;
        x = A.pow(x, r);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Free-module coordinates and tensor squares
// ---------------------------------------------------------------------------

// x = sum_s gamma_s v_s with gamma_s in span(Bbasis); returns the gamma_s as
// ambient vectors, or nullopt when x is outside the B-span of the v_s.
inline std::optional<std::vector<Vec>> free_coords(const Algebra& A, const Mat& Bbasis,
                                                   const std::vector<Vec>& freeBasis, const Vec& x) {
    size_t m = freeBasis.size(), db = Bbasis.rows;
    Mat sys(A.F, A.n, m * db);
    for (size_t s = 0; s < m; ++s)
        for (size_t u = 0; u < db; ++u) {
            Vec col = A.mul(Bbasis.row(u), freeBasis[s]);
            for (size_t i = 0; i < A.n; ++i) sys.at(i, s * db + u) = col[i];
        }
    auto sol = sys.solve(x);
    if (!sol) return std::nullopt;
    std::vector<Vec> out(m, Vec(A.n, 0));
    for (size_t s = 0; s < m; ++s)
        for (size_t u = 0; u < db; ++u)
            for (size_t i = 0; i < A.n; ++i)
                out[s][i] = A.F.add(out[s][i], A.F.mul((*sol)[s * db + u], Bbasis.at(u, i)));
    return out;
}

struct TensorSquare {
    Algebra T;
    Mat left, right; // dim T x dim A embedding matrices
    size_t m = 0;    // free rank of A over B
    Mat Bbasis;      // ambient B basis used
};

// A tensor A over B, for A commutative and free over B with the given basis.
// The k-basis of the result is (v_s (x) v_t) * beta_u, index (s*m+t)*db+u.
inline TensorSquare tensor_square_over(const Algebra& A, const Mat& Bbasis,
                                       const std::vector<Vec>& freeBasis) {
    size_t m = freeBasis.size(), db = Bbasis.rows;
    size_t N = m * m * db;
    PrimeField F = A.F;
    // B-coordinates of all pairwise products v_s v_a
    std::vector<std::vector<Vec>> pc(m * m);
    for (size_t s = 0; s < m; ++s)
        for (size_t a = 0; a < m; ++a) {
            auto c = free_coords(A, Bbasis, freeBasis, A.mul(freeBasis[s], freeBasis[a]));
            if (!c) throw std::logic_error("claimed free basis is not spanning");
            pc[s * m + a] = *c;
        }
    Mat bt = Bbasis.transpose();
    TensorSquare TS;
    TS.m = m;
    TS.Bbasis = Bbasis;
    TS.T.F = F;
    TS.T.n = N;
    TS.T.tab.assign(N * N * N, 0);
    auto bcoords = [&](const Vec& belt) {
        auto c = bt.solve(belt);
        if (!c) throw std::logic_error("element not in B");
        return *c;
    };
    for (size_t s = 0; s < m; ++s)
        for (size_t t = 0; t < m; ++t)
            for (size_t u = 0; u < db; ++u) {
                size_t row = (s * m + t) * db + u;
                for (size_t a2 = 0; a2 < m; ++a2)
                    for (size_t b2 = 0; b2 < m; ++b2)
                        for (size_t w = 0; w < db; ++w) {
                            size_t colv = (a2 * m + b2) * db + w;
                            Vec bu_bw = A.mul(Bbasis.row(u), Bbasis.row(w));
                            for (size_t c2 = 0; c2 < m; ++c2) {
                                const Vec& gc = pc[s * m + a2][c2];
                                if (vec_is_zero(gc)) continue;
                                for (size_t d2 = 0; d2 < m; ++d2) {
                                    const Vec& dd = pc[t * m + b2][d2];
                                    if (vec_is_zero(dd)) continue;
                                    Vec coeff = A.mul(A.mul(gc, dd), bu_bw);
                                    Vec cb = bcoords(coeff);
                                    for (size_t e2 = 0; e2 < db; ++e2)
                                        if (cb[e2]) {
                                            size_t l = (c2 * m + d2) * db + e2;
                                            u64& slot = TS.T.tab[(row * N + colv) * N + l];
                                            slot = F.add(slot, cb[e2]);
                                        }
                                }
                            }
                        }
            }
    // identity: 1 (x) 1
    auto onec = free_coords(A, Bbasis, freeBasis, A.one);
    if (!onec) throw std::logic_error("identity not representable over free basis");
    std::vector<Vec> oneB(m);
    for (size_t s = 0; s < m; ++s) oneB[s] = bcoords((*onec)[s]);
    // assemble 1 (x) 1 = sum_{s,t} (o_s v_s) (x) (o_t v_t)
    Vec unit(N, 0);
    for (size_t s = 0; s < m; ++s)
        for (size_t t = 0; t < m; ++t) {
            Vec prod = A.mul((*onec)[s], (*onec)[t]); // in B
            Vec cb = bcoords(prod);
            for (size_t u = 0; u < db; ++u)
                unit[(s * m + t) * db + u] = F.add(unit[(s * m + t) * db + u], cb[u]);
        }
    TS.T.one = unit;
    TS.T.commutative = A.commutative;
    // embeddings
    TS.left = Mat(F, N, A.n);
    TS.right = Mat(F, N, A.n);
    for (size_t j = 0; j < A.n; ++j) {
        auto gc = free_coords(A, Bbasis, freeBasis, A.basis(j));
        if (!gc) throw std::logic_error("free basis does not span A");
        for (size_t s = 0; s < m; ++s)
            for (size_t t = 0; t < m; ++t) {
                Vec lc = bcoords(A.mul((*gc)[s], (*onec)[t]));
                Vec rc = bcoords(A.mul((*onec)[s], (*gc)[t]));
                for (size_t u = 0; u < db; ++u) {
                    size_t idx = (s * m + t) * db + u;
                    TS.left.at(idx, j) = F.add(TS.left.at(idx, j), lc[u]);
                    TS.right.at(idx, j) = F.add(TS.right.at(idx, j), rc[u]);
                }
            }
    }
    return TS;
}

// ---------------------------------------------------------------------------
// Primitive elements
// ---------------------------------------------------------------------------

// deterministic candidate stream: basis vectors, then pairwise sums
inline std::vector<Vec> element_candidates(const Algebra& A) {
    std::vector<Vec> out;
    for (size_t i = 0; i < A.n; ++i) out.push_back(A.basis(i));
    for (size_t i = 0; i < A.n; ++i)
        for (size_t j = i + 1; j < A.n; ++j) out.push_back(A.add(A.basis(i), A.basis(j)));
    return out;
}

// zero divisor from any element whose minimal polynomial splits
inline std::optional<ZeroDivisor> zero_divisor_from_minpoly(const Algebra& A, const Vec& x) {
    Poly m = minimal_polynomial(A, x);
    if (m.deg() < 2) return std::nullopt;
    Poly d = derivative(m);
    Poly g = d.is_zero() ? Poly::zero(m.F) : poly_gcd(m, d);
    if (g.deg() > 0 && g.deg() < m.deg()) {
        Vec z = eval_at(A, g, x);
        Vec w = eval_at(A, divexact(m, g), x);
        if (!vec_is_zero(z) && !vec_is_zero(w)) return ZeroDivisor{z, w};
    }
    if (!is_squarefree(m)) return std::nullopt;
    auto dd = distinct_degree_factorization(m);
    Poly split = Poly::zero(m.F);
    if (dd.size() >= 2) {
        split = dd[0].second;
    } else if (dd.size() == 1 && dd[0].second.deg() > (int)dd[0].first && m.F.p <= 4096) {
        // one degree class holding several irreducibles; split it exactly
        split = berlekamp_deterministic(dd[0].second)[0];
    }
    if (split.deg() > 0 && split.deg() < m.deg()) {
        Vec z = eval_at(A, split, x);
        Vec w = eval_at(A, divexact(m, split), x);
        if (!vec_is_zero(z) && !vec_is_zero(w)) return ZeroDivisor{z, w};
    }
    return std::nullopt;
}

// search the deterministic candidate stream for any zero divisor
inline std::optional<ZeroDivisor> scan_zero_divisor(const Algebra& A) {
    for (const Vec& x : element_candidates(A)) {
        auto d = zero_divisor_from_minpoly(A, x);
        if (d) return d;
    }
    return std::nullopt;
}

// alpha whose powers 1, alpha, ..., alpha^(m-1) generate A over B, or a zero
// divisor when the search instead uncovers a split
inline Dichotomy<Vec> primitive_element(const Algebra& A, const Mat& Bbasis) {
    size_t db = Bbasis.rows;
    if (A.n % db != 0) throw std::invalid_argument("dim B must divide dim A");
    size_t m = A.n / db;
    if (m == 1) return Dichotomy<Vec>::found(A.one);
    auto try_alpha = [&](const Vec& alpha) -> bool {
        std::vector<Vec> pows{A.one};
        Vec cur = A.one;
        for (size_t k = 1; k < m; ++k) {
            cur = A.mul(cur, alpha);
            pows.push_back(cur);
        }
        // the B-span of the powers must be all of A
        std::vector<Vec> rows;
        for (auto& pw : pows)
            for (size_t u = 0; u < db; ++u) rows.push_back(A.mul(Bbasis.row(u), pw));
        return echelon(Mat::from_rows(A.F, rows)).rows == A.n;
    };
    std::vector<Vec> cands = element_candidates(A);
    for (auto& alpha : cands)
        if (try_alpha(alpha)) return Dichotomy<Vec>::found(alpha);
    // no primitive element among candidates: surface a split instead
    for (auto& alpha : cands) {
        auto d = zero_divisor_from_minpoly(A, alpha);
        if (d) return Dichotomy<Vec>::divisor(*d);
    }
    throw std::logic_error("primitive element search exhausted");
}

} // namespace fpalg

#endif
