#ifndef FPALG_MAT_HPP
#define FPALG_MAT_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fpalg/field.hpp"

namespace fpalg {

using Vec = std::vector<u64>;

// Dense row-major matrix over F_p. All entries stay reduced in [0, p).
struct Mat {
    PrimeField F;
    size_t rows = 0, cols = 0;
    std::vector<u64> a;

    Mat() {}
    Mat(PrimeField F_, size_t r, size_t c) : F(F_), rows(r), cols(c), a(r * c, 0) {}

    u64& at(size_t i, size_t j) { return a[i * cols + j]; }
    u64 at(size_t i, size_t j) const { return a[i * cols + j]; }

    static Mat identity(PrimeField F, size_t n) {
        Mat m(F, n, n);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    static Mat from_rows(PrimeField F, const std::vector<Vec>& rows_) {
        size_t c = rows_.empty() ? 0 : rows_[0].size();
        Mat m(F, rows_.size(), c);
        for (size_t i = 0; i < rows_.size(); ++i) {
            if (rows_[i].size() != c) throw std::invalid_argument("ragged rows");
            for (size_t j = 0; j < c; ++j) m.at(i, j) = rows_[i][j] % F.p;
        }
        return m;
    }

    Vec row(size_t i) const { return Vec(a.begin() + i * cols, a.begin() + (i + 1) * cols); }

    bool operator==(const Mat& o) const {
        return rows == o.rows && cols == o.cols && a == o.a && F.p == o.F.p;
    }

    Mat mul(const Mat& o) const {
        if (cols != o.rows) throw std::invalid_argument("matrix product shape mismatch");
        Mat r(F, rows, o.cols);
        for (size_t i = 0; i < rows; ++i)
            for (size_t k = 0; k < cols; ++k) {
                u64 v = at(i, k);
                if (!v) continue;
                for (size_t j = 0; j < o.cols; ++j)
                    r.at(i, j) = F.add(r.at(i, j), F.mul(v, o.at(k, j)));
            }
        return r;
    }

    Vec apply(const Vec& x) const {
        if (x.size() != cols) throw std::invalid_argument("matrix-vector shape mismatch");
        Vec r(rows, 0);
        for (size_t i = 0; i < rows; ++i) {
            u128 acc = 0;
            for (size_t j = 0; j < cols; ++j) {
                acc += (u128)at(i, j) * x[j];
                if ((j & 15) == 15) acc %= F.p;
            }
            r[i] = (u64)(acc % F.p);
        }
        return r;
    }

    Mat transpose() const {
        Mat r(F, cols, rows);
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    // In-place reduced row-echelon form; returns pivot column list.
    std::vector<size_t> rref() {
        std::vector<size_t> pivots;
        size_t r = 0;
        for (size_t c = 0; c < cols && r < rows; ++c) {
            size_t piv = r;
            while (piv < rows && at(piv, c) == 0) ++piv;
            if (piv == rows) continue;
            if (piv != r)
                for (size_t j = 0; j < cols; ++j) std::swap(at(piv, j), at(r, j));
            u64 inv = F.inv(at(r, c));
            for (size_t j = c; j < cols; ++j) at(r, j) = F.mul(at(r, j), inv);
            for (size_t i = 0; i < rows; ++i) {
                if (i == r) continue;
                u64 f = at(i, c);
                if (!f) continue;
                for (size_t j = c; j < cols; ++j)
                    at(i, j) = F.sub(at(i, j), F.mul(f, at(r, j)));
            }
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    size_t rank() const {
        Mat t = *this;
        return t.rref().size();
    }

    // Canonical basis of {v : Mv = 0}, one row per free column, in RREF.
    Mat kernel() const {
        Mat R = *this;
        std::vector<size_t> piv = R.rref();
        std::vector<bool> is_piv(cols, false);
        for (size_t c : piv) is_piv[c] = true;
        Mat K(F, cols - piv.size(), cols);
        size_t k = 0;
        for (size_t c = 0; c < cols; ++c) {
            if (is_piv[c]) continue;
            K.at(k, c) = 1;
            for (size_t i = 0; i < piv.size(); ++i)
                K.at(k, piv[i]) = F.neg(R.at(i, c));
            ++k;
        }
        K.rref();
        return K;
    }

    // Some x with Mx = b (free variables zero), or nullopt.
    std::optional<Vec> solve(const Vec& b) const {
        if (b.size() != rows) throw std::invalid_argument("solve shape mismatch");
        Mat aug(F, rows, cols + 1);
        for (size_t i = 0; i < rows; ++i) {
            for (size_t j = 0; j < cols; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, cols) = b[i];
        }
        std::vector<size_t> piv = aug.rref();
        if (!piv.empty() && piv.back() == cols) return std::nullopt;
        Vec x(cols, 0);
        for (size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug.at(i, cols);
        return x;
    }

    std::optional<Mat> inverse() const {
        if (rows != cols) return std::nullopt;
        Mat aug(F, rows, 2 * cols);
        for (size_t i = 0; i < rows; ++i) {
            for (size_t j = 0; j < cols; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, cols + i) = 1;
        }
        std::vector<size_t> piv = aug.rref();
        if (piv.size() != rows || piv.back() != rows - 1) return std::nullopt;
        Mat inv(F, rows, cols);
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) inv.at(i, j) = aug.at(i, cols + j);
        return inv;
    }

    Mat pow(u64 e) const {
        Mat r = identity(F, rows), b = *this;
        while (e) {
            if (e & 1) r = r.mul(b);
            b = b.mul(b);
            e >>= 1;
        }
        return r;
    }
};

// characteristic polynomial (monic, ascending coefficients) via Hessenberg
// reduction; valid over any F_p
inline std::vector<u64> charpoly(Mat M) {
    if (M.rows != M.cols) throw std::invalid_argument("charpoly needs a square matrix");
    size_t n = M.rows;
    const PrimeField F = M.F;
    // similarity reduction to upper Hessenberg form
    for (size_t j = 0; j + 2 < n; ++j) {
        size_t piv = j + 1;
        while (piv < n && M.at(piv, j) == 0) ++piv;
        if (piv == n) continue;
        if (piv != j + 1) {
            for (size_t k = 0; k < n; ++k) std::swap(M.at(piv, k), M.at(j + 1, k));
            for (size_t k = 0; k < n; ++k) std::swap(M.at(k, piv), M.at(k, j + 1));
        }
        u64 inv = F.inv(M.at(j + 1, j));
        for (size_t i = j + 2; i < n; ++i) {
            u64 f = F.mul(M.at(i, j), inv);
            if (!f) continue;
            for (size_t k = 0; k < n; ++k) M.at(i, k) = F.sub(M.at(i, k), F.mul(f, M.at(j + 1, k)));
            for (size_t k = 0; k < n; ++k) M.at(k, j + 1) = F.add(M.at(k, j + 1), F.mul(f, M.at(k, i)));
        }
    }
    // recurrence over leading principal minors of T*I - H
    std::vector<std::vector<u64>> p(n + 1);
    p[0] = {1};
    for (size_t k = 1; k <= n; ++k) {
        // p_k = (T - H[k-1][k-1]) p_{k-1} - sum_m H[k-1-m][k-1] (prod subdiag) p_{k-1-m}
        std::vector<u64> cur(k + 1, 0);
        for (size_t i = 0; i < p[k - 1].size(); ++i) {
            cur[i + 1] = F.add(cur[i + 1], p[k - 1][i]);
            cur[i] = F.sub(cur[i], F.mul(M.at(k - 1, k - 1), p[k - 1][i]));
        }
        u64 prod = 1;
        for (size_t m = 1; m < k; ++m) {
            prod = F.mul(prod, M.at(k - m, k - m - 1));
            if (!prod) break;
            u64 c = F.mul(M.at(k - 1 - m, k - 1), prod);
            if (!c) continue;
            for (size_t i = 0; i < p[k - 1 - m].size(); ++i)
                cur[i] = F.sub(cur[i], F.mul(c, p[k - 1 - m][i]));
        }
        p[k] = std::move(cur);
    }
    return p[n];
}

// ---- row-space (subspace) helpers -----------------------------------------
//
// A subspace of F_p^n is a Mat whose rows form a basis in reduced
// row-echelon form; equal subspaces have byte-identical representations.

inline Mat echelon(Mat m) {
    std::vector<size_t> piv = m.rref();
    m.rows = piv.size();
    m.a.resize(m.rows * m.cols);
    return m;
}

inline Mat subspace_sum(const Mat& u, const Mat& w) {
    if (u.cols != w.cols || u.F.p != w.F.p) throw std::invalid_argument("subspace ambient mismatch");
    Mat s(u.F, u.rows + w.rows, u.cols);
    std::copy(u.a.begin(), u.a.end(), s.a.begin());
    std::copy(w.a.begin(), w.a.end(), s.a.begin() + u.a.size());
    return echelon(s);
}

// u must be a basis (independent rows); rank does not grow iff v lies in the
// row space.
inline bool subspace_contains(const Mat& u, const Vec& v) {
    Mat s(u.F, u.rows + 1, u.cols);
    std::copy(u.a.begin(), u.a.end(), s.a.begin());
    for (size_t j = 0; j < u.cols; ++j) s.at(u.rows, j) = v[j] % u.F.p;
    return s.rank() == u.rows;
}

// coordinates of v in the row basis of u, if representable
inline std::optional<Vec> coords_in_basis(const Mat& u, const Vec& v) {
    return u.transpose().solve(v);
}

inline Mat subspace_intersection(const Mat& u, const Mat& w) {
    if (u.cols != w.cols || u.F.p != w.F.p) throw std::invalid_argument("subspace ambient mismatch");
    // left kernel of the stacked basis gives the relations x*U = y*W
    Mat s(u.F, u.rows + w.rows, u.cols);
    std::copy(u.a.begin(), u.a.end(), s.a.begin());
    std::copy(w.a.begin(), w.a.end(), s.a.begin() + u.a.size());
    Mat rel = s.transpose().kernel();
    Mat out(u.F, rel.rows, u.cols);
    for (size_t i = 0; i < rel.rows; ++i)
        for (size_t k = 0; k < u.rows; ++k) {
            u64 c = rel.at(i, k);
            if (!c) continue;
            for (size_t j = 0; j < u.cols; ++j)
                out.at(i, j) = u.F.add(out.at(i, j), u.F.mul(c, u.at(k, j)));
        }
    return echelon(out);
}

inline bool vec_is_zero(const Vec& v) {
    for (u64 x : v) if (x) return false;
    return true;
}

} // namespace fpalg

#endif
