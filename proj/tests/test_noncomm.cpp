#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fpalg/noncomm.hpp"

using namespace fpalg;

namespace {

// full matrix algebra M_m(F_p), basis e_{ij} at index i*m+j
Algebra matrix_algebra(PrimeField F, size_t m) {
    size_t n = m * m;
    std::vector<u64> tab(n * n * n, 0);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j)
            for (size_t k = 0; k < m; ++k)
                for (size_t l = 0; l < m; ++l)
                    if (j == k) tab[((i * m + j) * n + (k * m + l)) * n + (i * m + l)] = 1;
    Vec one(n, 0);
    for (size_t i = 0; i < m; ++i) one[i * m + i] = 1;
    return make_algebra(F, n, std::move(tab), one);
}

Algebra upper_triangular2(PrimeField F) {
    size_t n = 3; // basis e11, e12, e22
    std::vector<u64> tab(n * n * n, 0);
    auto set = [&](size_t i, size_t j, size_t l) { tab[(i * n + j) * n + l] = 1; };
    set(0, 0, 0);
    set(0, 1, 1);
    set(1, 2, 1);
    set(2, 2, 2);
    return make_algebra(F, n, std::move(tab), Vec{1, 0, 1});
}

// quaternion presentation: basis {1, i, j, k}, i^2 = j^2 = -1, ij = k = -ji
Algebra quaternions(PrimeField F) {
    size_t n = 4;
    std::vector<u64> tab(n * n * n, 0);
    auto set = [&](size_t i, size_t j, size_t l, long long c) {
        tab[(i * n + j) * n + l] = F.reduce(c);
    };
    set(0, 0, 0, 1); set(0, 1, 1, 1); set(0, 2, 2, 1); set(0, 3, 3, 1);
    set(1, 0, 1, 1); set(1, 1, 0, -1); set(1, 2, 3, 1); set(1, 3, 2, -1);
    set(2, 0, 2, 1); set(2, 1, 3, -1); set(2, 2, 0, -1); set(2, 3, 1, 1);
    set(3, 0, 3, 1); set(3, 1, 2, 1); set(3, 2, 1, -1); set(3, 3, 0, -1);
    return make_algebra(F, n, std::move(tab), Vec{1, 0, 0, 0});
}

Algebra tensor_algebra(const Algebra& A, const Algebra& B) {
    size_t n = A.n * B.n;
    std::vector<u64> tab(n * n * n, 0);
    for (size_t i1 = 0; i1 < A.n; ++i1)
        for (size_t j1 = 0; j1 < B.n; ++j1)
            for (size_t i2 = 0; i2 < A.n; ++i2)
                for (size_t j2 = 0; j2 < B.n; ++j2)
                    for (size_t l1 = 0; l1 < A.n; ++l1)
                        for (size_t l2 = 0; l2 < B.n; ++l2) {
                            u64 c = A.F.mul(A.sc(i1, i2, l1), B.sc(j1, j2, l2));
                            if (c)
                                tab[((i1 * B.n + j1) * n + (i2 * B.n + j2)) * n +
                                    (l1 * B.n + l2)] = c;
                        }
    Vec one(n, 0);
    for (size_t l1 = 0; l1 < A.n; ++l1)
        for (size_t l2 = 0; l2 < B.n; ++l2)
            one[l1 * B.n + l2] = A.F.mul(A.one[l1], B.one[l2]);
    return make_algebra(A.F, n, std::move(tab), one);
}

// direct sum with block-diagonal structure constants
Algebra direct_sum(const Algebra& A, const Algebra& B) {
    size_t n = A.n + B.n;
    std::vector<u64> tab(n * n * n, 0);
    for (size_t i = 0; i < A.n; ++i)
        for (size_t j = 0; j < A.n; ++j)
            for (size_t l = 0; l < A.n; ++l) tab[(i * n + j) * n + l] = A.sc(i, j, l);
    for (size_t i = 0; i < B.n; ++i)
        for (size_t j = 0; j < B.n; ++j)
            for (size_t l = 0; l < B.n; ++l)
                tab[((A.n + i) * n + (A.n + j)) * n + (A.n + l)] = B.sc(i, j, l);
    Vec one(n, 0);
    for (size_t l = 0; l < A.n; ++l) one[l] = A.one[l];
    for (size_t l = 0; l < B.n; ++l) one[A.n + l] = B.one[l];
    return make_algebra(A.F, n, std::move(tab), one);
}

Algebra disguise(const Algebra& A, u64 seed) {
    std::mt19937_64 rng(seed);
    PrimeField F = A.F;
    Mat T(F, A.n, A.n);
    for (;;) {
        for (size_t i = 0; i < A.n; ++i)
            for (size_t j = 0; j < A.n; ++j) T.at(i, j) = rng() % F.p;
        if (T.inverse()) break;
    }
    Mat Ti = *T.inverse();
    std::vector<u64> tab(A.n * A.n * A.n, 0);
    for (size_t i = 0; i < A.n; ++i)
        for (size_t j = 0; j < A.n; ++j) {
            Vec loc = Ti.apply(A.mul(T.apply(A.basis(i)), T.apply(A.basis(j))));
            for (size_t l = 0; l < A.n; ++l) tab[(i * A.n + j) * A.n + l] = loc[l];
        }
    return make_algebra(F, A.n, std::move(tab), Ti.apply(A.one));
}

} // namespace

TEST_CASE("matrix algebras preprocess to their known shape") {
    PrimeField F(5);
    Algebra A = matrix_algebra(F, 2);
    auto pre = preprocess(A);
    REQUIRE(!pre.is_divisor());
    REQUIRE(pre.val->Crows.rows == 1);
    REQUIRE(pre.val->m == 2);
    // the center is the scalar line
    REQUIRE(subspace_contains(pre.val->Crows, A.one));
}

TEST_CASE("a nonzero radical short-circuits preprocessing") {
    PrimeField F(5);
    Algebra A = upper_triangular2(F);
    auto pre = preprocess(A);
    REQUIRE(pre.is_divisor());
    REQUIRE(check_zero_divisor(A, *pre.zd));
    // the witness is nilpotent: its left multiplication is singular
    REQUIRE(A.lmat(pre.zd->z).kernel().rows > 0);
}

TEST_CASE("unequal matrix blocks are caught by the freeness test") {
    PrimeField F(5);
    Algebra A = direct_sum(matrix_algebra(F, 2), matrix_algebra(F, 3));
    auto pre = preprocess(A);
    REQUIRE(pre.is_divisor());
    REQUIRE(check_zero_divisor(A, *pre.zd));
}

TEST_CASE("commutative input is rejected up front") {
    PrimeField F(5);
    Algebra A = from_polynomial(Poly(F, {3, 0, 1}));
    REQUIRE_THROWS_AS(preprocess(A), CommutativeInput);
}

TEST_CASE("the greedy maximal subalgebra is self-centralizing of full rank") {
    for (u64 p : {5, 7, 11, 13}) {
        PrimeField F(p);
        for (size_t m : {2, 3}) {
            Algebra A = matrix_algebra(F, m);
            auto pre = preprocess(A);
            REQUIRE(!pre.is_divisor());
            auto d = max_comm_semisimple(A, *pre.val);
            REQUIRE(!d.is_divisor());
            REQUIRE(d.val->rows == m * pre.val->Crows.rows);
            REQUIRE(detail::centralizer(A, *d.val) == *d.val);
        }
    }
}

TEST_CASE("a maximal subalgebra over a quadratic center") {
    PrimeField F(7);
    Algebra A = tensor_algebra(matrix_algebra(F, 2), from_polynomial(Poly(F, {4, 0, 1})));
    auto pre = preprocess(A);
    REQUIRE(!pre.is_divisor());
    REQUIRE(pre.val->Crows.rows == 2);
    REQUIRE(pre.val->m == 2);
    auto d = max_comm_semisimple(A, *pre.val);
    REQUIRE(!d.is_divisor());
    REQUIRE(d.val->rows == 4);
    REQUIRE(detail::centralizer(A, *d.val) == *d.val);
}

TEST_CASE("the identity automorphism conjugates by the identity") {
    PrimeField F(7);
    Algebra A = quaternions(F);
    // B = k[i], sigma = id
    Mat Brows = echelon(Mat::from_rows(F, {A.one, A.basis(1)}));
    auto d = conjugator(A, Brows, Mat::identity(F, 2));
    REQUIRE(!d.is_divisor());
    REQUIRE(*d.val == A.one);
}

TEST_CASE("conjugating the diagonal swap gives a permutation-like element") {
    PrimeField F(7);
    Algebra A = matrix_algebra(F, 2);
    Mat Brows = echelon(Mat::from_rows(F, {A.basis(0), A.basis(3)})); // e11, e22
    Mat swap(F, 2, 2);
    swap.at(0, 1) = 1;
    swap.at(1, 0) = 1;
    auto d = conjugator(A, Brows, swap);
    REQUIRE(!d.is_divisor());
    Vec y = *d.val;
    REQUIRE(A.is_unit(y));
    SubAlg B = induced_algebra(A, Brows, A.one);
    for (size_t i = 0; i < 2; ++i) {
        Vec b = Brows.row(i);
        Vec bs = up_coords(B, apply_map(swap, B.alg.basis(i)));
        REQUIRE(A.mul(y, bs) == A.mul(b, y));
    }
}

TEST_CASE("a singular solution of the conjugation system is itself the divisor") {
    PrimeField F(7);
    Algebra A = matrix_algebra(F, 2);
    // B = scalars, sigma = id: every matrix solves the system, but the
    // enumerated candidates (unit vectors and their sum) are all singular
    Mat Brows = echelon(Mat::from_rows(F, {A.one}));
    auto d = conjugator(A, Brows, Mat::identity(F, 1));
    REQUIRE(d.is_divisor());
    REQUIRE(check_zero_divisor(A, *d.zd));
}

TEST_CASE("an order-two conjugation yields the telescoping divisor pair") {
    PrimeField F(7);
    Algebra A = matrix_algebra(F, 2);
    Vec y = A.add(A.basis(1), A.basis(2)); // e12 + e21, swaps the idempotents
    REQUIRE(A.pow(y, 2) == A.one);
    ZeroDivisor zd = order_r_conjugation_zerodiv(A, y, 2);
    REQUIRE(check_zero_divisor(A, zd));
    REQUIRE(zd.z == A.sub(y, A.one));
    REQUIRE(zd.w == A.add(y, A.one));
    // minimal polynomial is exactly X^2 - 1
    Poly mp = minimal_polynomial(A, y);
    REQUIRE(mp.deg() == 2);
    REQUIRE(mp.coeff(0) == F.p - 1);
    REQUIRE(mp.coeff(1) == 0);
}

TEST_CASE("sums of two squares hit minus one") {
    for (u64 p : {5, 7, 11, 13, 17, 97, 101}) {
        PrimeField F(p);
        auto [al, be] = sum_of_two_squares(p);
        REQUIRE(F.add(F.add(F.mul(al, al), F.mul(be, be)), 1) == 0);
    }
    // spot values from a direct scan
    REQUIRE(sum_of_two_squares(13) == std::pair<u64, u64>{0, 5}); // 5^2 = 25 = -1
    REQUIRE(sum_of_two_squares(7) == std::pair<u64, u64>{2, 3});  // 4 + 9 = 13 = -1
}

TEST_CASE("order multiples cover the unit order") {
    PrimeField F(7);
    Algebra A = matrix_algebra(F, 2);
    Vec y = A.add(A.basis(1), A.basis(2));
    auto om = detail::order_multiple(A, y);
    REQUIRE(!om.is_divisor());
    REQUIRE(A.pow_big(y, *om.val) == A.one);
    // a unipotent element has a repeated minimal polynomial factor
    Vec u = A.add(A.one, A.basis(1));
    auto om2 = detail::order_multiple(A, u);
    REQUIRE(om2.is_divisor());
    REQUIRE(check_zero_divisor(A, *om2.zd));
}

TEST_CASE("zero divisors in plain matrix algebras") {
    for (u64 p : {5, 7, 11, 13}) {
        PrimeField F(p);
        for (size_t m : {2, 3}) {
            Algebra A = matrix_algebra(F, m);
            ZeroDivisor zd = find_zero_divisor(A);
            REQUIRE(check_zero_divisor(A, zd));
            REQUIRE(A.lmat(zd.z).kernel().rows > 0);
        }
    }
}

TEST_CASE("zero divisors survive seeded basis disguises") {
    for (u64 p : {5, 7, 11, 13}) {
        PrimeField F(p);
        for (size_t m : {2, 3}) {
            Algebra A = matrix_algebra(F, m);
            for (u64 seed = 1; seed <= 4; ++seed) {
                Algebra Ad = disguise(A, seed * 1000 + p * 10 + m);
                ZeroDivisor zd = find_zero_divisor(Ad);
                REQUIRE(check_zero_divisor(Ad, zd));
            }
        }
    }
}

TEST_CASE("quaternion presentations split") {
    for (u64 p : {5, 7, 11, 13}) {
        PrimeField F(p);
        Algebra Q = quaternions(F);
        ZeroDivisor zd = find_zero_divisor(Q);
        REQUIRE(check_zero_divisor(Q, zd));
        for (u64 seed = 1; seed <= 3; ++seed) {
            Algebra Qd = disguise(Q, 77 * p + seed);
            ZeroDivisor zd2 = find_zero_divisor(Qd);
            REQUIRE(check_zero_divisor(Qd, zd2));
        }
    }
}

TEST_CASE("matrix blocks over a larger center are handled") {
    PrimeField F(7);
    Algebra A = tensor_algebra(matrix_algebra(F, 2), from_polynomial(Poly(F, {4, 0, 1})));
    ZeroDivisor zd = find_zero_divisor(A);
    REQUIRE(check_zero_divisor(A, zd));
    Algebra As = tensor_algebra(matrix_algebra(F, 2), from_polynomial(Poly(F, {6, 0, 1})));
    ZeroDivisor zd2 = find_zero_divisor(As);
    REQUIRE(check_zero_divisor(As, zd2));
    for (u64 seed = 1; seed <= 3; ++seed) {
        Algebra Ad = disguise(A, 31 * seed);
        ZeroDivisor zd3 = find_zero_divisor(Ad);
        REQUIRE(check_zero_divisor(Ad, zd3));
    }
}
