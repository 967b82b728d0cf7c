#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fpalg/poly.hpp"
#include "fpalg/zerodiv.hpp"

using namespace fpalg;

namespace {

// split semisimple algebra F_p^m with componentwise multiplication
Algebra diagonal_algebra(PrimeField F, size_t m) {
    std::vector<u64> tab(m * m * m, 0);
    for (size_t i = 0; i < m; ++i) tab[(i * m + i) * m + i] = 1;
    return make_algebra(F, m, std::move(tab), Vec(m, 1));
}

Mat perm_matrix(PrimeField F, const std::vector<size_t>& perm) {
    Mat M(F, perm.size(), perm.size());
    for (size_t j = 0; j < perm.size(); ++j) M.at(perm[j], j) = 1;
    return M;
}

// some unit of r-power order, by stripping the non-r part of the exponent
std::optional<Vec> random_r_element(const Algebra& A, const BigUint& expmult, u64 r,
                                    std::mt19937_64& rng) {
    Vec x(A.n);
    for (auto& v : x) v = rng() % A.F.p;
    if (!A.is_unit(x)) return std::nullopt;
    u64 e = 0;
    BigUint odd = strip_factor(expmult, r, e);
    Vec a = A.pow_big(x, odd);
    if (a == A.one) return std::nullopt;
    return a;
}

} // namespace

TEST_CASE("discrete log in a prime field") {
    Algebra A = base_field_algebra(PrimeField(13));
    // 5 has order 4 mod 13, 12 has order 2
    DiscreteLog d = discrete_log_r_elements(A, {5}, {12}, 2);
    REQUIRE(d.is_log);
    CHECK(d.s == BigUint(2));
    CHECK(A.pow_big({5}, d.s) == Vec{12});
}

TEST_CASE("discrete log of an element against itself") {
    Algebra A = base_field_algebra(PrimeField(13));
    DiscreteLog d = discrete_log_r_elements(A, {5}, {5}, 2);
    REQUIRE(d.is_log);
    CHECK(d.s == BigUint(1));
}

TEST_CASE("discrete log surfaces a zero divisor on a split algebra") {
    Algebra A = diagonal_algebra(PrimeField(5), 2);
    // a = (2,2) has order 4 in both components, b = (2,3): no common log
    DiscreteLog d = discrete_log_r_elements(A, {2, 2}, {2, 3}, 2);
    REQUIRE_FALSE(d.is_log);
    Vec diff = A.sub(A.pow_big({2, 2}, d.s), A.pow_big({2, 3}, d.sp));
    CHECK(diff == d.zd.z);
    CHECK(check_zero_divisor(A, d.zd));
}

TEST_CASE("discrete log rejects order violations") {
    Algebra A = base_field_algebra(PrimeField(13));
    CHECK_THROWS_AS(discrete_log_r_elements(A, {12}, {5}, 2), OrderViolation);
}

TEST_CASE("discrete log dichotomy over seeded semisimple algebras") {
    std::mt19937_64 rng(20240811);
    int done = 0;
    while (done < 220) {
        u64 p = std::vector<u64>{5, 7, 11, 13}[rng() % 4];
        PrimeField F(p);
        Poly f = Poly(F);
        {
            size_t deg = 2 + rng() % 3;
            Vec c(deg + 1, 0);
            for (size_t i = 0; i < deg; ++i) c[i] = rng() % p;
            c[deg] = 1;
            f = Poly(F, c);
        }
        if (!is_squarefree(f)) continue;
        Algebra A = from_polynomial(f);
        auto degs = component_degrees(A);
        BigUint em = unit_exponent_multiple(A, degs);
        u64 r = std::vector<u64>{2, 3}[rng() % 2];
        auto a = random_r_element(A, em, r, rng);
        auto b = random_r_element(A, em, r, rng);
        if (!a || !b) continue;
        DiscreteLog d;
        Vec av = *a, bv = *b;
        try {
            d = discrete_log_r_elements(A, av, bv, r);
        } catch (const OrderViolation&) {
            std::swap(av, bv);
            d = discrete_log_r_elements(A, av, bv, r);
        }
        if (d.is_log) {
            CHECK(A.pow_big(av, d.s) == bv);
        } else {
            Vec diff = A.sub(A.pow_big(av, d.s), A.pow_big(bv, d.sp));
            CHECK_FALSE(vec_is_zero(diff));
            CHECK_FALSE(vec_is_zero(d.zd.w));
            CHECK(vec_is_zero(A.mul(diff, d.zd.w)));
        }
        ++done;
    }
    CHECK(done >= 200);
}

TEST_CASE("free basis of the regular module") {
    Algebra A = from_polynomial(cyclotomic(4, PrimeField(7)));
    auto d = free_basis_or_zero_divisor(A, {A.one});
    REQUIRE_FALSE(d.is_divisor());
    CHECK(d.val->size() == 1);
}

TEST_CASE("free basis of a plain vector space") {
    Algebra A = base_field_algebra(PrimeField(7));
    std::vector<Vec> gens{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
    auto d = free_basis_or_zero_divisor(
        A, 3, [&](const Vec& x, const Vec& v) { return Vec{A.F.mul(x[0], v[0]), A.F.mul(x[0], v[1]), A.F.mul(x[0], v[2])}; },
        gens);
    REQUIRE_FALSE(d.is_divisor());
    CHECK(d.val->size() == 3);
}

TEST_CASE("non-free module yields a zero divisor") {
    // A = F_5[x]/(x^2-1) acting on its (x-1)-component: k-dim 1, not free
    PrimeField F(5);
    Algebra A = from_polynomial(Poly(F, {4, 0, 1}));
    // idempotent of the component where x = 1: e = (1 + x)/2 = 3 + 3x
    Vec e{3, 3};
    REQUIRE(A.mul(e, e) == e);
    auto d = free_basis_or_zero_divisor(A, {e});
    REQUIRE(d.is_divisor());
    CHECK(check_zero_divisor(A, *d.zd));
}

TEST_CASE("free rank matches dimension count over seeded field modules") {
    std::mt19937_64 rng(77);
    int done = 0;
    while (done < 60) {
        u64 p = std::vector<u64>{3, 5, 7}[rng() % 3];
        PrimeField F(p);
        size_t deg = 2 + rng() % 2;
        Vec c(deg + 1, 0);
        for (size_t i = 0; i < deg; ++i) c[i] = rng() % p;
        c[deg] = 1;
        Poly f = Poly(F, c);
        if (berlekamp_deterministic(f).size() != 1) continue; // want a field
        Algebra A = from_polynomial(f);
        size_t m = 1 + rng() % 3;
        size_t ambient = A.n * m;
        auto act = [&](const Vec& x, const Vec& v) {
            Vec r(ambient, 0);
            for (size_t blk = 0; blk < m; ++blk) {
                Vec part(v.begin() + blk * A.n, v.begin() + (blk + 1) * A.n);
                Vec prod = A.mul(x, part);
                std::copy(prod.begin(), prod.end(), r.begin() + blk * A.n);
            }
            return r;
        };
        std::vector<Vec> gens;
        for (size_t g = 0; g < m + 1; ++g) {
            Vec v(ambient);
            for (auto& vv : v) vv = rng() % p;
            gens.push_back(v);
        }
        auto d = free_basis_or_zero_divisor(A, ambient, act, gens);
        REQUIRE_FALSE(d.is_divisor()); // modules over a field are free
        // |basis| * dim A = dim V
        std::vector<Vec> rows = gens;
        for (const Vec& g : gens)
            for (size_t i = 0; i < A.n; ++i) rows.push_back(act(A.basis(i), g));
        size_t dimV = echelon(Mat::from_rows(F, rows)).rows;
        CHECK(d.val->size() * A.n == dimV);
        ++done;
    }
}

TEST_CASE("refinement with the identity map changes nothing") {
    Algebra A = diagonal_algebra(PrimeField(5), 3);
    std::vector<IdealRepr> start{IdealRepr{Mat::identity(A.F, 3), A.one}};
    auto out = refine_invariant_decomposition(A, {Mat::identity(A.F, 3)}, start);
    REQUIRE(out.size() == 1);
    CHECK(out[0].e == A.one);
}

TEST_CASE("cyclic shift forces no refinement of the full algebra") {
    Algebra A = diagonal_algebra(PrimeField(5), 3);
    Mat sig = perm_matrix(A.F, {1, 2, 0});
    REQUIRE(is_automorphism(A, sig));
    std::vector<IdealRepr> start{IdealRepr{Mat::identity(A.F, 3), A.one}};
    auto out = refine_invariant_decomposition(A, {sig}, start);
    CHECK(out.size() == 1);
}

TEST_CASE("swap splits the seeded two-component decomposition") {
    Algebra A = diagonal_algebra(PrimeField(5), 2);
    Mat swap = perm_matrix(A.F, {1, 0});
    REQUIRE(is_automorphism(A, swap));
    auto zd = must_zero_divisor(A, {1, 0});
    IdealRepr I = ideal_of_element(A, zd.z);
    IdealRepr J = complement_ideal(A, I.e);
    auto out = refine_invariant_decomposition(A, {swap}, {I, J});
    REQUIRE(out.size() == 2);
    CHECK(out[0].basis.rows == 1);
    CHECK(out[1].basis.rows == 1);
    // sigma swaps the two idempotents
    CHECK(apply_map(swap, out[0].e) == out[1].e);
    CHECK(apply_map(swap, out[1].e) == out[0].e);
}

TEST_CASE("refinement invariants over seeded permutation actions") {
    std::mt19937_64 rng(31337);
    for (int iter = 0; iter < 60; ++iter) {
        size_t m = 3 + rng() % 4;
        Algebra A = diagonal_algebra(PrimeField(7), m);
        std::vector<size_t> perm(m);
        for (size_t i = 0; i < m; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        Mat sig = perm_matrix(A.F, perm);
        // start: first axis split off from the rest
        Vec e1(m, 0);
        e1[0] = 1;
        std::vector<IdealRepr> start{ideal_of_element(A, e1), complement_ideal(A, e1)};
        auto out = refine_invariant_decomposition(A, {sig}, start);
        size_t total = 0;
        for (auto& I : out) total += I.basis.rows;
        CHECK(total == m);
        for (size_t i = 0; i < out.size(); ++i)
            for (size_t j = i + 1; j < out.size(); ++j)
                CHECK(vec_is_zero(A.mul(out[i].e, out[j].e)));
        for (auto& I : out) {
            Vec img = apply_map(sig, I.e);
            bool hit = false;
            for (auto& J : out) hit = hit || img == J.e;
            CHECK(hit);
        }
    }
}
