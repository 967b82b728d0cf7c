#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "fpalg/smooth.hpp"

using namespace fpalg;

namespace {

Poly split_poly(PrimeField F, const std::vector<u64>& roots) {
    Poly f = Poly::one(F);
    for (u64 r : roots) f = mul(f, Poly(F, {F.neg(r), 1}));
    return f;
}

Poly random_split(PrimeField F, size_t deg, std::mt19937_64& rng) {
    std::vector<u64> roots;
    while (roots.size() < deg) {
        u64 c = rng() % F.p;
        bool dup = false;
        for (u64 r : roots) dup |= (r == c);
        if (!dup) roots.push_back(c);
    }
    return split_poly(F, roots);
}

// checks the outcome of smooth_factor on f against both allowed arms
void check_outcome(const Poly& f, const SmoothOutcome& out) {
    size_t n = (size_t)f.deg();
    if (out.factor) {
        REQUIRE(out.factor->deg() > 0);
        REQUIRE(out.factor->deg() < (int)n);
        REQUIRE(mod(f, *out.factor).is_zero());
    } else {
        Algebra A = from_polynomial(f);
        REQUIRE(out.automorphism.has_value());
        REQUIRE(is_automorphism(A, *out.automorphism));
        auto o = map_order(A, *out.automorphism);
        REQUIRE(o.has_value());
        REQUIRE(*o == n);
        REQUIRE(out.cover.has_value());
        REQUIRE(verify_cover(A, *out.cover));
    }
}

} // namespace

TEST_CASE("kummer element over the split plane at p = 13") {
    PrimeField F(13);
    Poly f = split_poly(F, {0, 1});
    Algebra A = from_polynomial(f);
    Mat B = echelon(Mat::from_rows(F, {A.one}));
    // S = 3 keeps p above the Berlekamp threshold while covering 12 = 2^2 * 3
    auto got = smooth_kummer_element(A, B, 2, 3);
    REQUIRE(got.val.has_value());
    const Vec& x = got.val->x;
    u64 r = got.val->r;
    REQUIRE((r == 2 || r == 3));
    REQUIRE(A.is_unit(x));
    if (got.val->deep) {
        REQUIRE_FALSE(subspace_contains(B, A.pow(x, r)));
        REQUIRE(subspace_contains(B, A.pow(x, r * r)));
    } else {
        REQUIRE_FALSE(subspace_contains(B, x));
        REQUIRE(subspace_contains(B, A.pow(x, r)));
    }
    // r-power order
    Vec v = x;
    bool one = false;
    for (int i = 0; i < 8 && !one; ++i) {
        one = v == A.one;
        v = A.pow(v, r);
    }
    REQUIRE((one || v == A.one));
}

TEST_CASE("small primes fall back to a direct split") {
    PrimeField F(13);
    Algebra A = from_polynomial(split_poly(F, {2, 5, 7}));
    Mat B = echelon(Mat::from_rows(F, {A.one}));
    auto got = smooth_kummer_element(A, B, 3, 64);
    REQUIRE(got.is_divisor());
    REQUIRE(check_zero_divisor(A, *got.zd));
}

TEST_CASE("smoothness bound violations report the offending prime") {
    PrimeField F(607); // 606 = 2 * 3 * 101
    bool threw = false;
    u64 bad = 0;
    try {
        smooth_factor(split_poly(F, {1, 2}));
    } catch (const SmoothBoundExceeded& e) {
        threw = true;
        bad = e.factor;
    }
    REQUIRE(threw);
    REQUIRE(bad == 101);
}

TEST_CASE("the unit cover verifies and every extension strictly grows") {
    std::mt19937_64 rng(5151);
    for (u64 p : {2593, 3457}) {
        PrimeField F(p);
        for (int trial = 0; trial < 10; ++trial) {
            Poly f = random_split(F, 2 + rng() % 4, rng);
            Algebra A = from_polynomial(f);
            CyclotomicCover cover = unit_cover(A);
            REQUIRE(verify_cover(A, cover));
            while (cover.Brows.rows < A.n) {
                auto step = cyclotomic_cover_extend(A, cover, 64);
                if (step.is_divisor()) {
                    REQUIRE(check_zero_divisor(A, *step.zd));
                    break;
                }
                REQUIRE(step.val->Brows.rows > cover.Brows.rows);
                REQUIRE(verify_cover(A, *step.val));
                cover = std::move(*step.val);
            }
        }
    }
}

TEST_CASE("coinciding r-th powers always collapse somewhere in the scan") {
    // the divisor scan behind the cover surgery: if x and y are units of a
    // split algebra with x^r = y^r but x outside the span of the powers
    // x^i y, some x - x^i y is a zero divisor
    PrimeField F(2917); // 2916 = 2^2 * 3^6
    u64 omega = 0;
    for (u64 c = 2; c < F.p; ++c)
        if (F.pow(c, 3) == 1 && c != 1) {
            omega = c;
            break;
        }
    REQUIRE(omega != 0);
    Algebra A = from_polynomial(split_poly(F, {1, 4, 9}));
    // x and y componentwise cube roots of unity with equal cubes
    auto embed = [&](u64 a, u64 b, u64 c) {
        // interpolate the component values through the three roots 1, 4, 9
        Poly g = add(add(scale(mul(Poly(F, {F.neg(4), 1}), Poly(F, {F.neg(9), 1})),
                               F.mul(a, F.inv(F.mul(F.sub(1, 4), F.sub(1, 9))))),
                         scale(mul(Poly(F, {F.neg(1), 1}), Poly(F, {F.neg(9), 1})),
                               F.mul(b, F.inv(F.mul(F.sub(4, 1), F.sub(4, 9)))))),
                     scale(mul(Poly(F, {F.neg(1), 1}), Poly(F, {F.neg(4), 1})),
                           F.mul(c, F.inv(F.mul(F.sub(9, 1), F.sub(9, 4))))));
        Vec v(A.n, 0);
        for (int i = 0; i <= g.deg(); ++i) v[i] = g.coeff(i);
        return v;
    };
    Vec x = embed(omega, F.mul(omega, omega), omega);
    Vec y = embed(omega, omega, F.mul(omega, omega));
    REQUIRE(A.pow(x, 3) == A.one);
    REQUIRE(A.pow(y, 3) == A.one);
    bool hit = false;
    Vec xp = A.one;
    for (u64 i = 0; i < 3 && !hit; ++i) {
        if (auto zd = try_zero_divisor(A, A.sub(x, A.mul(xp, y)))) {
            REQUIRE(check_zero_divisor(A, *zd));
            hit = true;
        }
        xp = A.mul(xp, x);
    }
    REQUIRE(hit);
}

TEST_CASE("degree four over 97 resolves with a verified outcome") {
    PrimeField F(97);
    Poly f = split_poly(F, {1, 2, 3, 5});
    auto out = smooth_factor(f);
    check_outcome(f, out);
}

TEST_CASE("degree seven over 97 always yields a factor") {
    // 7 does not divide lcm{r - 1 : r | 96} = 2, so the cyclotomic cover can
    // never become injective and a factor is forced
    PrimeField F(97);
    std::mt19937_64 rng(808);
    for (int trial = 0; trial < 5; ++trial) {
        Poly f = random_split(F, 7, rng);
        auto out = smooth_factor(f);
        REQUIRE(out.factor.has_value());
        check_outcome(f, out);
    }
}

TEST_CASE("x^2 - 1 over the smooth prime family") {
    for (u64 p : {97, 193, 257, 577, 769}) {
        PrimeField F(p);
        Poly f(F, {F.p - 1, 0, 1});
        auto out = smooth_factor(f);
        check_outcome(f, out);
    }
}

TEST_CASE("non-split inputs are rejected") {
    PrimeField F(97);
    REQUIRE_THROWS_AS(smooth_factor(Poly(F, {92, 0, 1})), NotSplit); // X^2 - 5
}

TEST_CASE("repeated factors are rejected before the cover loop") {
    PrimeField F(97);
    Poly f = mul(Poly(F, {1, 1}), Poly(F, {1, 1}));
    bool threw = false;
    try {
        smooth_factor(f);
    } catch (const NotSquarefree& e) {
        threw = true;
        REQUIRE(e.factor.deg() > 0);
        REQUIRE(mod(f, e.factor).is_zero());
    }
    REQUIRE(threw);
}

TEST_CASE("seeded sweep over smooth primes sees both arms") {
    std::mt19937_64 rng(424242);
    int facs = 0, auts = 0;
    for (u64 p : {769, 2593, 2917, 3457, 3889}) {
        PrimeField F(p);
        for (int trial = 0; trial < 60; ++trial) {
            Poly f = random_split(F, 2 + rng() % 5, rng);
            auto out = smooth_factor(f);
            check_outcome(f, out);
            (out.factor ? facs : auts) += 1;
        }
    }
    REQUIRE(facs > 0);
    REQUIRE(auts > 0);
}

TEST_CASE("the automorphism arm is reproducible byte for byte") {
    PrimeField F(769);
    Poly f = split_poly(F, {6, 147});
    auto a = smooth_factor(f);
    auto b = smooth_factor(f);
    REQUIRE(a.factor.has_value() == b.factor.has_value());
    if (!a.factor) {
        REQUIRE(*a.automorphism == *b.automorphism);
        REQUIRE(a.cover->rI == b.cover->rI);
        REQUIRE(a.cover->psi == b.cover->psi);
    } else {
        REQUIRE(a.factor->c == b.factor->c);
    }
}

TEST_CASE("fixed quartics across the acceptance prime family") {
    for (u64 p : {97, 193, 257, 577, 769}) {
        PrimeField F(p);
        Poly f = split_poly(F, {3, 7, 11, 19});
        auto out = smooth_factor(f);
        check_outcome(f, out);
    }
}
