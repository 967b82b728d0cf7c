#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fpalg/poly.hpp"
#include "oracle.hpp"

using namespace fpalg;

static Poly P(PrimeField F, std::vector<u64> c) { return Poly(F, std::move(c)); }

TEST_CASE("division identity f = qg + r") {
    PrimeField F(7);
    std::mt19937_64 rng(3);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<u64> fc(1 + rng() % 6), gc(1 + rng() % 4);
        for (auto& x : fc) x = rng() % 7;
        for (auto& x : gc) x = rng() % 7;
        Poly f = P(F, fc), g = P(F, gc);
        if (g.is_zero()) continue;
        Poly q, r;
        divmod(f, g, q, r);
        CHECK(add(mul(q, g), r) == f);
        CHECK(r.deg() < g.deg());
    }
}

TEST_CASE("gcd divides both inputs") {
    PrimeField F(11);
    std::mt19937_64 rng(4);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<u64> fc(1 + rng() % 6), gc(1 + rng() % 6);
        for (auto& x : fc) x = rng() % 11;
        for (auto& x : gc) x = rng() % 11;
        Poly f = P(F, fc), g = P(F, gc);
        if (f.is_zero() || g.is_zero()) continue;
        Poly d = poly_gcd(f, g);
        CHECK(mod(f, d).is_zero());
        CHECK(mod(g, d).is_zero());
    }
}

TEST_CASE("cyclotomic standard identities") {
    PrimeField F(7);
    CHECK(cyclotomic(8, F) == P(F, {1, 0, 0, 0, 1}));        // X^4 + 1
    CHECK(cyclotomic(12, F) == P(F, {1, 0, 6, 0, 1}));       // X^4 - X^2 + 1
    CHECK(cyclotomic(5, F) == P(F, {1, 1, 1, 1, 1}));        // all ones
    CHECK(cyclotomic(1, F) == P(F, {6, 1}));                 // X - 1
    CHECK(cyclotomic(2, F) == P(F, {1, 1}));                 // X + 1
    CHECK_THROWS_AS(cyclotomic(14, F), CharDividesIndex);
}

TEST_CASE("cyclotomic product identity up to r = 64") {
    for (u64 p : {5ull, 7ull, 11ull, 97ull}) {
        PrimeField F(p);
        for (u64 r = 1; r <= 64; ++r) {
            if (r % p == 0) continue;
            Poly prod = Poly::one(F);
            bool skip = false;
            for (u64 d = 1; d <= r; ++d) {
                if (r % d) continue;
                if (d % p == 0) { skip = true; break; }
                prod = mul(prod, cyclotomic(d, F));
            }
            if (skip) continue;
            CHECK(prod == sub(Poly::xpow(F, r), Poly::one(F)));
        }
    }
}

TEST_CASE("ddf trivial cases") {
    PrimeField F5(5);
    auto d1 = distinct_degree_factorization(P(F5, {4, 0, 1})); // X^2 - 1
    REQUIRE(d1.size() == 1);
    CHECK(d1[0].first == 1);
    CHECK(d1[0].second == P(F5, {4, 0, 1}));

    PrimeField F7(7);
    auto d2 = distinct_degree_factorization(P(F7, {1, 0, 0, 0, 1})); // X^4 + 1
    REQUIRE(d2.size() == 1);
    CHECK(d2[0].first == 2);

    PrimeField F3(3);
    auto d3 = distinct_degree_factorization(P(F3, {0, 2, 0, 1})); // X^3 - X
    REQUIRE(d3.size() == 1);
    CHECK(d3[0].first == 1);
}

TEST_CASE("X^4+1 over F_7 really has only degree-2 factors") {
    // brute-force irreducibility scan backs the DDF claim
    auto fs = oracle::brute_force_factor(P(PrimeField(7), {1, 0, 0, 0, 1}));
    REQUIRE(fs.size() == 2);
    CHECK(fs[0].deg() == 2);
    CHECK(fs[1].deg() == 2);
}

TEST_CASE("ddf product equals input on seeded squarefree polynomials") {
    std::mt19937_64 rng(9);
    for (u64 p : {5ull, 13ull, 97ull}) {
        PrimeField F(p);
        for (int iter = 0; iter < 70; ++iter) {
            std::vector<u64> c(2 + rng() % 6);
            for (auto& x : c) x = rng() % p;
            c.back() = 1;
            Poly f = P(F, c);
            if (!is_squarefree(f)) continue;
            Poly prod = Poly::one(F);
            u64 prev = 0;
            for (auto& [d, g] : distinct_degree_factorization(f)) {
                CHECK(d > prev);
                prev = d;
                CHECK(g.deg() % d == 0);
                prod = mul(prod, g);
            }
            CHECK(prod == monic(f));
        }
    }
}

TEST_CASE("ddf rejects non-squarefree input with a factor") {
    PrimeField F(5);
    Poly f = mul(P(F, {1, 1}), P(F, {1, 1})); // (X+1)^2
    try {
        distinct_degree_factorization(f);
        FAIL("expected NotSquarefree");
    } catch (const NotSquarefree& e) {
        CHECK(mod(f, e.factor).is_zero());
        CHECK(e.factor.deg() > 0);
    }
}

TEST_CASE("berlekamp trivial splits") {
    PrimeField F(3);
    auto f1 = berlekamp_deterministic(P(F, {2, 0, 1})); // X^2 - 1
    REQUIRE(f1.size() == 2);
    CHECK(f1[0] == P(F, {1, 1}));
    CHECK(f1[1] == P(F, {2, 1}));
    auto f2 = berlekamp_deterministic(P(F, {0, 2, 0, 1})); // X^3 - X
    REQUIRE(f2.size() == 3);
    auto f3 = berlekamp_deterministic(P(F, {1, 0, 1})); // X^2 + 1, no roots mod 3
    REQUIRE(f3.size() == 1);
    CHECK(f3[0].deg() == 2);
    for (u64 c = 0; c < 3; ++c) CHECK(eval(f3[0], c) != 0); // exhaustion
}

TEST_CASE("berlekamp handles multiplicities and matches the oracle") {
    std::mt19937_64 rng(11);
    for (u64 p : {3ull, 5ull, 13ull}) {
        PrimeField F(p);
        for (int iter = 0; iter < 50; ++iter) {
            std::vector<u64> c(2 + rng() % 5);
            for (auto& x : c) x = rng() % p;
            c.back() = 1;
            Poly f = P(F, c);
            auto fs = berlekamp_deterministic(f);
            Poly prod = Poly::one(F);
            for (auto& g : fs) prod = mul(prod, g);
            CHECK(prod == monic(f));
            if (is_squarefree(f)) {
                auto os = oracle::oracle_check(f, 1234 + iter);
                REQUIRE(os.size() == fs.size());
                for (size_t i = 0; i < os.size(); ++i) CHECK(os[i] == fs[i]);
            }
        }
    }
}

TEST_CASE("oracle self-consistency") {
    PrimeField F(7);
    auto fs = oracle::oracle_check(P(F, {1, 0, 0, 0, 1}), 99);
    REQUIRE(fs.size() == 2);
    CHECK(mul(fs[0], fs[1]) == P(F, {1, 0, 0, 0, 1}));
    auto irr = oracle::oracle_check(P(F, {4, 0, 1}), 99); // X^2 - 3 irreducible mod 7
    REQUIRE(irr.size() == 1);
    auto split = oracle::oracle_check(P(PrimeField(5), {0, 4, 0, 1}), 99); // X^3 - X
    REQUIRE(split.size() == 3);
}
