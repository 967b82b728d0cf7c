#ifndef FPALG_TESTS_ORACLE_HPP
#define FPALG_TESTS_ORACLE_HPP

// Test-only oracles. The library under test is fully deterministic; the
// randomized equal-degree splitter below exists only to cross-check its
// outputs and never ships in the core.

#include <random>
#include <vector>

#include "fpalg/poly.hpp"

namespace oracle {

using namespace fpalg;

// trial division by every smaller monic polynomial; only for tiny p^deg
inline std::vector<Poly> brute_force_factor(Poly f) {
    f = monic(f);
    std::vector<Poly> out;
    PrimeField F = f.F;
    bool progress = true;
    while (f.deg() > 0 && progress) {
        progress = false;
        for (int d = 1; 2 * d <= f.deg() && !progress; ++d) {
            // enumerate monic candidates of degree d by counting
            u64 total = 1;
            for (int i = 0; i < d; ++i) total *= F.p;
            for (u64 code = 0; code < total; ++code) {
                std::vector<u64> c(d + 1, 0);
                u64 t = code;
                for (int i = 0; i < d; ++i) {
                    c[i] = t % F.p;
                    t /= F.p;
                }
                c[d] = 1;
                Poly g(F, c);
                Poly q, r;
                divmod(f, g, q, r);
                if (r.is_zero()) {
                    out.push_back(g);
                    f = q;
                    progress = true;
                    break;
                }
            }
        }
        if (!progress && f.deg() > 0) {
            out.push_back(f);
            f = Poly::one(F);
        }
    }
    std::sort(out.begin(), out.end(), poly_less);
    return out;
}

namespace detail {

inline void equal_degree_split(const Poly& f, u64 d, std::mt19937_64& rng, std::vector<Poly>& out) {
    if ((u64)f.deg() == d) {
        out.push_back(monic(f));
        return;
    }
    PrimeField F = f.F;
    for (;;) {
        // random element, then the standard (p^d - 1)/2 power trick (p odd)
        std::vector<u64> c(f.deg(), 0);
        for (auto& x : c) x = rng() % F.p;
        Poly a(F, c);
        if (a.deg() < 1) continue;
        u64 rem = 0;
        BigUint e = BigUint::pow_u64(F.p, d).sub_u64(1).divmod(2, rem); // (p^d - 1)/2
        Poly b = powmod_poly_big(a, e, f);
        Poly g = poly_gcd(f, sub(b, Poly::one(F)));
        if (g.deg() > 0 && g.deg() < f.deg()) {
            equal_degree_split(g, d, rng, out);
            equal_degree_split(divexact(f, g), d, rng, out);
            return;
        }
    }
}

} // namespace detail

// complete monic irreducible factorization of squarefree f via seeded
// Cantor-Zassenhaus
inline std::vector<Poly> oracle_check(Poly f, u64 seed) {
    f = monic(f);
    std::mt19937_64 rng(seed);
    std::vector<Poly> out;
    for (auto& [d, prod] : distinct_degree_factorization(f))
        detail::equal_degree_split(prod, d, rng, out);
    std::sort(out.begin(), out.end(), poly_less);
    return out;
}

} // namespace oracle

#endif
