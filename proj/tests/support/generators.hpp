// Seeded random instances for property tests. Every generator draws from a
// caller-owned std::mt19937_64, so a failing case replays from its seed.
#pragma once

#include "convlyap/polynomial.hpp"
#include "convlyap/vector_field.hpp"

#include <random>
#include <vector>

namespace convlyap::testing {

inline Rational small_rational(std::mt19937_64& rng, int num_bound = 9, int den_bound = 5)
{
    std::uniform_int_distribution<int> num(-num_bound, num_bound), den(1, den_bound);
    Rational r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

inline Monomial random_monomial(std::mt19937_64& rng, std::size_t nvars, std::uint32_t max_degree, bool with_t)
{
    std::uniform_int_distribution<std::size_t> slot(with_t ? 0 : 1, nvars);
    std::uniform_int_distribution<std::uint32_t> deg(0, max_degree);
    Monomial m;
    const std::uint32_t d = deg(rng);
    for (std::uint32_t i = 0; i < d; ++i) {
        const std::size_t s = slot(rng);
        m.set(s, m[s] + 1);
    }
    return m;
}

inline Polynomial random_polynomial(std::mt19937_64& rng, std::size_t nvars, std::uint32_t max_degree = 3,
                                    std::size_t max_terms = 5, bool with_t = true)
{
    std::uniform_int_distribution<std::size_t> count(0, max_terms);
    std::vector<Term> terms;
    const std::size_t m = count(rng);
    for (std::size_t i = 0; i < m; ++i)
        terms.push_back({random_monomial(rng, nvars, max_degree, with_t), small_rational(rng)});
    return Polynomial::from_terms(nvars, std::move(terms));
}

inline std::vector<Rational> random_point(std::mt19937_64& rng, std::size_t length)
{
    std::vector<Rational> p;
    for (std::size_t i = 0; i < length; ++i) p.push_back(small_rational(rng, 7, 4));
    return p;
}

/// A random field with f(0) = 0 and degree at most max_degree.
inline VectorField random_field(std::mt19937_64& rng, std::size_t n, std::uint32_t max_degree = 3)
{
    std::vector<Polynomial> comps;
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial p = random_polynomial(rng, n, max_degree, 4, false);
        p -= Polynomial::constant(n, p.coefficient(Monomial{}));
        p += Polynomial::variable(n, i + 1) * Rational(-1);
        comps.push_back(std::move(p));
    }
    return VectorField(std::move(comps));
}

}  // namespace convlyap::testing
