#include "support/generators.hpp"
#include "support/systems.hpp"

#include <gtest/gtest.h>

using namespace convlyap;
using namespace convlyap::testing;

TEST(Add, AdditiveInverseIsZero)
{
    EXPECT_TRUE((P("x1", 1) + P("-x1", 1)).is_zero());
}

TEST(Add, ConstantsFold)
{
    EXPECT_EQ(P("x1^2 + 1/2", 1) + P("1/2", 1), P("x1^2 + 1", 1));
}

TEST(Add, LikeTermsMerge)
{
    const auto sum = P("x1*x2", 2) + P("x1*x2", 2);
    ASSERT_EQ(sum.size(), 1u);
    EXPECT_EQ(sum.coefficient(Monomial{0, 1, 1}), 2);
}

TEST(Add, DimensionMismatchThrows)
{
    EXPECT_THROW(P("x1", 1) + P("x1", 2), DimensionMismatch);
}

TEST(Mul, DifferenceOfSquares)
{
    EXPECT_EQ(P("x1 + x2", 2) * P("x1 - x2", 2), P("x1^2 - x2^2", 2));
}

TEST(Mul, ZeroAnnihilates)
{
    EXPECT_TRUE((Polynomial(2) * P("x1^3 + 7*x2", 2)).is_zero());
}

TEST(Mul, CubeOfPicardIterateMatchesHandExpansion)
{
    const auto y = P("x1 - x1^3*t", 1);
    EXPECT_EQ(y * y * y, P("x1^3 - 3*x1^5*t + 3*x1^7*t^2 - x1^9*t^3", 1));
}

TEST(Mul, DegreeIsAdditive)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const auto a = random_polynomial(rng, 3), b = random_polynomial(rng, 3);
        if (a.is_zero() || b.is_zero()) continue;
        EXPECT_EQ((a * b).degree(), a.degree() + b.degree());
    }
}

TEST(Mul, DimensionMismatchThrows)
{
    EXPECT_THROW(P("x1", 1) * P("x2", 2), DimensionMismatch);
}

TEST(Degree, ZeroPolynomialHasDegreeZero)
{
    EXPECT_EQ(Polynomial(3).degree(), 0u);
    EXPECT_EQ(P("x1^2*x2 + t^3", 2).degree(), 3u);
    EXPECT_EQ(P("x1^2*x2 + t^3", 2).x_degree(), 3u);
    EXPECT_EQ(P("x1^2*x2*t + t^4", 2).t_degree(), 4u);
}

TEST(Compose, BinomialShift)
{
    EXPECT_EQ(compose(P("x1^2", 1), {P("x1 + t", 1)}), P("x1^2 + 2*x1*t + t^2", 1));
}

TEST(Compose, IdentitySubstitution)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto p = random_polynomial(rng, 3);
        EXPECT_EQ(compose(p, {P("x1", 3), P("x2", 3), P("x3", 3)}), p);
    }
}

TEST(Compose, CubicFieldAtPicardIterate)
{
    const auto f = cubic();
    EXPECT_EQ(compose(f[0], {P("x1 - x1^3*t", 1)}), P("-(x1^3 - 3*x1^5*t + 3*x1^7*t^2 - x1^9*t^3)", 1));
}

TEST(Compose, ArityMismatchThrows)
{
    EXPECT_THROW(compose(P("x1*x2", 2), {P("x1", 2)}), DimensionMismatch);
}

TEST(Compose, DegreeBoundedByProduct)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto p = random_polynomial(rng, 2, 3, 4, false);
        const std::vector<Polynomial> s{random_polynomial(rng, 2), random_polynomial(rng, 2)};
        std::uint32_t ds = std::max(s[0].degree(), s[1].degree());
        EXPECT_LE(compose(p, s).degree(), p.degree() * std::max<std::uint32_t>(ds, 1));
    }
}

TEST(Compose, TimeSubstitution)
{
    const auto p = P("x1*t^2", 1);
    const std::vector<Polynomial> s{P("x1", 1)};
    EXPECT_EQ(compose(p, s, P("1/2", 1)), P("1/4*x1", 1));
}

TEST(IntegrateT, MonomialRule)
{
    EXPECT_EQ(integrate_t(P("t", 1), 0, Rational(1, 4)), P("1/32", 1));
    EXPECT_EQ(integrate_t(P("1", 1), 0, Rational(1, 4)), P("1/4", 1));
    EXPECT_EQ(integrate_t(P("t^2", 1), 0, Rational(1, 4)), P("1/192", 1));
}

TEST(IntegrateT, ResultIsTimeFree)
{
    const auto r = integrate_t(P("x1*t^3 + x2^2*t + 5", 2), Rational(1, 3), Rational(2));
    EXPECT_FALSE(r.has_t());
    EXPECT_EQ(r, P("x1*(16 - 1/81)/4 + x2^2*(4 - 1/9)/2 + 5*5/3", 2));
}

TEST(IntegrateT, ReversedBoundsThrow)
{
    EXPECT_THROW(integrate_t(P("t", 1), 1, 0), std::invalid_argument);
}

TEST(IndefiniteIntegrateT, Examples)
{
    EXPECT_EQ(indefinite_integrate_t(P("t", 1)), P("t^2/2", 1));
    EXPECT_EQ(indefinite_integrate_t(P("1", 1)), P("t", 1));
    EXPECT_EQ(indefinite_integrate_t(P("x1^3", 1)), P("x1^3*t", 1));
}

TEST(Differentiate, Examples)
{
    EXPECT_EQ(differentiate(P("x1^2*x2", 2), 1), P("2*x1*x2", 2));
    const auto f = vdp();
    EXPECT_EQ(differentiate(P("t", 2) * f[1], 0), f[1]);
    EXPECT_EQ(differentiate(P("x1^2 + x2^2", 2), 1), P("2*x1", 2));
    EXPECT_EQ(differentiate(P("x1^2 + x2^2", 2), 2), P("2*x2", 2));
}

TEST(Differentiate, IndexOutOfRangeThrows)
{
    EXPECT_THROW(differentiate(P("x1", 1), 2), std::out_of_range);
}

TEST(Evaluate, Examples)
{
    EXPECT_EQ(evaluate<Rational>(P("x1^2 - 1", 1), {Rational(1)}), 0);
    const auto f = vdp();
    for (const auto& c : f.components()) EXPECT_EQ(evaluate<Rational>(c, {Rational(0), Rational(0)}), 0);
    const auto vdot = P("2*x2^2*(x1^2 - 1)", 2);
    EXPECT_EQ(evaluate<Rational>(vdot, {Rational(1, 5), Rational(1, 10)}), Rational(-12, 625));
    EXPECT_NEAR(evaluate<double>(vdot, {0.2, 0.1}), -0.0192, 1e-15);
}

TEST(Evaluate, PointLengthRules)
{
    const auto p = P("x1*t + x2", 2);
    EXPECT_EQ(evaluate<Rational>(p, {Rational(2), Rational(3), Rational(5)}), 11);
    EXPECT_THROW(evaluate<Rational>(p, {Rational(3), Rational(5)}), DimensionMismatch);
    EXPECT_THROW(evaluate<Rational>(P("x1", 2), {Rational(1)}), DimensionMismatch);
    EXPECT_EQ(evaluate<Rational>(P("x1 + x2", 2), {Rational(3), Rational(5)}), 8);
}

TEST(Evaluate, CompiledMatchesExact)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 50; ++i) {
        const auto p = random_polynomial(rng, 3);
        const CompiledPolynomial c(p);
        const std::vector<double> x{0.25, -0.5, 0.75};
        const double exact = evaluate<Rational>(p, {Rational(1, 8), Rational(1, 4), Rational(-1, 2), Rational(3, 4)}).get_d();
        EXPECT_NEAR(c(0.125, x), exact, 1e-12);
    }
}

TEST(ParseSystem, VanDerPol)
{
    const auto f = parse_system("x1' = -x2; x2' = -(1-x1^2)*x2 + x1");
    EXPECT_EQ(f.n(), 2u);
    EXPECT_EQ(f.q(), 3u);
    EXPECT_EQ(f[0], P("-x2", 2));
    EXPECT_EQ(f[1], P("x1^2*x2 - x2 + x1", 2));
}

TEST(ParseSystem, Cubic)
{
    const auto f = parse_system("x1' = -x1^3");
    EXPECT_EQ(f.n(), 1u);
    EXPECT_EQ(f.q(), 3u);
}

TEST(ParseSystem, NonzeroConstantRejectedWithPosition)
{
    try {
        parse_system("x1' = 1 + x1");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_EQ(e.column(), 7u);
    }
}

TEST(ParseSystem, DecimalsAreExact)
{
    const auto f = parse_system("x1' = -2.1*x1 + 1.5e-1*x1^2");
    EXPECT_EQ(f[0].coefficient(Monomial{0, 1}), Rational(-21, 10));
    EXPECT_EQ(f[0].coefficient(Monomial{0, 2}), Rational(3, 20));
}

TEST(ParseSystem, NewlinesCommentsAndContinuation)
{
    const auto f = parse_system("# comment\nx2' = x1*(x2 +\n  x1)   # trailing\n\nx1' = -x1\n");
    EXPECT_EQ(f.n(), 2u);
    EXPECT_EQ(f[1], P("x1*x2 + x1^2", 2));
}

TEST(ParseSystem, SyntaxErrorsCarryLineAndColumn)
{
    try {
        parse_system("x1' = -x1\nx2' = x1 * * x2");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 12u);
    }
    EXPECT_THROW(parse_system("x1' = -x1; x1' = -x1"), ParseError);
    EXPECT_THROW(parse_system("x1' = -x1; x3' = -x3"), ParseError);
    EXPECT_THROW(parse_system("x1' = -x1/x1"), ParseError);
    EXPECT_THROW(parse_system("x1' = -x1*t"), ParseError);
    EXPECT_THROW(parse_system("x1' = x1^x1"), ParseError);
    EXPECT_THROW(parse_system(""), ParseError);
}

TEST(ParseSystem, RoundTripsThroughText)
{
    const auto f = vdp();
    EXPECT_EQ(parse_system(to_string(f)), f);
}

TEST(Monomial, GradedLexIsStrictTotalOrder)
{
    std::mt19937_64 rng(21);
    std::vector<Monomial> ms;
    for (int i = 0; i < 60; ++i) ms.push_back(random_monomial(rng, 3, 4, true));
    for (const auto& a : ms)
        for (const auto& b : ms) {
            EXPECT_EQ(a < b || b < a || a == b, true);
            EXPECT_FALSE(a < b && b < a);
            if (a < b) EXPECT_LE(a.degree(), b.degree());
            for (const auto& c : ms)
                if (a < b && b < c) EXPECT_TRUE(a < c);
        }
}

TEST(ToString, HighestTermFirst)
{
    EXPECT_EQ(to_string(P("1 - 3/2*t + x1^2*x2", 2)), "x1^2*x2 - 3/2*t + 1");
    EXPECT_EQ(to_string(Polynomial(2)), "0");
}

TEST(RingAxioms, RandomTriples)
{
    std::mt19937_64 rng(20240601);
    for (int i = 0; i < 200; ++i) {
        const auto a = random_polynomial(rng, 2), b = random_polynomial(rng, 2), c = random_polynomial(rng, 2);
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * b, b * a);
        EXPECT_TRUE((a - a).is_zero());
    }
}

TEST(ComposeProperty, Associative)
{
    std::mt19937_64 rng(77);
    for (int i = 0; i < 40; ++i) {
        const auto p = random_polynomial(rng, 2, 3, 4, false);
        const std::vector<Polynomial> g{random_polynomial(rng, 2, 2, 3), random_polynomial(rng, 2, 2, 3)};
        const std::vector<Polynomial> h{random_polynomial(rng, 2, 2, 3), random_polynomial(rng, 2, 2, 3)};
        std::vector<Polynomial> gh;
        for (const auto& gi : g) gh.push_back(compose(gi, h));
        EXPECT_EQ(compose(compose(p, g), h), compose(p, gh));
    }
}

TEST(EvaluateProperty, HomomorphismAtRationalPoints)
{
    std::mt19937_64 rng(99);
    const auto a = random_polynomial(rng, 3, 4, 6), b = random_polynomial(rng, 3, 4, 6);
    const auto ab = a * b, sum = a + b;
    for (int i = 0; i < 100; ++i) {
        const auto pt = random_point(rng, 4);
        std::span<const Rational> s(pt);
        const Rational va = evaluate<Rational>(a, s), vb = evaluate<Rational>(b, s);
        EXPECT_EQ(evaluate<Rational>(ab, s), va * vb);
        EXPECT_EQ(evaluate<Rational>(sum, s), va + vb);
    }
}

TEST(CalculusProperty, DerivativeUndoesAntiderivative)
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_polynomial(rng, 2, 5, 6);
        EXPECT_EQ(differentiate(indefinite_integrate_t(p), 0), p);
    }
}

TEST(CalculusProperty, DefiniteIntegralIsAntiderivativeDifference)
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
        const auto p = random_polynomial(rng, 2, 4, 5);
        const Rational lo = Rational(-1, 3), hi = Rational(5, 7);
        const auto F = indefinite_integrate_t(p);
        EXPECT_EQ(integrate_t(p, lo, hi), evaluate_t(F, hi) - evaluate_t(F, lo));
    }
}

TEST(VectorFieldInvariants, RejectsBadFields)
{
    EXPECT_THROW(VectorField({P("x1 + 1", 1)}), InvalidVectorField);
    EXPECT_THROW(VectorField({P("x1*t", 1)}), InvalidVectorField);
    EXPECT_THROW(VectorField({P("x1", 2)}), InvalidVectorField);
    EXPECT_EQ(VectorField({Polynomial(1)}).q(), 0u);
}
