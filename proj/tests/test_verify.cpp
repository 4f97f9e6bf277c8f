#include "convlyap/lyapunov.hpp"
#include "convlyap/verify.hpp"
#include "support/systems.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace convlyap;
using namespace convlyap::testing;

namespace {

Polynomial quarter_V() { return closed_form_quadratic(vdp(), Rational(1, 4)).V; }

void expect_pass(const LemmaTable& t, std::size_t min_points)
{
    std::string notes;
    for (const auto& n : t.precondition_notes) notes += n + "; ";
    EXPECT_TRUE(t.precondition_ok) << t.lemma << ": " << notes;
    for (const auto& r : t.rows)
        EXPECT_TRUE(r.pass() || r.skipped) << t.lemma << " k=" << r.k << " margin " << r.worst_margin;
    EXPECT_TRUE(t.pass()) << t.lemma;
    EXPECT_GE(t.min_points(), min_points) << t.lemma;
}

}  // namespace

TEST(LieDerivative, NormSquaredAlongVanDerPol)
{
    EXPECT_EQ(lie_derivative(P("x1^2 + x2^2", 2), vdp()), P("2*x2^2*(x1^2 - 1)", 2));
    EXPECT_EQ(lie_derivative(P("x1^2", 1), cubic()), P("-2*x1^4", 1));
    EXPECT_THROW(lie_derivative(P("x1", 1), vdp()), DimensionMismatch);
}

TEST(BallPoints, InsideBallWithAxisPoints)
{
    const auto pts = ball_points(2, 0.25, 100);
    ASSERT_EQ(pts.size(), 112u);
    for (const auto& p : pts) {
        EXPECT_LE(norm2(p), 0.25 + 1e-15);
        EXPECT_GT(norm2(p), 0.0);
    }
    EXPECT_EQ(pts.back(), (State{0.0, -0.25}));
    EXPECT_EQ(ball_points(3, 1.0, 10, false).size(), 10u);
}

TEST(CheckLyapunov, QuarterFunctionDecreasesOnSmallBall)
{
    const auto rep = check_lyapunov(quarter_V(), vdp(), 0.25);
    EXPECT_TRUE(rep.decreasing);
    EXPECT_TRUE(rep.positive);
    EXPECT_NEAR(rep.gamma_hat, 0.0031306, 1e-7);
    EXPECT_GT(rep.alpha_hat, 0.0);
    EXPECT_GE(rep.beta_hat, rep.alpha_hat);
    EXPECT_EQ(rep.n_samples, 1012u);
    EXPECT_EQ(rep.worst_gamma.size(), 5u);
}

TEST(CheckLyapunov, QuarterFunctionFailsOnUnitBall)
{
    const auto rep = check_lyapunov(quarter_V(), vdp(), 1.0);
    EXPECT_FALSE(rep.decreasing);
    EXPECT_LE(rep.gamma_hat, 0.0);
}

TEST(CheckLyapunov, NormSquaredHasAxisWitness)
{
    const auto rep = check_lyapunov(P("x1^2 + x2^2", 2), vdp(), 0.25);
    EXPECT_FALSE(rep.decreasing);
    EXPECT_EQ(rep.gamma_hat, 0.0);
    ASSERT_FALSE(rep.worst_gamma.empty());
    EXPECT_EQ(rep.worst_gamma.front().x[1], 0.0);
    EXPECT_NE(rep.worst_gamma.front().x[0], 0.0);
    EXPECT_EQ(rep.worst_gamma.front().value, 0.0);
}

TEST(CheckLyapunov, ToleranceTightensVerdict)
{
    EXPECT_FALSE(check_lyapunov(quarter_V(), vdp(), 0.25, 1000, 0.01).decreasing);
    EXPECT_TRUE(check_lyapunov(P("x1^2", 1), cubic(), 0.5).decreasing);
}

TEST(CheckLyapunov, LinearQuadraticIsExact)
{
    // grad |x|^2 . A x = -2 |x|^2, so every ratio is exactly 2.
    const auto rep = check_lyapunov(P("x1^2 + x2^2", 2), linear(), 1.0, 200);
    EXPECT_EQ(rep.gamma_hat, 2.0);
    EXPECT_EQ(rep.alpha_hat, 1.0);
    EXPECT_EQ(rep.beta_hat, 1.0);
}

TEST(CheckLyapunov, RejectsBadInput)
{
    EXPECT_THROW(check_lyapunov(P("x1^2 + 1", 1), cubic(), 1.0), std::invalid_argument);
    EXPECT_THROW(check_lyapunov(P("x1^2*t", 1), cubic(), 1.0), std::invalid_argument);
    EXPECT_THROW(check_lyapunov(P("x1^2", 1), cubic(), 0.0), std::invalid_argument);
    EXPECT_THROW(check_lyapunov(P("x1^2", 2), cubic(), 1.0), DimensionMismatch);
}

TEST(Contraction, Cubic)
{
    expect_pass(check_contraction(cubic(), 0.5, 0.3, 1, 6), 500);
}

TEST(Contraction, Linear)
{
    expect_pass(check_contraction(linear(), 1.0, 0.3, 1, 6), 500);
}

TEST(Contraction, VanDerPol)
{
    expect_pass(check_contraction(vdp(), 0.25, 0.2, 1, 6), 500);
}

TEST(Contraction, ReportsPreconditionViolation)
{
    const auto t = check_contraction(cubic(), 1.0, 0.5, 1, 2);
    EXPECT_FALSE(t.precondition_ok);
    EXPECT_FALSE(t.pass());
    EXPECT_THROW(check_contraction(cubic(), 1.0, 0.1, 2, 1), std::invalid_argument);
}

TEST(Extension, Cubic)
{
    expect_pass(check_extension(cubic(), {1.0, 0.1, 12.0, 0.5, 3}, 0.02, 3, 3), 500);
}

TEST(Extension, Linear)
{
    expect_pass(check_extension(linear(), {1.0, 1.0, 1.2, 1.0, 1}, 0.2, 3, 3), 500);
}

TEST(Extension, VanDerPol)
{
    expect_pass(check_extension(vdp(), {2.0, 0.5, 5.1457, 0.25, 3}, 0.05, 3, 3), 500);
}

TEST(Extension, VanDerPolWithReportedConstants)
{
    // K = 1 is exact on B_1 since d/dt |x|^2 <= 0 there.
    expect_pass(check_extension(vdp(), {1.0, 0.542, 2.1, 0.25, 3}, 0.1, 3, 3), 500);
}

TEST(Extension, SkippedWhenErrorSumTooLarge)
{
    const auto t = check_extension(cubic(), {1.0, 0.1, 12.0, 0.5, 3}, 0.08, 6, 1);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_TRUE(t.rows[0].skipped);
    EXPECT_FALSE(t.pass());
}

TEST(Extension, UnderestimatedLipschitzIsReported)
{
    const auto t = check_extension(vdp(), {1.0, 0.542, 1.0, 0.25, 3}, 0.1, 3, 3);
    EXPECT_FALSE(t.precondition_ok);
}

TEST(DerivativeDefect, Cubic)
{
    expect_pass(check_derivative_defect(cubic(), 0.3, 3.0, 1, 6, 0.5), 500);
}

TEST(DerivativeDefect, LinearAtExactLipschitzConstant)
{
    expect_pass(check_derivative_defect(linear(), 0.3, std::sqrt(1.25), 1, 6, 1.0), 500);
}

TEST(DerivativeDefect, VanDerPol)
{
    expect_pass(check_derivative_defect(vdp(), 0.2, 1.684, 1, 6, 0.25), 500);
    EXPECT_FALSE(check_derivative_defect(vdp(), 0.2, 1.6, 1, 2, 0.25).precondition_ok);
}

TEST(PiecewiseDefect, Cubic)
{
    const auto g = extend(cubic(), 3, 3, Rational(1, 50));
    expect_pass(check_piecewise_defect(cubic(), {1.0, 0.1, 12.0, 0.5, 3}, g), 500);
}

TEST(PiecewiseDefect, Linear)
{
    const auto g = extend(linear(), 3, 3, Rational(1, 5));
    expect_pass(check_piecewise_defect(linear(), {1.0, 1.0, 1.2, 1.0, 1}, g), 500);
}

TEST(PiecewiseDefect, VanDerPol)
{
    const auto g = extend(vdp(), 3, 3, Rational(4, 25));
    const StabilityData data{1.0, 0.542, 2.1, 0.25, 3};
    ASSERT_LT(c_of_k(1.0, 0.16, 2.1, 3, 3), 1.0);
    expect_pass(check_piecewise_defect(vdp(), data, g), 500);
}
