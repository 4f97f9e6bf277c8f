#include "convlyap/dynamics.hpp"
#include "support/systems.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace convlyap;
using namespace convlyap::testing;

TEST(Shortest, RoundTripFormatting)
{
    EXPECT_EQ(shortest(0.3), "0.3");
    EXPECT_EQ(shortest(1.0), "1");
    EXPECT_EQ(shortest(-2.5e-7), "-2.5e-07");
    EXPECT_EQ(std::stod(shortest(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Rk4, FourthOrderConvergence)
{
    const auto f = parse_system("x1' = -x1");
    const std::vector<double> x0{1.0};
    double prev = 0.0;
    for (double h : {0.1, 0.05, 0.025}) {
        const double err = std::abs(simulate(f, x0, 1.0, h).final_state()[0] - std::exp(-1.0));
        if (prev > 0.0) EXPECT_NEAR(prev / err, 16.0, 1.0);
        prev = err;
    }
}

TEST(Simulate, CubicMatchesClosedForm)
{
    const std::vector<double> x0{1.0};
    const auto tr = simulate(cubic(), x0, 2.0, 1e-3);
    ASSERT_EQ(tr.times.size(), 2001u);
    EXPECT_FALSE(tr.diverged);
    for (std::size_t i = 0; i < tr.times.size(); i += 250)
        EXPECT_NEAR(tr.states[i][0], 1.0 / std::sqrt(1.0 + 2.0 * tr.times[i]), 1e-12);
}

TEST(Simulate, LinearNormDecaysExactlyExponentially)
{
    // A = -I + skew, so |x(t)| = e^{-t} |x0|.
    const std::vector<double> x0{0.6, -0.8};
    const auto tr = simulate(linear(), x0, 3.0, 1e-3);
    for (std::size_t i = 0; i < tr.times.size(); i += 500) EXPECT_NEAR(norm2(tr.states[i]), std::exp(-tr.times[i]), 1e-12);
}

TEST(Simulate, VanDerPolNormNonIncreasingInUnitBall)
{
    // d/dt |x|^2 = 2 x2^2 (x1^2 - 1) <= 0 while |x1| <= 1.
    for (const auto& x0 : sphere_points(2, 0.9, 16)) {
        const auto tr = simulate(vdp(), x0, 5.0, 1e-3);
        for (std::size_t i = 1; i < tr.states.size(); ++i) EXPECT_LE(norm2(tr.states[i]), norm2(tr.states[i - 1]) + 1e-14);
    }
}

TEST(Simulate, BlowUpIsFlagged)
{
    const std::vector<double> x0{1.0};
    const auto tr = simulate(parse_system("x1' = x1^2"), x0, 2.0, 1e-3);
    EXPECT_TRUE(tr.diverged);
    EXPECT_NEAR(tr.times.back(), 1.0, 0.01);  // the solution 1/(1 - t) escapes at t = 1
}

TEST(Simulate, RejectsBadArguments)
{
    const std::vector<double> x0{1.0};
    EXPECT_THROW(simulate(cubic(), x0, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(simulate(cubic(), x0, 0.0, 0.1), std::invalid_argument);
    EXPECT_THROW(simulate(vdp(), x0, 1.0, 0.1), DimensionMismatch);
}

TEST(Trajectory, CsvLayout)
{
    const std::vector<double> x0{0.5, 0.0};
    const auto tr = simulate(linear(), x0, 0.2, 0.1);
    std::ostringstream os;
    tr.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "t,x1,x2");
    std::getline(is, line);
    EXPECT_EQ(line, "0,0.5,0");
    std::size_t rows = 1;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 3u);
}

TEST(Halton, RadicalInverse)
{
    EXPECT_DOUBLE_EQ(radical_inverse(1, 2), 0.5);
    EXPECT_DOUBLE_EQ(radical_inverse(3, 2), 0.75);
    EXPECT_DOUBLE_EQ(radical_inverse(6, 2), 0.375);
    EXPECT_DOUBLE_EQ(radical_inverse(1, 3), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(radical_inverse(5, 3), 7.0 / 9.0);
}

TEST(SpherePoints, OnTheSphereAndDeterministic)
{
    for (std::size_t n : {1u, 2u, 3u, 5u}) {
        const auto pts = sphere_points(n, 0.7, 40);
        ASSERT_EQ(pts.size(), 40u);
        for (const auto& p : pts) EXPECT_NEAR(norm2(p), 0.7, 1e-14);
        EXPECT_EQ(pts, sphere_points(n, 0.7, 40));
    }
    const auto one = sphere_points(1, 2.0, 3);
    EXPECT_EQ(one[0][0], 2.0);
    EXPECT_EQ(one[1][0], -2.0);
}

TEST(BallGrid, CountsLatticePoints)
{
    std::size_t count = 0;
    for_each_ball_grid_point(2, 1.0, 3, [&](std::span<const double>) { ++count; });
    EXPECT_EQ(count, 5u);  // the centre and the four axis points
    count = 0;
    for_each_ball_grid_point(1, 1.0, 101, [&](std::span<const double> x) {
        EXPECT_LE(std::abs(x[0]), 1.0);
        ++count;
    });
    EXPECT_EQ(count, 101u);
}

TEST(EstimateL, LinearIsSpectralNorm)
{
    EXPECT_NEAR(estimate_L(linear(), 1.0, 11), std::sqrt(1.25), 1e-12);
}

TEST(EstimateL, CubicIsThreeRSquared)
{
    EXPECT_NEAR(estimate_L(cubic(), 0.5, 101), 0.75, 1e-12);
}

TEST(EstimateL, VanDerPolFrozen)
{
    // Lattice maxima, reproduced in tests/oracles/derived_values.py. The true sup on
    // the circle is slightly larger (2.09429 on B_1).
    EXPECT_NEAR(estimate_L(vdp(), 1.0), 2.091088, 1e-6);
    EXPECT_NEAR(estimate_L(vdp(), 0.5), 1.6835, 1e-4);
    EXPECT_NEAR(estimate_L(vdp(), 2.0), 5.0948, 1e-4);
}

TEST(EstimateQ, Examples)
{
    EXPECT_NEAR(estimate_Q(cubic(), 1.0), 1.0, 1e-15);
    EXPECT_NEAR(estimate_Q(linear(), 2.0, 21), 2.0 * std::sqrt(1.25), 1e-12);
    EXPECT_NEAR(estimate_Q(vdp(), 0.5), 0.783, 1e-3);
}

TEST(EstimateKLambda, LinearIsExact)
{
    EstimateOptions opt;
    opt.samples = 8;
    opt.t_end = 10.0;
    const auto rep = estimate_K_lambda(linear(), 1.0, opt);
    EXPECT_NEAR(rep.lambda_hat, 1.0, 1e-9);
    EXPECT_NEAR(rep.K_hat, 1.0, 1e-9);
    EXPECT_TRUE(rep.stable());
    EXPECT_LT(rep.fit_residual, 1e-9);
}

TEST(EstimateKLambda, VanDerPolRateNearLinearization)
{
    // The linearization at 0 has eigenvalues -1/2 +- i sqrt(3)/2.
    const auto rep = estimate(vdp(), 1.0);
    EXPECT_NEAR(rep.lambda_hat, 0.5, 0.015);
    EXPECT_NEAR(rep.lambda_hat, 0.49823, 1e-5);
    EXPECT_NEAR(rep.K_hat, 2.2104, 1e-4);
    EXPECT_NEAR(rep.L_hat, 2.091088, 1e-6);
    EXPECT_EQ(rep.samples, 32u);
}

TEST(EstimateKLambda, UnstableFieldReportsStart)
{
    const auto rep = estimate_K_lambda(parse_system("x1' = x1"), 0.5);
    EXPECT_FALSE(rep.stable());
    ASSERT_TRUE(rep.unstable_start.has_value());
    EXPECT_EQ(rep.unstable_start->at(0), 0.5);
}

TEST(EstimateKLambda, RejectsBadOptions)
{
    EXPECT_THROW(estimate_K_lambda(cubic(), 0.0), std::invalid_argument);
    EstimateOptions opt;
    opt.samples = 0;
    EXPECT_THROW(estimate_K_lambda(cubic(), 1.0, opt), std::invalid_argument);
    opt.samples = 4;
    opt.tail_fraction = 0.0;
    EXPECT_THROW(estimate_K_lambda(cubic(), 1.0, opt), std::invalid_argument);
}
