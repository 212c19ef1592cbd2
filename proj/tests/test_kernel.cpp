#include "efa/averaging.hpp"
#include "efa/kernel.hpp"
#include "efa/regression.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace efa;

namespace
{
// Composite Simpson on [a, b] with n (even) intervals.
template < typename F >
double simpson(F&& f, double a, double b, int n = 10000)
{
    const double h = (b - a) / n;
    double       s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// Independent moment of K on [−1, 1].
double moment(const Kernel& k, int r)
{
    return simpson([&](double t) { return k(t) * std::pow(t, r); }, -1.0, 1.0);
}
} // namespace

TEST(Kernel, LowestOrderIsParabola)
{
    const auto k = build_kernel(1, 0);
    ASSERT_EQ(k.coeffs().size(), 1u);
    EXPECT_NEAR(k.coeffs()[0], 0.75, 1e-14);
    for (const double t : {-0.9, -0.3, 0.0, 0.5})
        EXPECT_NEAR(k(t), 0.75 * (1 - t * t), 1e-14);
}

TEST(Kernel, ScaledValue)
{
    EXPECT_NEAR(eval_scaled(build_kernel(1, 0), 2.0, 0.0), 0.375, 1e-15);
    EXPECT_EQ(eval_scaled(build_kernel(3, 5), 0.1, 0.1000001), 0.0);
    EXPECT_EQ(eval_scaled(build_kernel(3, 5), 0.1, -0.2), 0.0);
    EXPECT_THROW(eval_scaled(build_kernel(1, 0), 0.0, 0.0), PreconditionError);
}

TEST(Kernel, RejectsBadOrders)
{
    EXPECT_THROW(build_kernel(0, 1), PreconditionError);
    EXPECT_THROW(build_kernel(1, -1), PreconditionError);
}

class KernelFamily : public ::testing::TestWithParam< std::pair< int, int > >
{};

TEST_P(KernelFamily, MomentsAndSymmetry)
{
    const auto [p, q] = GetParam();
    const auto k      = build_kernel(p, q);
    for (int r = 0; r <= p; ++r)
        EXPECT_NEAR(moment(k, r), r == 0 ? 1.0 : 0.0, 1e-10) << "r=" << r;
    for (const double t : {0.1, 0.37, 0.8, 0.999})
        EXPECT_EQ(k(t), k(-t));
    EXPECT_EQ(k(1.0), 0.0);
    EXPECT_EQ(k(-1.5), 0.0);
}

TEST_P(KernelFamily, ScaledMassIsOne)
{
    const auto [p, q] = GetParam();
    const auto k      = build_kernel(p, q);
    for (const double eta : {0.05, 0.3, 2.0})
        EXPECT_NEAR(simpson([&](double x) { return k.scaled(eta, x); }, -eta, eta), 1.0, 1e-10) << eta;
}

INSTANTIATE_TEST_SUITE_P(Pairs, KernelFamily, ::testing::Values(std::pair{1, 0}, std::pair{1, 3}, std::pair{3, 5}, std::pair{5, 3}, std::pair{5, 7}, std::pair{7, 5}, std::pair{2, 2}));

TEST(WeightedAverage, ConstantsAndLinear)
{
    const auto k = build_kernel(3, 2);
    std::vector< double > five(41, 5.0), lin(41);
    const double          h = 0.2 / 40.0, x0 = 0.3 - 0.1;
    for (std::size_t i = 0; i < lin.size(); ++i)
        lin[i] = 2.0 - 3.0 * (x0 + i * h);
    EXPECT_NEAR(weighted_average(k, 0.1, UniformSamples{x0, h, five}, 0.3), 5.0, 1e-12);
    EXPECT_NEAR(weighted_average(k, 0.1, UniformSamples{x0, h, lin}, 0.3), 2.0 - 0.9, 1e-12);
}

TEST(WeightedAverage, Preconditions)
{
    const auto            k = build_kernel(1, 0);
    std::vector< double > f(11, 1.0);
    EXPECT_THROW(weighted_average(k, 0.1, UniformSamples{0.0, 0.01, f}, 0.05), PreconditionError);  // window not covered
    std::vector< double > two(2, 1.0);
    EXPECT_THROW(weighted_average(k, 0.01, UniformSamples{0.0, 0.01, two}, 0.005), PreconditionError);
    std::vector< double > x{0.0, 0.1, 0.25, 0.3}, v(4, 1.0);
    EXPECT_THROW(weighted_average(k, 0.1, x, v, 0.15), PreconditionError);
}

TEST(WeightedAverage, OscillationDecaysAtKernelRate)
{
    const double eta = 0.1;
    for (const int q : {1, 3})
    {
        const auto k = build_kernel(1, q);
        std::vector< std::pair< double, double > > pts;
        for (int i = 0; i < 12; ++i)
        {
            const double eps = eta * 0.02 * std::pow(10.0, i / 11.0);
            const double h   = eps / 64.0;
            const auto   n   = static_cast< std::size_t >(std::ceil(2 * eta / h)) + 1;
            std::vector< double > s(n), c(n);
            for (std::size_t j = 0; j < n; ++j)
            {
                s[j] = std::sin(2 * std::numbers::pi * (-eta + j * h) / eps);
                c[j] = std::cos(2 * std::numbers::pi * (-eta + j * h) / eps);
            }
            pts.emplace_back(eps, std::hypot(weighted_average(k, eta, UniformSamples{-eta, h, s}, 0.0), weighted_average(k, eta, UniformSamples{-eta, h, c}, 0.0)));
        }
        const double slope = fit_loglog_slope(pts);
        EXPECT_GE(slope, q + 1.5);
        EXPECT_LE(slope, q + 2.8);
    }
}

TEST(SpaceTimeAverage, ConstantAndTimeIndependentFields)
{
    const auto         k = build_kernel(3, 3);
    SpaceTimeGrid< 2 > g;
    g.t0 = -0.05;
    g.dt = 0.005;
    g.nt = 21;
    g.h  = 0.01;
    g.x0 = {-0.1, -0.1};
    g.nx = {21, 21};
    SpaceTimeSamples< 2 > c{g, std::vector< double >(g.size(), 2.5)};
    EXPECT_NEAR(space_time_average< 2 >(k, k, 0.1, 0.05, c, 0.0, {0.0, 0.0}), 2.5, 1e-10);

    SpaceTimeGrid< 1 > g1;
    g1.t0 = -0.05;
    g1.dt = 0.005;
    g1.nt = 21;
    g1.h  = 0.01;
    g1.x0 = {-0.1};
    g1.nx = {21};
    std::vector< double > gx(21), f(g1.size());
    for (std::size_t i = 0; i < 21; ++i)
        gx[i] = std::cos(3.0 * (-0.1 + 0.01 * i));
    for (std::size_t it = 0; it < g1.nt; ++it)
        for (std::size_t i = 0; i < 21; ++i)
            f[it * 21 + i] = gx[i];
    EXPECT_NEAR(space_time_average< 1 >(k, k, 0.1, 0.05, SpaceTimeSamples< 1 >{g1, f}, 0.0, {0.0}), weighted_average(k, 0.1, UniformSamples{-0.1, 0.01, gx}, 0.0), 1e-12);
}

TEST(SpaceTimeAverage, Separable2DMatches1D)
{
    const auto         k   = build_kernel(3, 3);
    const double       eps = 0.02, h = eps / 32.0;
    const std::size_t  n   = static_cast< std::size_t >(std::lround(0.2 / h)) + 1;
    SpaceTimeGrid< 2 > g;
    g.t0 = 0.0;
    g.dt = 0.01;
    g.nt = 3;
    g.h  = h;
    g.x0 = {-0.1, -0.1};
    g.nx = {n, n};
    std::vector< double > f(g.size()), f1(n);
    for (std::size_t i = 0; i < n; ++i)
        f1[i] = std::sin(2 * std::numbers::pi * (-0.1 + i * h) / eps + 0.3);
    for (std::size_t it = 0; it < 3; ++it)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                f[(it * n + i) * n + j] = f1[i];
    const double a2 = space_time_average< 2 >(k, k, 0.1, 0.01, SpaceTimeSamples< 2 >{g, f}, 0.01, {0.0, 0.0});
    const double a1 = weighted_average(k, 0.1, UniformSamples{-0.1, h, f1}, 0.0);
    EXPECT_NEAR(a2, a1, 1e-13);
}
