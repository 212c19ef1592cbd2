#include "efa/coefficient.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace efa;

namespace
{
template < int D >
void expect_within_bounds(const CoefficientField< D >& f, double extent)
{
    std::mt19937_64                          rng(3);
    std::uniform_real_distribution< double > u(0.0, extent);
    for (int n = 0; n < 20000; ++n)
    {
        Point< D > x;
        for (auto& v : x)
            v = u(rng);
        const auto a = f(x);
        ASSERT_TRUE(is_symmetric(a));
        // Eigenvalues of a symmetric D×D matrix.
        double lo, hi;
        if constexpr (D == 1)
            lo = hi = a(0, 0);
        else
        {
            const double m = 0.5 * (a(0, 0) + a(1, 1));
            const double r = std::hypot(0.5 * (a(0, 0) - a(1, 1)), a(0, 1));
            lo             = m - r;
            hi             = m + r;
        }
        ASSERT_GE(lo, f.lower_bound() * (1 - 1e-12)) << f.name();
        ASSERT_LE(hi, f.upper_bound() * (1 + 1e-12)) << f.name();
    }
}
} // namespace

TEST(Coefficient, Formulas)
{
    const double tp = 2 * std::numbers::pi;
    EXPECT_DOUBLE_EQ(per1d_sin(0.1)({0.025})(0, 0), 1.1 + std::sin(tp * 0.25));
    EXPECT_DOUBLE_EQ(locper1d(0.1)({0.3})(0, 0), (1.5 + std::sin(tp * 0.3)) * (1.5 + std::sin(tp * 3.0)));
    const double y = 0.37 / 0.05;
    EXPECT_DOUBLE_EQ(almostper1d(0.05)({0.37})(0, 0), 0.25 * std::exp(std::sin(tp * std::numbers::sqrt2 * y) + std::sin(tp * y)));
    const auto a = aniso2d(1.0, 0.5, 1.41)({0.2, 0.7});
    const double s = (1.0 / 3.0) * (1.5 + std::sin(tp * 0.2)) * (1.5 + 0.5 * (std::cos(tp * 1.41 * 0.2) + std::cos(tp * 0.7)));
    EXPECT_DOUBLE_EQ(a(0, 0), s);
    EXPECT_DOUBLE_EQ(a(0, 1), 0.5 * s);
    const auto b = iso2d(1.0)({0.1, 0.6});
    EXPECT_DOUBLE_EQ(b(0, 0), 1.0 / (1.1 + std::cos(tp * 0.1) * std::sin(tp * 0.6) + std::exp(std::cos(tp * 0.1) + std::sin(tp * 0.6))));
    EXPECT_EQ(b(0, 1), 0.0);
}

TEST(Coefficient, EllipticityBoundsHold)
{
    expect_within_bounds(per1d_sin(0.01), 1.0);
    expect_within_bounds(locper1d(0.01), 1.0);
    expect_within_bounds(almostper1d(0.01), 1.0);
    expect_within_bounds(almostper1d(0.01, 1.41), 1.0);
    expect_within_bounds(iso2d(0.05), 1.0);
    expect_within_bounds(aniso2d(0.05, 0.0), 1.0);
    expect_within_bounds(aniso2d(0.05, 0.5), 1.0);
    expect_within_bounds(aniso2d(0.05, -0.9, 1.41), 1.0);
    expect_within_bounds(constant_coefficient< 2 >(2.0), 1.0);
}

TEST(Coefficient, Periods)
{
    ASSERT_TRUE(per1d_sin(0.1).cell_period());
    EXPECT_EQ((*per1d_sin(0.1).cell_period())[0], 1.0);
    EXPECT_FALSE(locper1d(0.1).cell_period());
    EXPECT_FALSE(almostper1d(0.1).cell_period());
    ASSERT_TRUE(almostper1d(0.1, 1.41).cell_period());
    EXPECT_NEAR((*almostper1d(0.1, 1.41).cell_period())[0], 100.0, 1e-12);
    // The periodized field repeats after 100 fast cells.
    const auto f = almostper1d(1.0, 1.41);
    for (const double x : {0.1, 0.77, 3.3})
        EXPECT_NEAR(f({x})(0, 0), f({x + 100.0})(0, 0), 1e-11);
    EXPECT_EQ((*aniso2d(1.0, 0.2, 1.41).cell_period())[1], 1.0);
}

TEST(Coefficient, SupNormAndGershgorin)
{
    EXPECT_NEAR(sup_norm(per1d_sin(0.1)), 2.1 * 1.05, 1e-3);
    EXPECT_NEAR(sup_norm(constant_coefficient< 1 >(1.0)), 1.05, 1e-12);
    EXPECT_LE(sampled_gershgorin(aniso2d(0.05, 0.5)), aniso2d(0.05, 0.5).upper_bound() + 1e-12);
}

TEST(Coefficient, Registry)
{
    EXPECT_EQ(builtin_coefficient< 1 >("per1d_sin", 0.1).name(), "per1d_sin");
    EXPECT_EQ(builtin_coefficient< 1 >("per1d_sin", 0.1, {{"alpha", 2.0}})({0.0})(0, 0), 2.0);
    EXPECT_EQ(builtin_coefficient< 2 >("aniso2d", 0.1, {{"c", 0.5}})({0.0, 0.0})(0, 1), 0.5 * builtin_coefficient< 2 >("aniso2d", 0.1, {{"c", 0.5}})({0.0, 0.0})(0, 0));
    EXPECT_EQ(builtin_coefficient< 2 >("constant", 0.1, {{"c", 3.0}})({0.4, 0.1})(1, 1), 3.0);
    EXPECT_THROW(builtin_coefficient< 1 >("iso2d", 0.1), ConfigError);
    EXPECT_THROW(builtin_coefficient< 2 >("nope", 0.1), ConfigError);
    EXPECT_THROW(builtin_coefficient< 1 >("locper1d", 0.1, {{"alpha", 1.0}}), ConfigError);
    EXPECT_THROW(builtin_coefficient< 1 >("per1d_sin", -0.1), ConfigError);
    EXPECT_THROW(per1d_sin(0.1, 0.9), ConfigError);
    EXPECT_THROW(aniso2d(0.1, 1.0), ConfigError);
    EXPECT_THROW(constant_coefficient< 1 >(0.0), ConfigError);
}
