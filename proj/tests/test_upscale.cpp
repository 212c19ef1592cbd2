#include "efa/upscale.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <thread>

using namespace efa;

TEST(ReferenceFlux, Arithmetic)
{
    QuadraticPoly< 1 > q;
    q.hess(0, 0) = 2.0;
    EXPECT_NEAR(reference_flux(Matrix< 1 >::identity(std::sqrt(0.21)), q), 0.916515, 1e-6);
    EXPECT_EQ(reference_flux(Matrix< 2 >::identity(), QuadraticPoly< 2 >{}), 0.0);
    Matrix< 2 >        a;
    a(0, 0) = 2.0;
    a(1, 1) = 3.0;
    QuadraticPoly< 2 > q2;
    q2.hess = Matrix< 2 >::identity();
    EXPECT_EQ(reference_flux(a, q2), 5.0);
    a(0, 1) = 1.0;
    EXPECT_THROW(reference_flux(a, q2), PreconditionError);
}

TEST(Upscale, ConstantCoefficient)
{
    for (const double c : {0.5, 2.0})
    {
        QuadraticPoly< 1 > q;
        q.hess(0, 0) = 2.0;
        EXPECT_NEAR(upscale_flux(constant_coefficient< 1 >(c, 0.05), q, make_upscale_config(3, 5, 0.1, 0.1)), 2 * c, 1e-9);
        const auto a = effective_tensor_probe(Medium< 2 >(constant_coefficient< 2 >(c, 0.05)), make_upscale_config(3, 3, 0.1, 0.1, {10, 0.9}), {0.3, 0.4});
        EXPECT_NEAR(a(0, 0), c, 1e-9);
        EXPECT_NEAR(a(1, 1), c, 1e-9);
        EXPECT_NEAR(a(0, 1), 0.0, 1e-9);
    }
}

TEST(Upscale, PeriodicRegression)
{
    // ε = 0.01, η = τ = 0.1, (p, q) = (3, 5); 64 points per ε resolve the cell.
    QuadraticPoly< 1 > q;
    q.hess(0, 0) = 2.0;
    const double F = upscale_flux(per1d_sin(0.01), q, make_upscale_config(3, 5, 0.1, 0.1, {64, 0.9}));
    EXPECT_LE(std::abs(F - 2 * std::sqrt(0.21)), 1e-4);
}

TEST(Upscale, StoredSamplesMatchOnTheFly)
{
    QuadraticPoly< 2 > q;
    q.hess(0, 0) = 1.0;
    q.hess(0, 1) = q.hess(1, 0) = 0.3;
    const Medium< 2 > m(aniso2d(0.05, 0.5));
    const auto        cfg = make_upscale_config(3, 5, 0.1, 0.1, {10, 0.9});
    EXPECT_NEAR(upscale_flux(solve_micro(micro_spec_for(m, q, cfg)), q.center, cfg), upscale_flux(m, q, cfg), 1e-13);
}

TEST(Upscale, LinearInHessianAndProbeTensor)
{
    std::mt19937_64                          rng(9);
    std::uniform_real_distribution< double > u(-2.0, 2.0);
    const Medium< 2 >                        m(aniso2d(0.05, 0.5));
    const auto                               cfg = make_upscale_config(3, 5, 0.1, 0.1, {10, 0.9});
    const Point< 2 >                         xc{0.13, 0.41};
    const auto                               a   = effective_tensor_probe(m, cfg, xc);
    EXPECT_TRUE(is_symmetric(a));
    for (int n = 0; n < 3; ++n)
    {
        QuadraticPoly< 2 > h1, h2;
        h1.center = h2.center = xc;
        h1.hess(0, 0) = u(rng);
        h1.hess(1, 1) = u(rng);
        h1.hess(0, 1) = h1.hess(1, 0) = u(rng);
        h2.hess(0, 1) = h2.hess(1, 0) = u(rng);
        const double al = u(rng), be = u(rng);
        QuadraticPoly< 2 > comb;
        comb.center = xc;
        comb.hess   = al * h1.hess + be * h2.hess;
        const double F1 = upscale_flux(m, h1, cfg), F2 = upscale_flux(m, h2, cfg), Fc = upscale_flux(m, comb, cfg);
        EXPECT_NEAR(Fc, al * F1 + be * F2, 1e-10 * (1 + std::abs(Fc)));
        EXPECT_NEAR(F1, contract(a, h1.hess), 1e-10 * (1 + std::abs(F1)));
    }
}

TEST(Upscale, AffineInvariance)
{
    QuadraticPoly< 1 > q;
    q.hess(0, 0) = 2.0;
    const auto   cfg = make_upscale_config(5, 3, 0.1, 0.1, {20, 0.9});
    const auto   f   = locper1d(0.02);
    const double F   = upscale_flux(f, q, cfg);
    q.c0      = -4.0;
    q.grad[0] = 7.5;
    EXPECT_NEAR(upscale_flux(f, q, cfg), F, 1e-10 * std::abs(F));
}

TEST(Upscale, Consistency)
{
    // Kernel average of u^{ε,η} reproduces û(x_c) up to 10 (ε/η)^{q+2} |tr hess|.
    const double       eps = 0.02, eta = 0.1;
    const int          qk  = 5;
    QuadraticPoly< 1 > q;
    q.center[0]  = 0.3;
    q.c0         = 1.2;
    q.grad[0]    = -0.7;
    q.hess(0, 0) = 2.0;
    const auto cfg = make_upscale_config(3, qk, eta, eta, {64, 0.9});
    const auto mf  = solve_micro(micro_spec_for(Medium< 1 >(per1d_sin(eps)), q, cfg));
    const double avg = space_time_average< 1 >(cfg.kernel_space, cfg.kernel_time, 0.5 * cfg.window_eta(), 0.5 * cfg.window_tau(), mf.solution, 0.0, q.center);
    EXPECT_LE(std::abs(avg - q.c0), 10 * std::pow(eps / eta, qk + 2) * 2.0);
}

TEST(Upscale, HalfWindowConvention)
{
    const auto full = make_upscale_config(3, 5, 0.1, 0.2);
    const auto half = make_upscale_config(3, 5, 0.1, 0.2, {}, ReusePolicy::per_call, WindowConvention::half_window);
    EXPECT_DOUBLE_EQ(full.window_eta(), 0.2);
    EXPECT_DOUBLE_EQ(full.window_tau(), 0.4);
    EXPECT_DOUBLE_EQ(half.window_eta(), 0.1);
    EXPECT_DOUBLE_EQ(half.window_tau(), 0.2);
    QuadraticPoly< 1 > q;
    q.hess(0, 0) = 2.0;
    EXPECT_NEAR(upscale_flux(constant_coefficient< 1 >(1.3, 0.05), q, half), 2.6, 1e-9);
}

TEST(Upscale, RequiresWindowAboveEpsilon)
{
    QuadraticPoly< 1 > q;
    EXPECT_THROW(upscale_flux(per1d_sin(0.2), q, make_upscale_config(3, 5, 0.1, 0.1)), PreconditionError);
}

TEST(EffectiveTensorCache, IdempotentConcurrentFills)
{
    EffectiveTensorCache< 1 > cache;
    std::atomic< int >        computed{0};
    std::vector< std::jthread > pool;
    for (int t = 0; t < 4; ++t)
        pool.emplace_back([&] {
            for (std::size_t k = 0; k < 50; ++k)
                cache.get_or_compute(k % 10, [&] {
                    ++computed;
                    return Matrix< 1 >::identity(static_cast< double >(k % 10));
                });
        });
    pool.clear();
    EXPECT_EQ(cache.size(), 10u);
    for (std::size_t k = 0; k < 10; ++k)
        EXPECT_EQ((*cache.find(k))(0, 0), static_cast< double >(k));
    EXPECT_GE(computed.load(), 10);
    EXPECT_FALSE(cache.find(99));
}
