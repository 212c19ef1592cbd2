#ifndef EFA_ACCEPTANCE_HPP
#define EFA_ACCEPTANCE_HPP

#include "efa/experiments.hpp"
#include "efa/kernel.hpp"
#include "efa/micro.hpp"
#include "efa/reference.hpp"
#include "efa/regression.hpp"
#include "efa/upscale.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace efa::acceptance
{
struct Result
{
    int         id = 0;
    std::string title;
    bool        pass = false;
    std::string measured;
    double      seconds = 0.0;
};

struct Options
{
    std::filesystem::path out;  ///< CSV output directory; empty writes nothing
    int                   workers = 1;
    std::vector< int >    only;  ///< subset of criterion ids; empty runs all
};

/// Criteria that cannot be met as stated; see the README for the analysis.
inline const std::vector< int > known_failures{3};

inline std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline std::string sci(double v) { return fmt("%.3e", v); }

// Experiment configurations used by the acceptance criteria. Copies live in configs/acceptance/.
namespace configs
{
inline const char* upscaling_rate = R"(# Upscaling error vs epsilon for 1.1 + sin(2 pi x / eps), u = x^2.
[experiment]
kind = upscaling
name = upscaling_rate

[coefficient]
name = per1d_sin
alpha = 1.1

[sweep]
epsilons = 1/50, 1/80, 1/125, 1/200, 1/320

[upscale]
eta = 0.1
tau = 0.1
kernels = 7:1, 7:3, 7:5
points_per_epsilon = 256
)";

inline const char* solution_almost_periodic = R"(# EFA vs homogenized solution, almost-periodic medium, Gaussian pulse.
[experiment]
kind = solution1d
name = solution_ap1d

[coefficient]
name = almostper1d
ratio = 1.41

[sweep]
epsilons = 1/50, 1/80, 1/125, 1/200, 1/320

[upscale]
eta = 0.1
kernels = 5:1, 5:3, 7:3, 7:5
points_per_epsilon = 64

[macro]
L = 3
N = 50
dt = 0.01
T = 1
bc = periodic

[initial]
g = gaussian
center = 1.5
sigma = 0.08
)";

inline const char* dns_locally_periodic = R"(# EFA vs local average of a direct simulation, locally periodic medium.
[experiment]
kind = solution1d
name = dns_locper1d

[coefficient]
name = locper1d

[sweep]
epsilons = 0.01

[upscale]
eta = 0.1
kernels = 3:5
points_per_epsilon = 64

[macro]
L = 3
N = 300
T = 1
bc = periodic

[initial]
g = gaussian
center = 1.5
sigma = 0.08

[dns]
enabled = true
epsilon = 0.01
points_per_epsilon = 10
tolerance = 0.05
)";

inline const char* dns_almost_periodic = R"(# EFA vs local average of a direct simulation, almost-periodic medium.
[experiment]
kind = solution1d
name = dns_ap1d

[coefficient]
name = almostper1d
ratio = 1.41

[sweep]
epsilons = 0.01

[upscale]
eta = 0.1
kernels = 3:5
points_per_epsilon = 64

[macro]
L = 3
N = 300
T = 1
bc = periodic

[initial]
g = gaussian
center = 1.5
sigma = 0.08

[dns]
enabled = true
epsilon = 0.01
points_per_epsilon = 10
tolerance = 0.05
)";

inline std::string dns_2d(const char* name, const char* c)
{
    return std::string("# EFA vs local average of a direct simulation, 2D medium.\n[experiment]\nkind = solution2d\nname = ") + name +
           "\n\n[coefficient]\nname = aniso2d\nratio = 1.41\nc = " + c + R"(

[sweep]
epsilons = 0.05

[upscale]
eta = 0.25
kernels = 5:7
points_per_epsilon = 10

[macro]
L = 1
N = 60
T = 0.5
bc = periodic

[initial]
g = sin_cos
velocity = 1

[dns]
enabled = true
epsilon = 0.05
points_per_epsilon = 10
tolerance = 0.10
)";
}

inline const char* determinism_sweep = R"(# Small sweep used by the determinism check.
[experiment]
kind = upscaling
name = det_sweep

[coefficient]
name = per1d_sin

[sweep]
epsilons = 1/20, 1/32, 1/50

[upscale]
eta = 0.1
kernels = 3:3, 5:5
points_per_epsilon = 20
)";

inline const char* determinism_solution = R"(# Small solution comparison used by the determinism check.
[experiment]
kind = solution1d
name = det_solution

[coefficient]
name = per1d_sin

[sweep]
epsilons = 1/20, 1/32

[upscale]
eta = 0.1
kernels = 3:3
points_per_epsilon = 20

[macro]
L = 1
N = 20
T = 0.2
bc = periodic
snapshots = 0.1

[initial]
g = gaussian
center = 0.5
sigma = 0.1

[dns]
enabled = true
epsilon = 0.05
points_per_epsilon = 10
tolerance = 1
)";
} // namespace configs

namespace detail
{
inline ErrorReport run_config(const std::string& text, const Options& opt)
{
    return run_experiment(parse_experiment(Config::parse_string(text)), RunOptions{opt.out, opt.workers});
}

inline std::string slopes_text(const ErrorReport& r)
{
    std::string s;
    for (const auto& sl : r.slopes)
    {
        if (!s.empty())
            s += "; ";
        s += "p=" + std::to_string(sl.p) + ",q=" + std::to_string(sl.q) + ": " + fmt("%.3f", sl.slope) + " in [" + fmt("%.1f", sl.lower) + "," + fmt("%.1f", sl.upper) + "]" +
             (sl.pass ? "" : " (out)");
    }
    return s;
}

template < int D >
QuadraticPoly< D > random_quadratic(std::mt19937_64& rng, double spread = 3.0)
{
    std::uniform_real_distribution< double > u(-spread, spread), c(-1.0, 1.0);
    QuadraticPoly< D >                       q;
    for (int i = 0; i < D; ++i)
    {
        q.center[i] = c(rng);
        q.grad[i]   = u(rng);
    }
    q.c0 = u(rng);
    for (int i = 0; i < D; ++i)
        for (int j = i; j < D; ++j)
        {
            q.hess(i, j) = u(rng);
            q.hess(j, i) = q.hess(i, j);
        }
    return q;
}

/// L²(Y) distance between the piecewise (bi)linear interpolant of nodal values and a function,
/// by 3-point Gauss quadrature per cell and axis.
template < int D >
double interpolant_l2_error(const InvariantMeasure< D >& m, const std::function< double(const Point< D >&) >& exact)
{
    constexpr double gx[3] = {0.5 - 0.38729833462074170, 0.5, 0.5 + 0.38729833462074170};
    constexpr double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    const int        N     = m.N;
    const double     h0    = m.period[0] / N;
    double           s     = 0.0;
    if constexpr (D == 1)
    {
        for (int i = 0; i < N; ++i)
            for (int a = 0; a < 3; ++a)
            {
                const double v = (1 - gx[a]) * m.rho[i] + gx[a] * m.rho[(i + 1) % N];
                const double e = v - exact({(i + gx[a]) * h0});
                s += gw[a] * h0 * e * e;
            }
    }
    else
    {
        const double h1 = m.period[1] / N;
        auto         at = [&](int i, int j) { return m.rho[static_cast< std::size_t >(i % N) * N + (j % N)]; };
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                    {
                        const double x = gx[a], y = gx[b];
                        const double v = (1 - x) * (1 - y) * at(i, j) + x * (1 - y) * at(i + 1, j) + (1 - x) * y * at(i, j + 1) + x * y * at(i + 1, j + 1);
                        const double e = v - exact({(i + x) * h0, (j + y) * h1});
                        s += gw[a] * gw[b] * h0 * h1 * e * e;
                    }
    }
    return std::sqrt(s);
}

inline bool same_files(const std::filesystem::path& a, const std::filesystem::path& b, std::string& why)
{
    namespace fs = std::filesystem;
    std::vector< std::string > la, lb;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file())
            la.push_back(fs::relative(e.path(), a).string());
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file())
            lb.push_back(fs::relative(e.path(), b).string());
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    if (la != lb || la.empty())
    {
        why = "file sets differ";
        return false;
    }
    for (const auto& f : la)
    {
        std::ifstream      fa(a / f, std::ios::binary), fb(b / f, std::ios::binary);
        const std::string  ca((std::istreambuf_iterator< char >(fa)), {}), cb((std::istreambuf_iterator< char >(fb)), {});
        if (ca != cb)
        {
            why = f + " differs";
            return false;
        }
    }
    why = std::to_string(la.size()) + " files identical";
    return true;
}
} // namespace detail

struct Criterion
{
    int                                         id;
    std::string                                 title;
    std::function< Result(const Options&) >     run;
};

inline std::vector< Criterion > criteria()
{
    using namespace std::numbers;
    std::vector< Criterion > c;

    c.push_back({1, "harmonic mean 1D = sqrt(0.21) within 1e-10, < 1 s", [](const Options&) {
                     const auto   t0 = std::chrono::steady_clock::now();
                     const double a0 = harmonic_mean< 1 >([](const Point< 1 >& y) { return 1.1 + std::sin(2.0 * pi * y[0]); }).value;
                     const double dt = std::chrono::duration< double >(std::chrono::steady_clock::now() - t0).count();
                     const double err = std::abs(a0 - std::sqrt(0.21));
                     return Result{1, "", err <= 1e-10 && dt < 1.0, "a0=" + fmt("%.15f", a0) + " |err|=" + sci(err)};
                 }});

    c.push_back({2, "harmonic mean 2D = 0.3699698702 within 1e-8, < 30 s", [](const Options&) {
                     const auto t0  = std::chrono::steady_clock::now();
                     const auto hm  = harmonic_mean(iso2d(1.0));
                     const double dt = std::chrono::duration< double >(std::chrono::steady_clock::now() - t0).count();
                     const double err = std::abs(hm.value - 0.3699698702);
                     return Result{2, "", err <= 1e-8 && dt < 30.0,
                                   "a0=" + fmt("%.12f", hm.value) + " |err|=" + sci(err) + " at " + std::to_string(hm.resolution) + "^2 points"};
                 }});

    c.push_back({3, "periodized almost-periodic references (1D 1.302004095265470, 2D 0.485228277332784) within 1e-6", [](const Options&) {
                     const double a1 = harmonic_mean(almostper1d(1.0, 1.41)).value;
                     const double a2 = harmonic_mean(aniso2d(1.0, 0.0, 1.41)).value;
                     const double e1 = std::abs(a1 - 1.302004095265470), e2 = std::abs(a2 - 0.485228277332784);
                     return Result{3, "", e1 <= 1e-6 && e2 <= 1e-6,
                                   "1D a0=" + fmt("%.15f", a1) + " |err|=" + sci(e1) + (e1 <= 1e-6 ? "" : " (FAIL)") + "; 2D a0=" + fmt("%.15f", a2) + " |err|=" + sci(e2)};
                 }});

    c.push_back({4, "upscaling rate, eta=tau=0.1, slopes in [q+1.3, q+2.8] for q=1,3,5, < 5 min", [](const Options& o) {
                     const auto t0 = std::chrono::steady_clock::now();
                     const auto r  = detail::run_config(configs::upscaling_rate, o);
                     const double dt = std::chrono::duration< double >(std::chrono::steady_clock::now() - t0).count();
                     return Result{4, "", r.pass() && dt < 300.0, detail::slopes_text(r)};
                 }});

    c.push_back({5, "constant-coefficient exactness, 50 random cases, |F - c tr H| <= 1e-9 (1 + |tr H|)", [](const Options&) {
                     std::mt19937_64 rng(20240501);
                     const double    cs[3] = {0.5, 1.0, 2.0};
                     const KernelPair ks[3] = {{1, 0}, {3, 5}, {5, 7}};
                     double          worst = 0.0;
                     for (int n = 0; n < 50; ++n)
                     {
                         const double c   = cs[n % 3];
                         const auto   k   = ks[(n / 3) % 3];
                         const auto   cfg = make_upscale_config(k.p, k.q, 0.1, 0.1, {10, 0.9});
                         double       F, tr;
                         if (n % 2 == 0)
                         {
                             const auto q = detail::random_quadratic< 1 >(rng);
                             F            = upscale_flux(constant_coefficient< 1 >(c, 0.05), q, cfg);
                             tr           = trace(q.hess);
                         }
                         else
                         {
                             const auto q = detail::random_quadratic< 2 >(rng);
                             F            = upscale_flux(constant_coefficient< 2 >(c, 0.05), q, cfg);
                             tr           = trace(q.hess);
                         }
                         worst = std::max(worst, std::abs(F - c * tr) / (1.0 + std::abs(tr)));
                     }
                     return Result{5, "", worst <= 1e-9, "max |F - c tr H|/(1+|tr H|) = " + sci(worst)};
                 }});

    c.push_back({6, "affine invariance, |dF| <= 1e-10 relative", [](const Options&) {
                     std::mt19937_64                          rng(7);
                     std::uniform_real_distribution< double > u(-5.0, 5.0);
                     double                                   worst = 0.0;
                     const auto cfg = make_upscale_config(3, 5, 0.1, 0.1, {20, 0.9});
                     for (int n = 0; n < 12; ++n)
                     {
                         if (n % 3 != 2)
                         {
                             const auto f  = n % 3 == 0 ? per1d_sin(0.02) : almostper1d(0.025, 1.41);
                             auto       q  = detail::random_quadratic< 1 >(rng);
                             const double F = upscale_flux(f, q, cfg);
                             q.c0 += u(rng);
                             q.grad[0] += u(rng);
                             worst = std::max(worst, std::abs(upscale_flux(f, q, cfg) - F) / std::max(std::abs(F), 1e-300));
                         }
                         else
                         {
                             const auto f  = aniso2d(0.05, 0.5, 1.41);
                             auto       q  = detail::random_quadratic< 2 >(rng);
                             const auto c2 = make_upscale_config(3, 5, 0.1, 0.1, {10, 0.9});
                             const double F = upscale_flux(f, q, c2);
                             q.c0 += u(rng);
                             q.grad[0] += u(rng);
                             q.grad[1] += u(rng);
                             worst = std::max(worst, std::abs(upscale_flux(f, q, c2) - F) / std::max(std::abs(F), 1e-300));
                         }
                     }
                     return Result{6, "", worst <= 1e-10, "max relative change " + sci(worst) + " over 12 cases"};
                 }});

    c.push_back({7, "micro interior independence, doubling ell changes F by <= 1e-10 relative, 10 configurations", [](const Options&) {
                     std::mt19937_64                          rng(11);
                     std::uniform_real_distribution< double > e1(0.01, 0.03), e2(0.04, 0.06);
                     double                                   worst = 0.0;
                     for (int n = 0; n < 10; ++n)
                     {
                         auto check = [&](const auto& field, auto q, double ppe) {
                             const auto cfg  = make_upscale_config(3, 5, 0.1, 0.1, {ppe, 0.9});
                             const auto med  = Medium(field);
                             auto       spec = micro_spec_for(med, q, cfg);
                             const double F1 = upscale_flux(solve_micro(spec), q.center, cfg);
                             spec.ell *= 2.0;
                             const double F2 = upscale_flux(solve_micro(spec), q.center, cfg);
                             worst = std::max(worst, std::abs(F2 - F1) / std::max(std::abs(F1), 1e-300));
                         };
                         switch (n % 5)
                         {
                         case 0: check(per1d_sin(e1(rng)), detail::random_quadratic< 1 >(rng), 20.0); break;
                         case 1: check(locper1d(e1(rng)), detail::random_quadratic< 1 >(rng), 20.0); break;
                         case 2: check(almostper1d(e1(rng)), detail::random_quadratic< 1 >(rng), 20.0); break;
                         case 3: check(iso2d(e2(rng)), detail::random_quadratic< 2 >(rng), 10.0); break;
                         default: check(aniso2d(e2(rng), 0.5), detail::random_quadratic< 2 >(rng), 10.0); break;
                         }
                     }
                     return Result{7, "", worst <= 1e-10, "max relative change " + sci(worst)};
                 }});

    c.push_back({8, "time symmetry of micro fields (bitwise)", [](const Options&) {
                     std::size_t checked = 0;
                     bool        ok      = true;
                     auto        check   = [&](const auto& f) {
                         const int N = f.steps;
                         const auto ns = f.solution.grid.space_size();
                         for (int it = 0; it <= 2 * N; ++it)
                             for (std::size_t k = 0; k < ns; ++k)
                             {
                                 ok = ok && f.solution.at(it, k) == f.solution.at(2 * N - it, k) && f.integrand.at(it, k) == f.integrand.at(2 * N - it, k);
                                 ++checked;
                             }
                     };
                     QuadraticPoly< 1 > q1;
                     q1.hess(0, 0) = 2.0;
                     check(solve_micro(make_micro_spec(Medium(per1d_sin(0.02)), q1, 0.2, 0.2)));
                     QuadraticPoly< 2 > q2;
                     q2.hess(0, 0) = 1.0;
                     q2.hess(0, 1) = q2.hess(1, 0) = 0.5;
                     q2.hess(1, 1) = -0.7;
                     check(solve_micro(make_micro_spec(Medium(aniso2d(0.05, 0.5)), q2, 0.2, 0.2, {10, 0.9})));
                     return Result{8, "", ok, std::to_string(checked) + " sample pairs compared"};
                 }});

    c.push_back({9, "invariant measure: closed form rho = a0/a with L2 slope in [1.7, 2.3], mean 1 to 1e-12, residual <= 1e-8 |A|", [](const Options&) {
                     bool        ok = true;
                     std::string m;
                     auto        study = [&](auto tag, const auto& a, const std::string& label) {
                         constexpr int D = decltype(tag)::value;
                         const double  a0 = harmonic_mean< D >(a).value;
                         std::vector< std::pair< double, double > > pts;
                         double worst_mean = 0.0, worst_res = 0.0, anorm = 0.0;
                         for (int N : {32, 64, 128, 256})
                         {
                             auto A  = [&](const Point< D >& y) { return Matrix< D >::identity(a(y)); };
                             auto mu = solve_invariant_measure< D >(A, N);
                             double mean = 0.0;
                             for (std::size_t k = 0; k < mu.rho.size(); ++k)
                             {
                                 mean += mu.rho[k];
                                 anorm = std::max(anorm, a(mu.node(k)));
                             }
                             worst_mean = std::max(worst_mean, std::abs(mean / static_cast< double >(mu.rho.size()) - 1.0));
                             worst_res  = std::max(worst_res, mu.residual / anorm);
                             pts.emplace_back(1.0 / N, detail::interpolant_l2_error< D >(mu, [&](const Point< D >& y) { return a0 / a(y); }));
                         }
                         const double slope = fit_loglog_slope(pts);
                         ok = ok && slope >= 1.7 && slope <= 2.3 && worst_mean <= 1e-12 && worst_res <= 1e-8;
                         m += (m.empty() ? "" : "; ") + label + ": slope " + fmt("%.3f", slope) + ", |mean-1| " + sci(worst_mean) + ", residual/|A| " + sci(worst_res);
                     };
                     study(std::integral_constant< int, 1 >{}, [](const Point< 1 >& y) { return 1.1 + std::sin(2.0 * pi * y[0]); }, "1D 1.1+sin");
                     const auto f2 = iso2d(1.0);
                     study(std::integral_constant< int, 2 >{}, [f2](const Point< 2 >& y) { return f2(y)(0, 0); }, "2D iso");
                     return Result{9, "", ok, m + " (L2(Y) error of the piecewise-linear reconstruction)"};
                 }});

    c.push_back({10, "macro scheme order 2.0 +- 0.3 with reference tensor flux (macro Dirichlet 1D, homogenized periodic 2D)", [](const Options&) {
                     // 1D Dirichlet: u = sin(pi x) cos t, a = 0.7.
                     const double a = 0.7, T = 0.7;
                     std::vector< std::pair< double, double > > p1, p2;
                     for (int N : {20, 40, 80, 160})
                     {
                         const MacroGrid< 1 > g{1.0, N, BoundaryCondition::dirichlet_zero};
                         const double        dt = fit_step(T, 0.5 * g.H());
                         auto f  = [a](double t, const Point< 1 >& x) { return std::sin(pi * x[0]) * std::cos(t) * (a * pi * pi - 1.0); };
                         auto tr = solve_macro(g, dt, T, [](const Point< 1 >& x) { return std::sin(pi * x[0]); }, {}, f, TensorFlux< 1 >(Matrix< 1 >::identity(a)));
                         auto ex = sample< 1 >(g, [T](const Point< 1 >& x) { return std::sin(pi * x[0]) * std::cos(T); });
                         p1.emplace_back(g.H(), l2_distance(g, tr.final().values, ex));
                     }
                     // 2D periodic, anisotropic A0: u = sin(2 pi x) sin(2 pi y) cos t.
                     Matrix< 2 > A;
                     A(0, 0) = 0.6;
                     A(1, 1) = 0.4;
                     A(0, 1) = A(1, 0) = 0.2;
                     for (int N : {16, 32, 64, 128})
                     {
                         const MacroGrid< 2 > g{1.0, N, BoundaryCondition::periodic};
                         const double        dt = fit_step(T, 0.5 * g.H());
                         const double        k2 = 4.0 * pi * pi;
                         auto u  = [](double t, const Point< 2 >& x) { return std::sin(2 * pi * x[0]) * std::sin(2 * pi * x[1]) * std::cos(t); };
                         auto f  = [=](double t, const Point< 2 >& x) {
                             const double uxy = k2 * std::cos(2 * pi * x[0]) * std::cos(2 * pi * x[1]) * std::cos(t);
                             return -u(t, x) + k2 * (A(0, 0) + A(1, 1)) * u(t, x) - 2.0 * A(0, 1) * uxy;
                         };
                         auto tr = solve_homogenized< 2 >({A, TensorProvenance::literature_value}, g, dt, T, [&](const Point< 2 >& x) { return u(0.0, x); }, {}, f);
                         auto ex = sample< 2 >(g, [&](const Point< 2 >& x) { return u(T, x); });
                         p2.emplace_back(g.H(), l2_distance(g, tr.final().values, ex));
                     }
                     const double s1 = fit_loglog_slope(p1), s2 = fit_loglog_slope(p2);
                     return Result{10, "", std::abs(s1 - 2.0) <= 0.3 && std::abs(s2 - 2.0) <= 0.3, "macro 1D slope " + fmt("%.3f", s1) + "; homogenized 2D slope " + fmt("%.3f", s2)};
                 }});

    c.push_back({11, "1D EFA vs homogenized, almost-periodic medium: slope in [q+1.3, q+2.8] for at least one (p,q), < 15 min", [](const Options& o) {
                     const auto t0 = std::chrono::steady_clock::now();
                     const auto r  = detail::run_config(configs::solution_almost_periodic, o);
                     const double dt = std::chrono::duration< double >(std::chrono::steady_clock::now() - t0).count();
                     bool any = false;
                     for (const auto& s : r.slopes)
                         any = any || (s.checked && s.pass);
                     return Result{11, "", any && dt < 900.0, detail::slopes_text(r)};
                 }});

    c.push_back({12, "EFA vs local average of DNS: 1D eps=0.01 <= 5%, 2D eps=0.05 <= 10%", [](const Options& o) {
                     std::string m;
                     bool        ok  = true;
                     auto        one = [&](const std::string& text, const char* label) {
                         const auto r = detail::run_config(text, o);
                         ok           = ok && r.dns_pass;
                         m += (m.empty() ? "" : "; ") + std::string(label) + " " + fmt("%.2f%%", 100.0 * r.dns_distance.value_or(NAN));
                     };
                     one(configs::dns_locally_periodic, "1D locally periodic");
                     one(configs::dns_almost_periodic, "1D almost periodic");
                     one(configs::dns_2d("dns_2d_c0", "0"), "2D c=0");
                     one(configs::dns_2d("dns_2d_c05", "0.5"), "2D c=1/2");
                     return Result{12, "", ok, m};
                 }});

    c.push_back({13, "averaging lemma: slopes in [q+1.5, q+2.8] for q=1,3,5, < 10 s", [](const Options&) {
                     const auto  t0  = std::chrono::steady_clock::now();
                     const double eta = 0.1;
                     bool         ok  = true;
                     std::string  m;
                     for (const int q : {1, 3, 5})
                     {
                         const auto k = build_kernel(q + 1, q);
                         std::vector< std::pair< double, double > > pts;
                         for (int i = 0; i < 40; ++i)
                         {
                             const double eps = eta * 0.02 * std::pow(10.0, i / 39.0);
                             const double h   = eps / 64.0;
                             const auto   n   = static_cast< std::size_t >(std::ceil(2.0 * eta / h)) + 1;
                             std::vector< double > s(n), co(n);
                             const double          c = 0.0;
                             for (std::size_t j = 0; j < n; ++j)
                             {
                                 const double x = c - eta + static_cast< double >(j) * h;
                                 s[j]           = std::sin(2.0 * pi * x / eps);
                                 co[j]          = std::cos(2.0 * pi * x / eps);
                             }
                             const double as = weighted_average(k, eta, UniformSamples{c - eta, h, s}, c);
                             const double ac = weighted_average(k, eta, UniformSamples{c - eta, h, co}, c);
                             pts.emplace_back(eps, std::hypot(as, ac));
                         }
                         const double slope = fit_loglog_slope(pts);
                         ok = ok && slope >= q + 1.5 && slope <= q + 2.8;
                         m += (m.empty() ? "" : "; ") + std::string("q=") + std::to_string(q) + ": " + fmt("%.3f", slope);
                     }
                     const double dt = std::chrono::duration< double >(std::chrono::steady_clock::now() - t0).count();
                     return Result{13, "", ok && dt < 10.0, m};
                 }});

    c.push_back({14, "determinism: repeated runs give byte-identical CSVs", [](const Options& o) {
                     namespace fs = std::filesystem;
                     const fs::path base = o.out.empty() ? fs::temp_directory_path() / "efa_determinism" : o.out / "determinism";
                     fs::remove_all(base);
                     for (const char* run : {"run1", "run2"})
                     {
                         Options oo  = o;
                         oo.out      = base / run;
                         oo.workers  = std::string(run) == "run1" ? 1 : std::max(2, o.workers);
                         std::vector< ErrorReport > reps{detail::run_config(configs::determinism_sweep, oo), detail::run_config(configs::determinism_solution, oo)};
                         write_summary(oo.out / "summary.csv", reps);
                     }
                     std::string why;
                     const bool  ok = detail::same_files(base / "run1", base / "run2", why);
                     if (o.out.empty())
                         fs::remove_all(base);
                     return Result{14, "", ok, why + " (1 vs " + std::to_string(std::max(2, o.workers)) + " workers)"};
                 }});
    return c;
}

/// Runs the selected criteria, reporting each result as soon as it is known.
inline std::vector< Result > run(const Options& opt, const std::function< void(const Result&) >& report = {})
{
    std::vector< Result > out;
    for (const auto& c : criteria())
    {
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), c.id) == opt.only.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Result     r;
        try
        {
            r = c.run(opt);
        }
        catch (const std::exception& e)
        {
            r = Result{c.id, "", false, std::string("error: ") + e.what()};
        }
        r.id      = c.id;
        r.title   = c.title;
        r.seconds = std::chrono::duration< double >(std::chrono::steady_clock::now() - t0).count();
        if (report)
            report(r);
        out.push_back(r);
    }
    if (!opt.out.empty())
    {
        CsvWriter w(opt.out / "acceptance.csv", {"criterion", "pass", "measured"});
        for (const auto& r : out)
        {
            std::string m = r.measured;
            std::replace(m.begin(), m.end(), ',', ' ');
            w.row({std::to_string(r.id), r.pass ? "1" : "0", "\"" + m + "\""});
        }
    }
    return out;
}

inline std::string format_line(const Result& r)
{
    char head[32];
    std::snprintf(head, sizeof head, "[%s] C%02d ", r.pass ? "PASS" : "FAIL", r.id);
    return head + r.title + " | " + r.measured + " | " + fmt("%.1f s", r.seconds);
}
} // namespace efa::acceptance

#endif // EFA_ACCEPTANCE_HPP
