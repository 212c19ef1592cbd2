#ifndef EFA_MICRO_HPP
#define EFA_MICRO_HPP

#include "efa/averaging.hpp"
#include "efa/coefficient.hpp"
#include "efa/error.hpp"
#include "efa/quadratic.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace efa
{
/// Precomputed bounds of a medium needed to size and step micro problems.
template < int D >
struct Medium
{
    CoefficientField< D > field;
    double                a_sup;      ///< |A|_∞ (sampled, inflated)
    double                gershgorin; ///< max(sampled Gershgorin row sum, c₂), for the CFL rule

    explicit Medium(CoefficientField< D > f)
        : field{std::move(f)},
          a_sup{sup_norm(field)},
          gershgorin{std::max(sampled_gershgorin(field), field.upper_bound())}
    {}
};

/// Micro grid resolution policy.
struct MicroDiscretization
{
    double points_per_epsilon = 20.0; ///< dx = ε / points_per_epsilon
    double cfl                = 0.9;  ///< dt = cfl · dx / √(D·G)
};

/// ℓ = η/2 + (τ/2)√|A|_∞, rounded up to a whole number of cells of size dx.
inline double size_micro_box(double eta, double tau, double a_sup, double dx)
{
    require(eta > 0.0 && tau >= 0.0, "size_micro_box: eta must be positive and tau non-negative");
    require(dx > 0.0 && a_sup >= 0.0, "size_micro_box: invalid dx or |A|_inf");
    const double ell = 0.5 * eta + 0.5 * tau * std::sqrt(a_sup);
    return std::ceil(ell / dx - 1e-9) * dx;
}

template < int D >
struct MicroProblemSpec
{
    Medium< D >        medium;
    QuadraticPoly< D > uhat;
    double             eta;
    double             tau;
    double             ell;
    double             dx;
    double             dt;

    /// Number of time levels after t = 0; t_N = τ/2 exactly.
    int steps() const { return static_cast< int >(std::lround(0.5 * tau / dt)); }
    /// Window half-width in cells; nodes |k| ≤ W cover ω_η = x_c + [−η/2, η/2]^D.
    int window_cells() const { return static_cast< int >(std::ceil(0.5 * eta / dx - 1e-9)); }
    /// Box half-width in cells. Besides ℓ, the explicit stencil's domain of dependence (one cell per
    /// step) must keep the periodic seam away from the window.
    int box_cells() const
    {
        const int from_ell = static_cast< int >(std::ceil(ell / dx - 1e-9));
        return std::max(from_ell, window_cells() + steps() + 2);
    }
};

/// Builds the micro problem with dx = ε/ppe, the largest stable dt dividing τ/2, and ℓ from size_micro_box.
template < int D >
MicroProblemSpec< D > make_micro_spec(const Medium< D >& medium, const QuadraticPoly< D >& uhat, double eta, double tau, const MicroDiscretization& disc = {})
{
    require(eta > 0.0 && tau > 0.0, "micro problem: eta and tau must be positive");
    require(disc.points_per_epsilon >= 10.0, "micro problem: need at least 10 points per epsilon");
    require(disc.cfl > 0.0 && disc.cfl < 1.0, "micro problem: cfl fraction must lie in (0,1)");
    const double dx     = medium.field.epsilon() / disc.points_per_epsilon;
    const double dt_max = disc.cfl * dx / std::sqrt(D * medium.gershgorin);
    const int    n      = static_cast< int >(std::ceil(0.5 * tau / dt_max - 1e-12));
    const double dt     = 0.5 * tau / n;
    return MicroProblemSpec< D >{medium, uhat, eta, tau, size_micro_box(eta, tau, medium.a_sup, dx), dx, dt};
}

template < int D >
void validate(const MicroProblemSpec< D >& s)
{
    require(s.eta > 0.0 && s.tau > 0.0 && s.dx > 0.0 && s.dt > 0.0, "micro problem: non-positive parameter");
    require(s.ell >= 0.5 * s.eta + 0.5 * s.tau * std::sqrt(s.medium.a_sup) - 1e-12,
            "micro problem: box too small for finite speed of propagation");
    require(s.dx <= s.medium.field.epsilon() / 10.0 * (1.0 + 1e-12), "micro problem: dx must resolve epsilon (dx <= eps/10)");
    require(std::abs(s.steps() * s.dt - 0.5 * s.tau) <= 1e-9 * s.tau, "micro problem: dt must divide tau/2");
    const double limit = s.dx / std::sqrt(D * s.medium.gershgorin);
    if (s.dt > limit * (1.0 + 1e-12))
        throw ConfigError("micro problem violates CFL: dt=" + std::to_string(s.dt) + " > " + std::to_string(limit));
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < i; ++j)
            require(s.uhat.hess(i, j) == s.uhat.hess(j, i), "micro problem: hessian must be symmetric");
}

/// Space-time samples of the micro solution and of the flux integrand Σ A_ij ∂_ij u on
/// [−τ/2, τ/2] × ω_η. Negative times are mirror copies of positive ones.
template < int D >
struct MicroField
{
    SpaceTimeSamples< D > solution;
    SpaceTimeSamples< D > integrand;
    int                   steps = 0; ///< N; time index it ↔ t = (it − N)·dt
};

namespace detail
{
/// Periodic box grid with 2M nodes per axis, node k ↔ x_c + (k − M)·dx.
template < int D >
struct MicroBox
{
    int                   m;     // half-width in cells
    int                   n;     // nodes per axis = 2m
    std::vector< double > a00, a11, a01, src;
    bool                  has_cross = false;

    std::size_t size() const { return D == 1 ? n : static_cast< std::size_t >(n) * n; }
};

template < int D >
MicroBox< D > setup_box(const MicroProblemSpec< D >& s)
{
    MicroBox< D > b;
    b.m = s.box_cells();
    b.n = 2 * b.m;
    b.a00.resize(b.size());
    b.src.resize(b.size());
    if constexpr (D == 2)
    {
        b.a11.resize(b.size());
        b.a01.resize(b.size());
    }
    const auto& c = s.uhat.center;
    for (std::size_t k = 0; k < b.size(); ++k)
    {
        Point< D > x;
        if constexpr (D == 1)
            x = {c[0] + (static_cast< int >(k) - b.m) * s.dx};
        else
            x = {c[0] + (static_cast< int >(k / b.n) - b.m) * s.dx, c[1] + (static_cast< int >(k % b.n) - b.m) * s.dx};
        const auto a = s.medium.field(x);
        b.a00[k]     = a(0, 0);
        if constexpr (D == 2)
        {
            b.a11[k] = a(1, 1);
            b.a01[k] = a(0, 1);
            if (a(0, 1) != 0.0)
                b.has_cross = true;
        }
        b.src[k] = contract(a, s.uhat.hess);
    }
    return b;
}

/// r = A:∇²_h w + src, centered differences with periodic wrap.
template < int D >
void apply_operator(const MicroBox< D >& b, const std::vector< double >& w, std::vector< double >& r, double dx)
{
    const double inv = 1.0 / (dx * dx);
    const int    n   = b.n;
    if constexpr (D == 1)
    {
        for (int i = 0; i < n; ++i)
        {
            const int ip = i + 1 == n ? 0 : i + 1;
            const int im = i == 0 ? n - 1 : i - 1;
            r[i]         = b.a00[i] * (w[ip] - 2.0 * w[i] + w[im]) * inv + b.src[i];
        }
    }
    else
    {
        const double qinv = 0.25 * inv;
        for (int i = 0; i < n; ++i)
        {
            const int     ip  = i + 1 == n ? 0 : i + 1;
            const int     im  = i == 0 ? n - 1 : i - 1;
            const double* row = &w[static_cast< std::size_t >(i) * n];
            const double* up  = &w[static_cast< std::size_t >(ip) * n];
            const double* dn  = &w[static_cast< std::size_t >(im) * n];
            for (int j = 0; j < n; ++j)
            {
                const int         jp  = j + 1 == n ? 0 : j + 1;
                const int         jm  = j == 0 ? n - 1 : j - 1;
                const std::size_t k   = static_cast< std::size_t >(i) * n + j;
                const double      d00 = (up[j] - 2.0 * row[j] + dn[j]) * inv;
                const double      d11 = (row[jp] - 2.0 * row[j] + row[jm]) * inv;
                double            v   = b.a00[k] * d00 + b.a11[k] * d11 + b.src[k];
                if (b.has_cross)
                    v += 2.0 * b.a01[k] * (up[jp] - up[jm] - dn[jp] + dn[jm]) * qinv;
                r[k] = v;
            }
        }
    }
}

template < int D >
void extract_window(const MicroBox< D >& b, int wcells, const std::vector< double >& f, std::vector< double >& out)
{
    const int lo = b.m - wcells;
    const int nw = 2 * wcells + 1;
    if constexpr (D == 1)
    {
        out.assign(f.begin() + lo, f.begin() + lo + nw);
    }
    else
    {
        out.resize(static_cast< std::size_t >(nw) * nw);
        for (int i = 0; i < nw; ++i)
            for (int j = 0; j < nw; ++j)
                out[static_cast< std::size_t >(i) * nw + j] = f[static_cast< std::size_t >(lo + i) * b.n + lo + j];
    }
}
} // namespace detail

/// Solves the micro problem in the deviation variable w = u − û with periodic boundary conditions:
///   w_tt = A:∇²w + A:∇²û, w(0) = 0, w_t(0) = 0, leap-frog with w¹ = (dt²/2)·A:∇²û.
/// For every level n = 0…N, `observer(n, window_integrand, window_w)` receives the flux integrand
/// A:∇²_h u = A:∇²_h w + A:hess and w restricted to the window nodes (row-major, (2W+1)^D).
template < int D, typename Observer >
void run_micro(const MicroProblemSpec< D >& spec, Observer&& observer)
{
    validate(spec);
    const auto  box   = detail::setup_box(spec);
    const int   nstep = spec.steps();
    const int   wc    = spec.window_cells();
    const double dt2  = spec.dt * spec.dt;

    std::vector< double > w_prev(box.size(), 0.0), w(box.size()), w_next(box.size()), r(box.size());
    std::vector< double > win_r, win_w;

    // Level 0: w = 0, integrand = src.
    detail::extract_window(box, wc, box.src, win_r);
    detail::extract_window(box, wc, w_prev, win_w);
    observer(0, std::as_const(win_r), std::as_const(win_w));

    for (std::size_t k = 0; k < box.size(); ++k)
        w[k] = 0.5 * dt2 * box.src[k];

    for (int n = 1; n <= nstep; ++n)
    {
        detail::apply_operator(box, w, r, spec.dx);
        double check = 0.0;
        for (std::size_t k = 0; k < box.size(); ++k)
            check += r[k];
        if (!std::isfinite(check))
            throw InstabilityError("micro solve: non-finite values at step " + std::to_string(n));
        detail::extract_window(box, wc, r, win_r);
        detail::extract_window(box, wc, w, win_w);
        observer(n, std::as_const(win_r), std::as_const(win_w));
        if (n == nstep)
            break;
        for (std::size_t k = 0; k < box.size(); ++k)
            w_next[k] = 2.0 * w[k] - w_prev[k] + dt2 * r[k];
        std::swap(w_prev, w);
        std::swap(w, w_next);
    }
}

/// Full solve returning the mirrored space-time samples on the averaging window.
template < int D >
MicroField< D > solve_micro(const MicroProblemSpec< D >& spec)
{
    const int  nstep = spec.steps();
    const int  wc    = spec.window_cells();
    const auto nw    = static_cast< std::size_t >(2 * wc + 1);

    SpaceTimeGrid< D > g;
    g.t0 = -0.5 * spec.tau;
    g.dt = spec.dt;
    g.nt = static_cast< std::size_t >(2 * nstep + 1);
    g.h  = spec.dx;
    for (int i = 0; i < D; ++i)
    {
        g.x0[i] = spec.uhat.center[i] - wc * spec.dx;
        g.nx[i] = nw;
    }
    const std::size_t ns = g.space_size();

    MicroField< D > out;
    out.steps                = nstep;
    out.solution.grid        = g;
    out.integrand.grid       = g;
    out.solution.values.assign(g.size(), 0.0);
    out.integrand.values.assign(g.size(), 0.0);

    // û on the window, added to w to recover u.
    std::vector< double > uhat_w(ns);
    for (std::size_t k = 0; k < ns; ++k)
    {
        Point< D > x;
        if constexpr (D == 1)
            x = {g.x0[0] + static_cast< double >(k) * g.h};
        else
            x = {g.x0[0] + static_cast< double >(k / nw) * g.h, g.x0[1] + static_cast< double >(k % nw) * g.h};
        uhat_w[k] = spec.uhat(x);
    }

    run_micro(spec, [&](int n, const std::vector< double >& integrand, const std::vector< double >& w) {
        for (const int it : {nstep + n, nstep - n})
        {
            auto* u = &out.solution.values[static_cast< std::size_t >(it) * ns];
            auto* f = &out.integrand.values[static_cast< std::size_t >(it) * ns];
            for (std::size_t k = 0; k < ns; ++k)
            {
                u[k] = w[k] + uhat_w[k];
                f[k] = integrand[k];
            }
        }
    });
    return out;
}
} // namespace efa

#endif // EFA_MICRO_HPP
