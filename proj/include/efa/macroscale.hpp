#ifndef EFA_MACROSCALE_HPP
#define EFA_MACROSCALE_HPP

#include "efa/error.hpp"
#include "efa/grid.hpp"
#include "efa/micro.hpp"
#include "efa/upscale.hpp"
#include "efa/work_queue.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

namespace efa
{
template < int D >
using SpaceFunction = std::function< double(const Point< D >&) >;

template < int D >
using Forcing = std::function< double(double, const Point< D >&) >;

/// Flux from one constant tensor: F = A⁰ : hess.
template < int D >
class TensorFlux
{
public:
    explicit TensorFlux(const Matrix< D >& a0) : a0_(a0) { require(is_symmetric(a0), "TensorFlux: tensor must be symmetric"); }

    double operator()(const QuadraticPoly< D >& uhat, std::size_t) const { return reference_flux(a0_, uhat); }
    double speed_bound() const { return gershgorin_bound(a0_); }
    bool   node_parallel() const { return false; }

private:
    Matrix< D > a0_;
};

/// Flux from a per-node tensor: F_I = A_I : hess. Used both for cached effective tensors and,
/// with A_I = A^ε(x_I), for direct simulation.
template < int D >
class NodalTensorFlux
{
public:
    explicit NodalTensorFlux(std::vector< Matrix< D > > tensors) : tensors_(std::move(tensors))
    {
        for (const auto& a : tensors_)
            bound_ = std::max(bound_, gershgorin_bound(a));
    }

    double operator()(const QuadraticPoly< D >& uhat, std::size_t node) const { return contract(tensors_[node], uhat.hess); }
    double speed_bound() const { return bound_; }
    bool   node_parallel() const { return false; }

    const std::vector< Matrix< D > >& tensors() const { return tensors_; }

private:
    std::vector< Matrix< D > > tensors_;
    double                     bound_ = 0.0;
};

/// One micro solve per node and step (the literal upscaling algorithm).
template < int D >
class UpscaledFlux
{
public:
    UpscaledFlux(std::shared_ptr< const Medium< D > > medium, UpscaleConfig cfg)
        : medium_(std::move(medium)), cfg_(std::move(cfg))
    {
        require(medium_ != nullptr, "UpscaledFlux: medium required");
        validate(cfg_, medium_->field);
    }

    double operator()(const QuadraticPoly< D >& uhat, std::size_t) const { return upscale_flux(*medium_, uhat, cfg_); }
    double speed_bound() const { return medium_->field.upper_bound(); }
    bool   node_parallel() const { return true; }

private:
    std::shared_ptr< const Medium< D > > medium_;
    UpscaleConfig                        cfg_;
};

template < typename P, int D >
concept FluxProvider = requires(const P& p, const QuadraticPoly< D >& q, std::size_t k) {
    { p(q, k) } -> std::convertible_to< double >;
    { p.speed_bound() } -> std::convertible_to< double >;
    { p.node_parallel() } -> std::convertible_to< bool >;
};

/// Cache key of a macro node: nodes one coefficient period apart see the same medium, so on
/// axes where the period is a whole number of macro cells the node index is reduced modulo it.
template < int D >
std::size_t medium_key(const MacroGrid< D >& grid, const CoefficientField< D >& field, std::size_t k)
{
    auto idx = grid.multi_index(k);
    if (const auto& period = field.cell_period())
        for (int a = 0; a < D; ++a)
        {
            const double m  = (*period)[a] * field.epsilon() / grid.H();
            const double mr = std::round(m);
            if (mr >= 1.0 && std::abs(m - mr) <= 1e-9 * m)
                idx[a] %= static_cast< int >(mr);
        }
    return grid.flat(idx);
}

/// Probes the effective tensor at every non-boundary node of `grid`, filling `cache` keyed by
/// medium_key. Boundary nodes of Dirichlet grids get the zero tensor (never used).
template < int D >
NodalTensorFlux< D > make_cached_efa_flux(const MacroGrid< D >& grid, const Medium< D >& medium, const UpscaleConfig& cfg, EffectiveTensorCache< D >& cache, int workers = 1)
{
    validate(cfg, medium.field);
    std::vector< std::size_t > keys(grid.size());
    std::vector< std::size_t > first;  // representative node per distinct key, in node order
    {
        std::map< std::size_t, std::size_t > seen;
        for (std::size_t k = 0; k < grid.size(); ++k)
        {
            keys[k] = medium_key(grid, medium.field, k);
            if (!grid.on_boundary(k) && seen.emplace(keys[k], k).second)
                first.push_back(k);
        }
    }
    parallel_for(first.size(), workers, [&](std::size_t i) {
        const auto k = first[i];
        cache.get_or_compute(keys[k], [&] { return effective_tensor_probe(medium, cfg, grid.coord(k)); });
    });
    std::vector< Matrix< D > > tensors(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (!grid.on_boundary(k))
            tensors[k] = *cache.find(keys[k]);
    return NodalTensorFlux< D >(std::move(tensors));
}

template < int D >
struct MacroState
{
    MacroGrid< D >        grid;
    double                dt = 0.0;
    std::vector< double > U_curr;
    std::vector< double > U_prev;
    long                  n = 0;

    double t() const { return static_cast< double >(n) * dt; }
};

struct MacroOptions
{
    LiftMethod lift    = LiftMethod::centered;
    int        lift_m  = 2;
    int        workers = 1;
    /// Called with (n, Uⁿ) for every time level produced, including n = 0 and n = 1.
    std::function< void(long, const std::vector< double >&) > observer;
};

/// Largest stable step for the leap-frog scheme with centered differences:
/// Δt ≤ H / √(d·G), G the Gershgorin bound of the flux tensor.
template < int D >
double max_stable_dt(const MacroGrid< D >& grid, double speed_bound)
{
    require(speed_bound > 0.0, "max_stable_dt: speed bound must be positive");
    return grid.H() / std::sqrt(D * speed_bound);
}

/// CFL check with a 10% margin on the speed bound.
template < int D >
void check_cfl(const MacroGrid< D >& grid, double dt, double speed_bound)
{
    if (!(dt > 0.0))
        throw ConfigError("macro time step must be positive");
    const double limit = max_stable_dt(grid, 1.1 * speed_bound);
    if (dt > limit)
        throw ConfigError("macro CFL violated: dt=" + std::to_string(dt) + " > " + std::to_string(limit));
}

namespace detail
{
template < int D, typename Provider >
std::vector< double > evaluate_fluxes(const MacroGrid< D >& grid, const std::vector< double >& u, const Provider& provider, const MacroOptions& opt)
{
    std::vector< double > F(grid.size(), 0.0);
    auto one = [&](std::size_t k) {
        if (!grid.on_boundary(k))
            F[k] = provider(lift_quadratic(grid, u, k, opt.lift, opt.lift_m), k);
    };
    parallel_for(grid.size(), provider.node_parallel() ? opt.workers : 1, one);
    return F;
}

template < int D >
void check_finite(const std::vector< double >& u, long step)
{
    for (const double v : u)
        if (!std::isfinite(v))
            throw InstabilityError("macro solution became non-finite at step " + std::to_string(step));
}
} // namespace detail

/// U⁰ = g, U¹ = g + Δt h + (Δt²/2)(F⁰ + f(0)).
template < int D, typename Provider >
    requires FluxProvider< Provider, D >
MacroState< D > init_macro(const MacroGrid< D >& grid, double dt, const std::type_identity_t< SpaceFunction< D > >& g, const std::type_identity_t< SpaceFunction< D > >& h, const std::type_identity_t< Forcing< D > >& f, const Provider& provider, const MacroOptions& opt = {})
{
    check_cfl(grid, dt, provider.speed_bound());
    MacroState< D > s;
    s.grid   = grid;
    s.dt     = dt;
    s.U_prev = sample< D >(grid, g);
    s.U_curr = s.U_prev;
    const auto F0 = detail::evaluate_fluxes(grid, s.U_prev, provider, opt);
    for (std::size_t k = 0; k < s.U_curr.size(); ++k)
    {
        if (grid.on_boundary(k))
            continue;
        const auto   x  = grid.coord(k);
        const double hk = h ? h(x) : 0.0;
        const double fk = f ? f(0.0, x) : 0.0;
        s.U_curr[k] += dt * hk + 0.5 * dt * dt * (F0[k] + fk);
    }
    s.n = 1;
    detail::check_finite< D >(s.U_curr, s.n);
    if (opt.observer)
    {
        opt.observer(0, s.U_prev);
        opt.observer(1, s.U_curr);
    }
    return s;
}

/// U^{n+1} = 2Uⁿ − U^{n−1} + Δt²(Fⁿ + fⁿ); Dirichlet boundary values stay zero.
template < int D, typename Provider >
    requires FluxProvider< Provider, D >
void macro_step(MacroState< D >& s, const Provider& provider, const std::type_identity_t< Forcing< D > >& f, const MacroOptions& opt = {})
{
    const auto   F   = detail::evaluate_fluxes(s.grid, s.U_curr, provider, opt);
    const double t   = s.t();
    const double dt2 = s.dt * s.dt;
    for (std::size_t k = 0; k < s.U_curr.size(); ++k)
    {
        if (s.grid.on_boundary(k))
        {
            s.U_prev[k] = 0.0;
            continue;
        }
        const double fk = f ? f(t, s.grid.coord(k)) : 0.0;
        s.U_prev[k]     = 2.0 * s.U_curr[k] - s.U_prev[k] + dt2 * (F[k] + fk);
    }
    std::swap(s.U_curr, s.U_prev);
    ++s.n;
    detail::check_finite< D >(s.U_curr, s.n);
    if (opt.observer)
        opt.observer(s.n, s.U_curr);
}

struct Snapshot
{
    double                t = 0.0;
    std::vector< double > values;
};

template < int D >
struct Trajectory
{
    MacroGrid< D >          grid;
    std::vector< Snapshot > snapshots;

    const Snapshot& final() const
    {
        require(!snapshots.empty(), "empty trajectory");
        return snapshots.back();
    }
};

/// Number of steps of size dt reaching T; T must be a whole multiple of dt up to roundoff.
inline long steps_to(double T, double dt)
{
    require(T >= 0.0 && dt > 0.0, "steps_to: need T >= 0 and dt > 0");
    const double r = T / dt;
    const long   n = std::lround(r);
    if (std::abs(r - static_cast< double >(n)) > 1e-8 * std::max(1.0, r))
        throw ConfigError("final time is not a multiple of the time step");
    return n;
}

/// Largest step ≤ cfl·limit that divides T exactly.
inline double fit_step(double T, double limit)
{
    require(T > 0.0 && limit > 0.0, "fit_step: need T > 0 and limit > 0");
    return T / std::ceil(T / limit);
}

/// Advances the state from its current time to T, recording snapshots at `times`
/// (each a multiple of dt in [t_now, T]) and always at the final time.
template < int D, typename Provider >
    requires FluxProvider< Provider, D >
Trajectory< D > run_macro(MacroState< D >& s, const Provider& provider, const std::type_identity_t< Forcing< D > >& f, double T, std::vector< double > times = {}, const MacroOptions& opt = {})
{
    const long nend = steps_to(T, s.dt);
    require(nend == 0 || nend >= s.n, "run_macro: final time lies before the current time");
    std::vector< long > marks;
    for (const double ts : times)
        marks.push_back(steps_to(ts, s.dt));
    Trajectory< D > traj{s.grid, {}};
    auto record = [&](long n, const std::vector< double >& v) {
        for (const long m : marks)
            if (m == n && (traj.snapshots.empty() || traj.snapshots.back().t != static_cast< double >(n) * s.dt))
                traj.snapshots.push_back({static_cast< double >(n) * s.dt, v});
    };
    if (nend == 0)
    {
        traj.snapshots.push_back({0.0, s.U_prev});
        return traj;
    }
    if (s.n == 1)
        record(0, s.U_prev);
    record(s.n, s.U_curr);
    while (s.n < nend)
    {
        macro_step(s, provider, f, opt);
        record(s.n, s.U_curr);
    }
    if (traj.snapshots.empty() || traj.snapshots.back().t != static_cast< double >(nend) * s.dt)
        traj.snapshots.push_back({static_cast< double >(nend) * s.dt, s.U_curr});
    return traj;
}

/// init_macro + run_macro.
template < int D, typename Provider >
    requires FluxProvider< Provider, D >
Trajectory< D > solve_macro(const MacroGrid< D >& grid, double dt, double T, const std::type_identity_t< SpaceFunction< D > >& g, const std::type_identity_t< SpaceFunction< D > >& h, const std::type_identity_t< Forcing< D > >& f, const Provider& provider, std::vector< double > times = {}, const MacroOptions& opt = {})
{
    if (T == 0.0)
    {
        check_cfl(grid, dt, provider.speed_bound());
        auto u0 = sample< D >(grid, g);
        if (opt.observer)
            opt.observer(0, u0);
        return Trajectory< D >{grid, {{0.0, std::move(u0)}}};
    }
    auto s = init_macro(grid, dt, g, h, f, provider, opt);
    return run_macro(s, provider, f, T, std::move(times), opt);
}
} // namespace efa

#endif // EFA_MACROSCALE_HPP
