#ifndef EFA_EXPERIMENTS_HPP
#define EFA_EXPERIMENTS_HPP

#include "efa/coefficient.hpp"
#include "efa/config.hpp"
#include "efa/csv.hpp"
#include "efa/error.hpp"
#include "efa/macroscale.hpp"
#include "efa/reference.hpp"
#include "efa/regression.hpp"
#include "efa/upscale.hpp"
#include "efa/work_queue.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace efa
{
enum class ExperimentKind
{
    upscaling,
    solution1d,
    solution2d
};

struct KernelPair
{
    int p = 5;
    int q = 3;
};

struct ExperimentConfig
{
    ExperimentKind            kind = ExperimentKind::upscaling;
    std::string               name = "experiment";
    int                       dim  = 1;

    std::string               coefficient = "per1d_sin";
    ParamMap                  params;
    std::vector< double >     epsilons;

    double                    eta = 0.1;
    double                    tau = 0.1;
    std::vector< KernelPair > kernels{{5, 3}};
    MicroDiscretization       disc{64, 0.9};
    ReusePolicy               reuse = ReusePolicy::effective_tensor_cache;
    WindowConvention          window = WindowConvention::kernel_support;
    LiftMethod                lift  = LiftMethod::centered;

    double                    L         = 1.0;
    int                       N         = 50;
    double                    dt        = 0.0;  ///< 0: derived from macro_cfl
    double                    macro_cfl = 0.5;
    double                    T         = 1.0;
    BoundaryCondition         bc        = BoundaryCondition::periodic;
    std::vector< double >     snapshots;

    std::string               initial  = "gaussian";
    double                    center   = 0.5;
    double                    sigma    = 0.08;
    double                    velocity = 0.0;

    std::optional< double >   a0_value;  ///< isotropic literature value; otherwise computed

    bool                      dns         = false;
    double                    dns_epsilon = 0.01;
    int                       dns_ppe     = 10;
    double                    dns_cfl     = 0.9;

    bool                      check_slopes = true;  ///< slopes must lie in [q+1.3, q+2.8]
    double                    slope_lo     = 1.3;
    double                    slope_hi     = 2.8;
    double                    dns_tolerance = 0.05;
};

inline ExperimentConfig parse_experiment(const Config& c)
{
    ExperimentConfig e;
    const auto       kind = c.require_string("experiment.kind");
    if (kind == "upscaling")
        e.kind = ExperimentKind::upscaling;
    else if (kind == "solution1d")
        e.kind = ExperimentKind::solution1d;
    else if (kind == "solution2d")
        e.kind = ExperimentKind::solution2d;
    else
        throw ConfigError("unknown experiment kind '" + kind + "'");
    e.name = c.get_string("experiment.name", kind);
    e.dim  = c.get_int("experiment.dim", e.kind == ExperimentKind::solution2d ? 2 : 1);
    if (e.dim != 1 && e.dim != 2)
        throw ConfigError("experiment.dim must be 1 or 2");
    if ((e.kind == ExperimentKind::solution1d && e.dim != 1) || (e.kind == ExperimentKind::solution2d && e.dim != 2))
        throw ConfigError("experiment.dim does not match the experiment kind");

    e.coefficient = c.require_string("coefficient.name");
    for (const auto& [k, v] : c.section("coefficient"))
        if (k != "name")
            e.params[k] = Config::parse_number(v, "coefficient." + k);
    e.epsilons = c.get_doubles("sweep.epsilons");
    if (e.epsilons.empty())
        throw ConfigError("sweep.epsilons must list at least one value");

    e.eta = c.get_double("upscale.eta", e.eta);
    e.tau = c.get_double("upscale.tau", e.eta);
    if (c.has("upscale.kernels"))
    {
        e.kernels.clear();
        for (const auto& item : c.get_strings("upscale.kernels"))
        {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError("upscale.kernels entries must look like p:q");
            const double p = Config::parse_number(item.substr(0, colon), "upscale.kernels");
            const double q = Config::parse_number(item.substr(colon + 1), "upscale.kernels");
            if (p != std::floor(p) || q != std::floor(q) || p < 1 || q < 0)
                throw ConfigError("upscale.kernels: need integers p >= 1, q >= 0");
            e.kernels.push_back({static_cast< int >(p), static_cast< int >(q)});
        }
    }
    e.disc.points_per_epsilon = c.get_int("upscale.points_per_epsilon", e.disc.points_per_epsilon);
    e.disc.cfl                = c.get_double("upscale.cfl", e.disc.cfl);
    const auto reuse          = c.get_string("upscale.reuse", "cache");
    if (reuse == "cache")
        e.reuse = ReusePolicy::effective_tensor_cache;
    else if (reuse == "per_call")
        e.reuse = ReusePolicy::per_call;
    else
        throw ConfigError("upscale.reuse must be 'cache' or 'per_call'");
    const auto window = c.get_string("upscale.window", "kernel_support");
    if (window == "kernel_support")
        e.window = WindowConvention::kernel_support;
    else if (window == "half_window")
        e.window = WindowConvention::half_window;
    else
        throw ConfigError("upscale.window must be 'kernel_support' or 'half_window'");
    const auto lift = c.get_string("macro.lift", "centered");
    if (lift == "centered")
        e.lift = LiftMethod::centered;
    else if (lift == "least_squares")
        e.lift = LiftMethod::least_squares;
    else
        throw ConfigError("macro.lift must be 'centered' or 'least_squares'");

    e.L         = c.get_double("macro.L", e.L);
    e.N         = c.get_int("macro.N", e.N);
    e.dt        = c.get_double("macro.dt", e.dt);
    e.macro_cfl = c.get_double("macro.cfl", e.macro_cfl);
    e.T         = c.get_double("macro.T", e.T);
    e.snapshots = c.get_doubles("macro.snapshots");
    const auto bc = c.get_string("macro.bc", "periodic");
    if (bc == "periodic")
        e.bc = BoundaryCondition::periodic;
    else if (bc == "dirichlet")
        e.bc = BoundaryCondition::dirichlet_zero;
    else
        throw ConfigError("macro.bc must be 'periodic' or 'dirichlet'");

    e.initial  = c.get_string("initial.g", e.dim == 2 ? "sin_cos" : "gaussian");
    e.center   = c.get_double("initial.center", e.L / 2);
    e.sigma    = c.get_double("initial.sigma", e.sigma);
    e.velocity = c.get_double("initial.velocity", e.velocity);

    if (c.has("reference.a0"))
        e.a0_value = c.require_double("reference.a0");

    e.dns           = c.get_bool("dns.enabled", e.dns);
    e.dns_epsilon   = c.get_double("dns.epsilon", e.dns_epsilon);
    e.dns_ppe       = c.get_int("dns.points_per_epsilon", e.dns_ppe);
    e.dns_cfl       = c.get_double("dns.cfl", e.dns_cfl);
    e.dns_tolerance = c.get_double("dns.tolerance", e.dns_tolerance);

    e.check_slopes = c.get_bool("check.slopes", e.check_slopes);
    e.slope_lo     = c.get_double("check.slope_lo", e.slope_lo);
    e.slope_hi     = c.get_double("check.slope_hi", e.slope_hi);
    c.reject_unused();

    if (!(e.eta > 0.0) || !(e.tau > 0.0))
        throw ConfigError("eta and tau must be positive");
    for (const double eps : e.epsilons)
        if (!(eps > 0.0) || eps > e.eta || eps > e.tau)
            throw ConfigError("every swept epsilon must satisfy 0 < epsilon <= min(eta, tau)");
    if (e.N < 4 || !(e.L > 0.0) || !(e.T >= 0.0))
        throw ConfigError("macro grid needs N >= 4, L > 0, T >= 0");
    if (e.dns_ppe < 10)
        throw ConfigError("dns.points_per_epsilon must be at least 10");
    return e;
}

inline ExperimentConfig load_experiment(const std::string& path) { return parse_experiment(Config::load(path)); }

struct ErrorRow
{
    int    p = 0, q = 0;
    double epsilon   = 0.0;
    double value     = 0.0;  ///< F (upscaling) or ‖U_EFA‖ (solution runs)
    double reference = 0.0;  ///< F̂ or ‖U_hom‖
    double error     = 0.0;  ///< |F − F̂| or discrete L² distance
};

struct SlopeRow
{
    std::string experiment;
    int         p = 0, q = 0;
    double      slope = 0.0;
    double      lower = 0.0, upper = 0.0;
    bool        checked = false;
    bool        pass    = true;
    std::string note;
};

struct ErrorReport
{
    std::string                experiment;
    std::string                norm;
    std::vector< ErrorRow >    rows;
    std::vector< SlopeRow >    slopes;
    std::optional< double >    dns_distance;  ///< relative L² distance EFA vs local average of DNS
    bool                       dns_pass = true;
    std::vector< std::string > files;

    bool pass() const
    {
        for (const auto& s : slopes)
            if (s.checked && !s.pass)
                return false;
        return dns_pass;
    }
};

struct RunOptions
{
    std::filesystem::path out;  ///< empty: write nothing
    int                   workers = 1;
};

namespace detail
{
template < int D >
CoefficientField< D > make_field(const ExperimentConfig& e, double eps)
{
    return builtin_coefficient< D >(e.coefficient, eps, e.params);
}

inline std::string tag(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string pair_tag(const KernelPair& k) { return "p" + std::to_string(k.p) + "q" + std::to_string(k.q); }

/// Slow-variable homogenized profile for the locally periodic builtin: the fast factor is
/// homogenized with the slow factor frozen.
inline std::optional< std::function< double(double) > > locally_periodic_profile(const ExperimentConfig& e)
{
    if (e.coefficient != "locper1d")
        return std::nullopt;
    const double fast = harmonic_mean< 1 >([](const Point< 1 >& y) { return 1.5 + std::sin(2.0 * std::numbers::pi * y[0]); }).value;
    return [fast](double x) { return (1.5 + std::sin(2.0 * std::numbers::pi * x)) * fast; };
}

/// Homogenized tensor at x: literature value, slow profile, or harmonic mean of the cell.
template < int D >
std::function< Matrix< D >(const Point< D >&) > homogenized_tensor(const ExperimentConfig& e)
{
    if (e.a0_value)
    {
        const auto a = Matrix< D >::identity(*e.a0_value);
        return [a](const Point< D >&) { return a; };
    }
    if constexpr (D == 1)
        if (auto prof = locally_periodic_profile(e))
            return [prof](const Point< 1 >& x) { return Matrix< 1 >::identity((*prof)(x[0])); };
    const auto field = make_field< D >(e, 1.0);
    const auto scaled = homogenized_scaled_tensor(field);
    if (scaled)
    {
        const auto a = scaled->a0;
        return [a](const Point< D >&) { return a; };
    }
    if (field.cell_period())
    {
        auto cell = [field](const Point< D >& y) { return field(y); };
        auto rho  = solve_invariant_measure< D >(cell, 128, *field.cell_period());
        const auto a = homogenized_coefficient< D >(cell, rho).a0;
        return [a](const Point< D >&) { return a; };
    }
    throw ConfigError("no homogenized reference for coefficient '" + e.coefficient + "'; set reference.a0");
}

template < int D >
std::function< double(const Point< D >&) > initial_data(const ExperimentConfig& e)
{
    const double c = e.center, s = e.sigma, L = e.L;
    if (e.initial == "zero")
        return [](const Point< D >&) { return 0.0; };
    if (e.initial == "gaussian")
        return [c, s](const Point< D >& x) {
            double r2 = 0.0;
            for (const double xi : x)
                r2 += (xi - c) * (xi - c);
            return std::exp(-r2 / (2.0 * s * s));
        };
    if (e.initial == "sin_cos")
        return [L](const Point< D >& x) {
            double v = std::sin(2.0 * std::numbers::pi * x[0] / L);
            if constexpr (D == 2)
                v *= std::cos(2.0 * std::numbers::pi * x[1] / L);
            return v;
        };
    throw ConfigError("unknown initial.g '" + e.initial + "'");
}

template < int D >
MacroGrid< D > macro_grid(const ExperimentConfig& e)
{
    return MacroGrid< D >{e.L, e.N, e.bc};
}

inline void fit_slopes(ErrorReport& r, const ExperimentConfig& e)
{
    for (const auto& k : e.kernels)
    {
        std::vector< std::pair< double, double > > pts;
        for (const auto& row : r.rows)
            if (row.p == k.p && row.q == k.q)
                pts.emplace_back(row.epsilon, row.error);
        SlopeRow s{e.name, k.p, k.q, 0.0, k.q + e.slope_lo, k.q + e.slope_hi, false, true, ""};
        if (pts.size() < 3)
        {
            s.note = "fewer than 3 epsilons";
            r.slopes.push_back(s);
            continue;
        }
        try
        {
            s.slope   = fit_loglog_slope(pts);
            s.checked = e.check_slopes;
            s.pass    = !s.checked || (s.slope >= s.lower && s.slope <= s.upper);
        }
        catch (const RegressionError& err)
        {
            s.slope = std::nan("");
            s.note  = err.what();
        }
        r.slopes.push_back(s);
    }
}

template < int D >
std::function< double(const Point< D >&) > velocity(const ExperimentConfig& e)
{
    const double v = e.velocity;
    if (v == 0.0)
        return {};
    return [v](const Point< D >&) { return v; };
}

template < int D >
double macro_dt(const ExperimentConfig& e, const MacroGrid< D >& grid, double bound)
{
    if (e.T == 0.0)
        return e.dt > 0.0 ? e.dt : max_stable_dt(grid, 1.1 * bound);
    if (e.dt > 0.0)
        return e.dt;
    // Largest stable step dividing T and every snapshot time.
    const double limit = e.macro_cfl * max_stable_dt(grid, 1.1 * bound);
    const auto   n0    = static_cast< long >(std::ceil(e.T / limit));
    for (long n = n0; n < 64 * n0 + 64; ++n)
    {
        const double dt = e.T / static_cast< double >(n);
        bool         ok = true;
        for (const double ts : e.snapshots)
        {
            const double r = ts / dt;
            ok             = ok && std::abs(r - std::round(r)) <= 1e-8 * std::max(1.0, r);
        }
        if (ok)
            return dt;
    }
    throw ConfigError("no stable time step divides T and all macro.snapshots; set macro.dt");
}

inline void write_rows(const ErrorReport& r, const std::filesystem::path& path, const char* v, const char* ref)
{
    CsvWriter w(path, {"p", "q", "epsilon", v, ref, "error"});
    for (const auto& row : r.rows)
        w.row({std::to_string(row.p), std::to_string(row.q), format_number(row.epsilon), format_number(row.value), format_number(row.reference), format_number(row.error)});
}
} // namespace detail

/// |F − F̂| over the ε list for every kernel pair, with û = x₁² centred at the origin.
template < int D >
ErrorReport run_upscaling_sweep(const ExperimentConfig& e, const RunOptions& opt = {})
{
    ErrorReport r{e.name, "absolute", {}, {}, std::nullopt, true, {}};
    const auto  a0 = detail::homogenized_tensor< D >(e)(Point< D >{});
    QuadraticPoly< D > uhat;
    uhat.hess(0, 0)     = 2.0;
    const double Fhat   = reference_flux(a0, uhat);

    struct Job
    {
        KernelPair k;
        double     eps;
    };
    std::vector< Job > jobs;
    for (const auto& k : e.kernels)
        for (const double eps : e.epsilons)
            jobs.push_back({k, eps});
    const auto F = parallel_map(jobs.size(), opt.workers, [&](std::size_t i) {
        const auto& j = jobs[i];
        try
        {
            const auto cfg = make_upscale_config(j.k.p, j.k.q, e.eta, e.tau, e.disc, e.reuse, e.window);
            return upscale_flux(detail::make_field< D >(e, j.eps), uhat, cfg);
        }
        catch (const Error& err)
        {
            throw Error(std::string(err.what()) + " [p=" + std::to_string(j.k.p) + " q=" + std::to_string(j.k.q) + " epsilon=" + detail::tag(j.eps) + "]");
        }
    });
    for (std::size_t i = 0; i < jobs.size(); ++i)
        r.rows.push_back({jobs[i].k.p, jobs[i].k.q, jobs[i].eps, F[i], Fhat, std::abs(F[i] - Fhat)});
    detail::fit_slopes(r, e);
    if (!opt.out.empty())
    {
        const auto path = opt.out / (e.name + "_upscaling.csv");
        detail::write_rows(r, path, "F", "F_hat");
        r.files.push_back(path.string());
    }
    return r;
}

namespace detail
{
template < int D >
struct SolutionSetup
{
    MacroGrid< D >                              grid;
    std::function< double(const Point< D >&) > g, h;
    NodalTensorFlux< D >                        hom;
    double                                      dt;
};

template < int D >
SolutionSetup< D > solution_setup(const ExperimentConfig& e)
{
    const auto grid = macro_grid< D >(e);
    const auto a0   = homogenized_tensor< D >(e);
    std::vector< Matrix< D > > t(grid.size());
    for (std::size_t k = 0; k < t.size(); ++k)
        t[k] = a0(grid.coord(k));
    NodalTensorFlux< D > hom(std::move(t));
    double               bound = hom.speed_bound();
    for (const double eps : e.epsilons)
        bound = std::max(bound, make_field< D >(e, eps).upper_bound());
    const double dt = macro_dt(e, grid, bound);
    return {grid, initial_data< D >(e), velocity< D >(e), std::move(hom), dt};
}

template < int D >
Trajectory< D > run_efa(const ExperimentConfig& e, const SolutionSetup< D >& s, const KernelPair& k, double eps, std::vector< double > times, const MacroOptions& mo, int workers)
{
    const auto cfg    = make_upscale_config(k.p, k.q, e.eta, e.tau, e.disc, e.reuse, e.window);
    auto       medium = std::make_shared< const Medium< D > >(make_field< D >(e, eps));
    if (e.reuse == ReusePolicy::per_call)
    {
        auto o    = mo;
        o.workers = workers;
        return solve_macro(s.grid, s.dt, e.T, s.g, s.h, Forcing< D >{}, UpscaledFlux< D >(medium, cfg), std::move(times), o);
    }
    EffectiveTensorCache< D > cache;
    const auto                flux = make_cached_efa_flux(s.grid, *medium, cfg, cache, workers);
    return solve_macro(s.grid, s.dt, e.T, s.g, s.h, Forcing< D >{}, flux, std::move(times), mo);
}
} // namespace detail

/// EFA against the homogenized solve for every kernel pair and ε, plus an optional comparison with
/// the kernel-local average of a direct simulation at dns_epsilon.
template < int D >
ErrorReport run_solution_comparison(const ExperimentConfig& e, const RunOptions& opt = {})
{
    ErrorReport r{e.name, "discrete L2 (H^{d/2})", {}, {}, std::nullopt, true, {}};
    const auto  s = detail::solution_setup< D >(e);
    MacroOptions mo;
    mo.lift = e.lift;

    auto times = e.snapshots;
    times.push_back(e.T);
    const auto hom = solve_macro(s.grid, s.dt, e.T, s.g, s.h, Forcing< D >{}, s.hom, times, mo);
    const auto& uh = hom.final().values;
    const double nh = l2_norm(s.grid, uh);

    auto emit = [&](const std::string& stem, const Trajectory< D >& tr) {
        if (opt.out.empty())
            return;
        for (const auto& snap : tr.snapshots)
        {
            const auto path = opt.out / (stem + "_t" + detail::tag(snap.t) + ".csv");
            write_snapshot(path, tr.grid, snap.t, snap.values);
            r.files.push_back(path.string());
        }
    };
    emit(e.name + "_hom", hom);

    struct Job
    {
        KernelPair k;
        double     eps;
    };
    std::vector< Job > jobs;
    for (const auto& k : e.kernels)
        for (const double eps : e.epsilons)
            jobs.push_back({k, eps});
    const int  outer = jobs.size() > 1 ? opt.workers : 1;
    const int  inner = jobs.size() > 1 ? 1 : opt.workers;
    const auto traj  = parallel_map(jobs.size(), outer, [&](std::size_t i) {
        try
        {
            return detail::run_efa(e, s, jobs[i].k, jobs[i].eps, times, mo, inner);
        }
        catch (const Error& err)
        {
            throw Error(std::string(err.what()) + " [p=" + std::to_string(jobs[i].k.p) + " q=" + std::to_string(jobs[i].k.q) + " epsilon=" + detail::tag(jobs[i].eps) + "]");
        }
    });
    for (std::size_t i = 0; i < jobs.size(); ++i)
    {
        const auto& u = traj[i].final().values;
        r.rows.push_back({jobs[i].k.p, jobs[i].k.q, jobs[i].eps, l2_norm(s.grid, u), nh, l2_distance(s.grid, u, uh)});
        emit(e.name + "_efa_" + detail::pair_tag(jobs[i].k) + "_eps" + detail::tag(jobs[i].eps), traj[i]);
    }
    detail::fit_slopes(r, e);

    if (e.dns)
    {
        const auto  k     = e.kernels.front();
        const auto  field = detail::make_field< D >(e, e.dns_epsilon);
        const int   Nd    = static_cast< int >(std::ceil(e.L * e.dns_ppe / e.dns_epsilon - 1e-9));
        const MacroGrid< D > dg{e.L, Nd, e.bc};
        const auto  flux  = dns_flux(field, dg);
        const double ddt  = dns_time_step(dg, flux.speed_bound(), e.T, e.dns_cfl);
        const auto  ucfg  = make_upscale_config(k.p, k.q, e.eta, e.tau, e.disc, e.reuse, e.window);
        const double tend = std::ceil((e.T + 0.5 * ucfg.window_tau()) / ddt - 1e-9) * ddt;
        std::vector< Point< D > > pts(s.grid.size());
        for (std::size_t n = 0; n < pts.size(); ++n)
            pts[n] = s.grid.coord(n);
        LocalAverager< D > avg(dg, ddt, ucfg.kernel_space, ucfg.kernel_time, ucfg.window_eta(), ucfg.window_tau(), e.T, pts);
        MacroOptions       dmo;
        dmo.observer      = [&avg](long n, const std::vector< double >& u) { avg.observe(n, u); };
        const auto dns    = solve_dns(field, dg, ddt, tend, s.g, s.h, Forcing< D >{}, {e.T}, dmo);
        const auto ua     = avg.result();
        std::optional< Trajectory< D > > efa_run;
        for (std::size_t i = 0; i < jobs.size() && !efa_run; ++i)
            if (jobs[i].k.p == k.p && jobs[i].k.q == k.q && jobs[i].eps == e.dns_epsilon)
                efa_run = traj[i];
        if (!efa_run)
            efa_run = detail::run_efa(e, s, k, e.dns_epsilon, {e.T}, mo, opt.workers);
        const auto& efa   = *efa_run;
        const double dist = l2_distance(s.grid, efa.final().values, ua) / l2_norm(s.grid, ua);
        r.dns_distance    = dist;
        r.dns_pass        = dist <= e.dns_tolerance;
        Trajectory< D > avg_tr{s.grid, {{e.T, ua}}};
        Trajectory< D > dns_tr{dg, {dns.snapshots.front()}};
        emit(e.name + "_dns_eps" + detail::tag(e.dns_epsilon), dns_tr);
        emit(e.name + "_dnsavg_eps" + detail::tag(e.dns_epsilon), avg_tr);
        emit(e.name + "_efa_dnscmp_" + detail::pair_tag(k) + "_eps" + detail::tag(e.dns_epsilon), efa);
    }
    if (!opt.out.empty())
    {
        const auto path = opt.out / (e.name + "_errors.csv");
        detail::write_rows(r, path, "norm_efa", "norm_hom");
        r.files.push_back(path.string());
    }
    return r;
}

inline ErrorReport run_experiment(const ExperimentConfig& e, const RunOptions& opt = {})
{
    switch (e.kind)
    {
    case ExperimentKind::upscaling:
        return e.dim == 1 ? run_upscaling_sweep< 1 >(e, opt) : run_upscaling_sweep< 2 >(e, opt);
    case ExperimentKind::solution1d:
        return run_solution_comparison< 1 >(e, opt);
    case ExperimentKind::solution2d:
        return run_solution_comparison< 2 >(e, opt);
    }
    throw InternalError("unhandled experiment kind");
}

inline ErrorReport run_solution_comparison_1d(const ExperimentConfig& e, const RunOptions& opt = {}) { return run_solution_comparison< 1 >(e, opt); }
inline ErrorReport run_solution_comparison_2d(const ExperimentConfig& e, const RunOptions& opt = {}) { return run_solution_comparison< 2 >(e, opt); }

/// One row per fitted slope (and one per DNS comparison) across reports.
inline void write_summary(const std::filesystem::path& path, const std::vector< ErrorReport >& reports)
{
    CsvWriter w(path, {"experiment", "p", "q", "slope", "lower", "upper", "checked", "pass", "note"});
    for (const auto& r : reports)
    {
        for (const auto& s : r.slopes)
            w.row({s.experiment, std::to_string(s.p), std::to_string(s.q), format_number(s.slope), format_number(s.lower), format_number(s.upper), s.checked ? "1" : "0", s.pass ? "1" : "0", s.note});
        if (r.dns_distance)
            w.row({r.experiment, "", "", format_number(*r.dns_distance), "", "", "1", r.dns_pass ? "1" : "0", "relative L2 distance to DNS local average"});
    }
}
} // namespace efa

#endif // EFA_EXPERIMENTS_HPP
