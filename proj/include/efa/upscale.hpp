#ifndef EFA_UPSCALE_HPP
#define EFA_UPSCALE_HPP

#include "efa/averaging.hpp"
#include "efa/kernel.hpp"
#include "efa/micro.hpp"

#include <map>
#include <mutex>
#include <optional>

namespace efa
{
enum class ReusePolicy
{
    per_call,
    effective_tensor_cache
};

/// How the nominal η, τ map to averaging windows. kernel_support takes K_η(x) = K(x/η)/η literally
/// (support [−η, η] × [−τ, τ]); half_window averages over [−η/2, η/2] × [−τ/2, τ/2] only.
enum class WindowConvention
{
    kernel_support,
    half_window
};

struct UpscaleConfig
{
    Kernel              kernel_space;
    Kernel              kernel_time;
    double              eta = 0.1;
    double              tau = 0.1;
    MicroDiscretization disc{};
    ReusePolicy         reuse  = ReusePolicy::effective_tensor_cache;
    WindowConvention    window = WindowConvention::kernel_support;

    /// Full widths of the space and time averaging windows.
    double window_eta() const { return window == WindowConvention::kernel_support ? 2.0 * eta : eta; }
    double window_tau() const { return window == WindowConvention::kernel_support ? 2.0 * tau : tau; }
};

inline UpscaleConfig make_upscale_config(int p, int q, double eta, double tau, MicroDiscretization disc = {}, ReusePolicy reuse = ReusePolicy::effective_tensor_cache,
                                         WindowConvention window = WindowConvention::kernel_support)
{
    const auto k = build_kernel(p, q);
    return UpscaleConfig{k, k, eta, tau, disc, reuse, window};
}

template < int D >
void validate(const UpscaleConfig& cfg, const CoefficientField< D >& field)
{
    require(cfg.eta >= field.epsilon() && cfg.tau >= field.epsilon(), "upscale: eta and tau must be >= epsilon");
}

/// Micro problem whose averaging window matches cfg.
template < int D >
MicroProblemSpec< D > micro_spec_for(const Medium< D >& medium, const QuadraticPoly< D >& uhat, const UpscaleConfig& cfg)
{
    return make_micro_spec(medium, uhat, cfg.window_eta(), cfg.window_tau(), cfg.disc);
}

/// Flux from precomputed micro samples: (𝒦_{τ,η} ∗ Σ A_ij ∂_ij u)(0, x_c).
template < int D >
double upscale_flux(const MicroField< D >& micro, const std::type_identity_t< Point< D > >& center, const UpscaleConfig& cfg)
{
    return space_time_average< D >(cfg.kernel_space, cfg.kernel_time, 0.5 * cfg.window_eta(), 0.5 * cfg.window_tau(), micro.integrand, 0.0, center);
}

/// F(x_c, ∇²û): runs the micro problem and averages the flux integrand on the fly.
/// Arithmetic matches space_time_average on the stored samples.
template < int D >
double upscale_flux(const Medium< D >& medium, const QuadraticPoly< D >& uhat, const UpscaleConfig& cfg)
{
    validate(cfg, medium.field);
    const auto spec  = micro_spec_for(medium, uhat, cfg);
    const int  nstep = spec.steps();
    const int  wc    = spec.window_cells();

    std::array< std::size_t, D > nx;
    Point< D >                   x0;
    for (int i = 0; i < D; ++i)
    {
        nx[i] = static_cast< std::size_t >(2 * wc + 1);
        x0[i] = uhat.center[i] - wc * spec.dx;
    }
    const auto wx = spatial_weights< D >(cfg.kernel_space, 0.5 * cfg.window_eta(), x0, spec.dx, nx, uhat.center);
    const auto nt = static_cast< std::size_t >(2 * nstep + 1);
    detail::check_coverage(-0.5 * cfg.window_tau(), spec.dt, nt, 0.0, 0.5 * cfg.window_tau(), "time average");
    const auto wt = detail::trapezoid_kernel_weights(cfg.kernel_time, 0.5 * cfg.window_tau(), -0.5 * cfg.window_tau(), spec.dt, nt, 0.0);

    std::vector< double > level(static_cast< std::size_t >(nstep + 1), 0.0);
    run_micro(spec, [&](int n, const std::vector< double >& integrand, const std::vector< double >&) {
        double inner = 0.0;
        for (std::size_t k = 0; k < wx.size(); ++k)
            inner += wx[k] * integrand[k];
        level[static_cast< std::size_t >(n)] = inner;
    });
    // Same summation order as space_time_average over t = −τ/2 … τ/2.
    double s = 0.0;
    for (std::size_t it = 0; it < nt; ++it)
    {
        if (wt[it] == 0.0)
            continue;
        const auto n = static_cast< std::size_t >(std::abs(static_cast< int >(it) - nstep));
        s += wt[it] * level[n];
    }
    return s;
}

template < int D >
double upscale_flux(const CoefficientField< D >& field, const QuadraticPoly< D >& uhat, const UpscaleConfig& cfg)
{
    return upscale_flux(Medium< D >(field), uhat, cfg);
}

/// F̂ = Σ A⁰_ij ∂_ij û.
template < int D >
double reference_flux(const Matrix< D >& a0, const QuadraticPoly< D >& uhat)
{
    require(is_symmetric(a0), "reference_flux: tensor must be symmetric");
    return contract(a0, uhat.hess);
}

/// Effective tensor a_eff(x_c) with F(x_c, H) = Σ a_eff,ij H_ij, assembled from the d(d+1)/2 probes
/// û = (x−x_c)_i (x−x_c)_j. Valid because the micro problem is linear in û.
template < int D >
Matrix< D > effective_tensor_probe(const Medium< D >& medium, const UpscaleConfig& cfg, const std::type_identity_t< Point< D > >& center)
{
    Matrix< D > a;
    for (int i = 0; i < D; ++i)
        for (int j = i; j < D; ++j)
        {
            const double f = upscale_flux(medium, monomial_probe< D >(center, i, j), cfg);
            // probe ii has hess 2e_ie_iᵀ → F = 2a_ii; probe ij has hess e_ie_jᵀ+e_je_iᵀ → F = 2a_ij.
            a(i, j) = 0.5 * f;
            a(j, i) = a(i, j);
        }
    return a;
}

/// Read-mostly map macro-node → effective tensor. Fills of the same key are idempotent since the
/// computed value is a pure function of the key.
template < int D >
class EffectiveTensorCache
{
public:
    std::optional< Matrix< D > > find(std::size_t key) const
    {
        std::scoped_lock lock(mutex_);
        const auto       it = map_.find(key);
        if (it == map_.end())
            return std::nullopt;
        return it->second;
    }

    void insert(std::size_t key, const Matrix< D >& a)
    {
        std::scoped_lock lock(mutex_);
        map_.try_emplace(key, a);
    }

    template < typename Compute >
    Matrix< D > get_or_compute(std::size_t key, Compute&& compute)
    {
        if (auto hit = find(key))
            return *hit;
        const Matrix< D > a = compute();
        insert(key, a);
        return *find(key);
    }

    std::size_t size() const
    {
        std::scoped_lock lock(mutex_);
        return map_.size();
    }

private:
    mutable std::mutex                   mutex_;
    std::map< std::size_t, Matrix< D > > map_;
};
} // namespace efa

#endif // EFA_UPSCALE_HPP
