#ifndef EFA_AVERAGING_HPP
#define EFA_AVERAGING_HPP

#include "efa/kernel.hpp"
#include "efa/types.hpp"

#include <array>
#include <type_traits>
#include <vector>

namespace efa
{
/// Uniform tensor grid in (t, x₁, …, x_D). Values are stored time-major, then x₁, then x₂.
template < int D >
struct SpaceTimeGrid
{
    double                         t0 = 0.0;
    double                         dt = 0.0;
    std::size_t                    nt = 0;
    Point< D >                     x0{};
    double                         h = 0.0;
    std::array< std::size_t, D >   nx{};

    std::size_t space_size() const
    {
        std::size_t s = 1;
        for (auto n : nx)
            s *= n;
        return s;
    }
    std::size_t size() const { return nt * space_size(); }
};

template < int D >
struct SpaceTimeSamples
{
    SpaceTimeGrid< D >    grid;
    std::vector< double > values;

    double at(std::size_t it, std::size_t flat_space) const { return values[it * grid.space_size() + flat_space]; }
};

/// Tensor-product spatial weights Π_i h K_w(x_i − c_i) (trapezoid) for a D-dimensional uniform grid.
template < int D >
std::vector< double > spatial_weights(const Kernel& k, double half_width, const std::type_identity_t< Point< D > >& x0, double h, const std::type_identity_t< std::array< std::size_t, D > >& nx, const std::type_identity_t< Point< D > >& center)
{
    std::array< std::vector< double >, D > axis;
    for (int i = 0; i < D; ++i)
    {
        detail::check_coverage(x0[i], h, nx[i], center[i], half_width, "spatial average");
        axis[i] = detail::trapezoid_kernel_weights(k, half_width, x0[i], h, nx[i], center[i]);
    }
    if constexpr (D == 1)
        return axis[0];
    else
    {
        std::vector< double > w(nx[0] * nx[1]);
        for (std::size_t i = 0; i < nx[0]; ++i)
            for (std::size_t j = 0; j < nx[1]; ++j)
                w[i * nx[1] + j] = axis[0][i] * axis[1][j];
        return w;
    }
}

/// Trapezoidal approximation of (𝒦 ∗ f)(t_c, x_c) with kernel half-widths τ_w (time) and η_w (space).
template < int D >
double space_time_average(const Kernel& k_space, const Kernel& k_time, double eta_half, double tau_half, const SpaceTimeSamples< D >& f, double t_center, const std::type_identity_t< Point< D > >& x_center)
{
    require(eta_half > 0.0 && tau_half > 0.0, "space_time_average: half widths must be positive");
    const auto& g = f.grid;
    require(f.values.size() == g.size(), "space_time_average: sample count does not match grid");
    detail::check_coverage(g.t0, g.dt, g.nt, t_center, tau_half, "time average");
    const auto wt = detail::trapezoid_kernel_weights(k_time, tau_half, g.t0, g.dt, g.nt, t_center);
    const auto wx = spatial_weights< D >(k_space, eta_half, g.x0, g.h, g.nx, x_center);
    double     s  = 0.0;
    for (std::size_t it = 0; it < g.nt; ++it)
    {
        if (wt[it] == 0.0)
            continue;
        double inner = 0.0;
        for (std::size_t k = 0; k < wx.size(); ++k)
            inner += wx[k] * f.at(it, k);
        s += wt[it] * inner;
    }
    return s;
}
} // namespace efa

#endif // EFA_AVERAGING_HPP
