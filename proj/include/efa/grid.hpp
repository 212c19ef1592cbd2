#ifndef EFA_GRID_HPP
#define EFA_GRID_HPP

#include "efa/error.hpp"
#include "efa/quadratic.hpp"
#include "efa/types.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <type_traits>
#include <vector>

namespace efa
{
enum class BoundaryCondition
{
    dirichlet_zero,
    periodic
};

/// Uniform grid on [0, L]^D with N cells per axis. Periodic grids store nodes 0…N−1
/// (node N ≡ node 0); Dirichlet grids store 0…N with the boundary nodes pinned to zero.
template < int D >
struct MacroGrid
{
    double            L  = 1.0;
    int               N  = 1;
    BoundaryCondition bc = BoundaryCondition::periodic;

    double H() const { return L / N; }
    int    nodes_per_axis() const { return bc == BoundaryCondition::periodic ? N : N + 1; }
    std::size_t size() const
    {
        std::size_t s = 1;
        for (int i = 0; i < D; ++i)
            s *= static_cast< std::size_t >(nodes_per_axis());
        return s;
    }

    std::array< int, D > multi_index(std::size_t flat) const
    {
        const int n = nodes_per_axis();
        if constexpr (D == 1)
            return {static_cast< int >(flat)};
        else
            return {static_cast< int >(flat / n), static_cast< int >(flat % n)};
    }

    std::size_t flat(const std::array< int, D >& idx) const
    {
        const int n = nodes_per_axis();
        if constexpr (D == 1)
            return static_cast< std::size_t >(idx[0]);
        else
            return static_cast< std::size_t >(idx[0]) * n + idx[1];
    }

    Point< D > coord(std::size_t flat_index) const
    {
        const auto idx = multi_index(flat_index);
        Point< D > x;
        for (int i = 0; i < D; ++i)
            x[i] = idx[i] * H();
        return x;
    }

    bool on_boundary(std::size_t flat_index) const
    {
        if (bc == BoundaryCondition::periodic)
            return false;
        for (const int i : multi_index(flat_index))
            if (i == 0 || i == N)
                return true;
        return false;
    }

    /// Index of the node at `idx + shift`, wrapping for periodic grids. For Dirichlet grids the
    /// shifted index must stay inside the grid.
    std::size_t neighbor(std::size_t flat_index, const std::array< int, D >& shift) const
    {
        auto      idx = multi_index(flat_index);
        const int n   = nodes_per_axis();
        for (int i = 0; i < D; ++i)
        {
            int v = idx[i] + shift[i];
            if (bc == BoundaryCondition::periodic)
                v = ((v % n) + n) % n;
            else if (v < 0 || v >= n)
                throw PreconditionError("grid neighbor outside a Dirichlet grid");
            idx[i] = v;
        }
        return flat(idx);
    }

    bool contains_shift(std::size_t flat_index, const std::array< int, D >& shift) const
    {
        if (bc == BoundaryCondition::periodic)
            return true;
        const auto idx = multi_index(flat_index);
        for (int i = 0; i < D; ++i)
            if (idx[i] + shift[i] < 0 || idx[i] + shift[i] > N)
                return false;
        return true;
    }
};

template < int D >
std::vector< double > sample(const MacroGrid< D >& grid, const std::type_identity_t< std::function< double(const Point< D >&) > >& fn)
{
    std::vector< double > v(grid.size(), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = grid.on_boundary(k) ? 0.0 : fn(grid.coord(k));
    return v;
}

/// Discrete L² norm scaled by H^{D/2}.
template < int D >
double l2_norm(const MacroGrid< D >& grid, const std::vector< double >& v)
{
    double s = 0.0;
    for (const double x : v)
        s += x * x;
    return std::sqrt(s * std::pow(grid.H(), D));
}

template < int D >
double l2_distance(const MacroGrid< D >& grid, const std::vector< double >& a, const std::vector< double >& b)
{
    require(a.size() == b.size(), "l2_distance: size mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s * std::pow(grid.H(), D));
}

enum class LiftMethod
{
    centered,      ///< quadratic interpolating the centered-difference stencil (Δ_H and cross differences)
    least_squares  ///< unweighted least squares on the (2m+1)^D patch, clipped at Dirichlet boundaries
};

/// Quadratic û centred at node `k` from grid data. Boundary nodes of Dirichlet grids are never lifted.
template < int D >
QuadraticPoly< D > lift_quadratic(const MacroGrid< D >& grid, const std::vector< double >& u, std::size_t k, LiftMethod method = LiftMethod::centered, int m = 2)
{
    QuadraticPoly< D > q;
    q.center      = grid.coord(k);
    const double H = grid.H();
    if (method == LiftMethod::centered)
    {
        q.c0 = u[k];
        for (int i = 0; i < D; ++i)
        {
            std::array< int, D > e{};
            e[i]             = 1;
            std::array< int, D > me{};
            me[i]            = -1;
            const double up  = u[grid.neighbor(k, e)];
            const double dn  = u[grid.neighbor(k, me)];
            q.grad[i]        = (up - dn) / (2.0 * H);
            q.hess(i, i)     = (up - 2.0 * u[k] + dn) / (H * H);
        }
        if constexpr (D == 2)
        {
            const double pp = u[grid.neighbor(k, {1, 1})];
            const double pm = u[grid.neighbor(k, {1, -1})];
            const double mp = u[grid.neighbor(k, {-1, 1})];
            const double mm = u[grid.neighbor(k, {-1, -1})];
            q.hess(0, 1)    = (pp - pm - mp + mm) / (4.0 * H * H);
            q.hess(1, 0)    = q.hess(0, 1);
        }
        return q;
    }

    std::vector< PatchSample< D > > patch;
    auto add = [&](const std::array< int, D >& s) {
        if (!grid.contains_shift(k, s))
            return;
        PatchSample< D > p;
        for (int i = 0; i < D; ++i)
            p.offset[i] = s[i] * H;
        p.value = u[grid.neighbor(k, s)];
        patch.push_back(p);
    };
    if constexpr (D == 1)
        for (int a = -m; a <= m; ++a)
            add({a});
    else
        for (int a = -m; a <= m; ++a)
            for (int b = -m; b <= m; ++b)
                add({a, b});
    return fit_quadratic< D >(patch, q.center);
}
} // namespace efa

#endif // EFA_GRID_HPP
