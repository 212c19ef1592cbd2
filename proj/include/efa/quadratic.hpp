#ifndef EFA_QUADRATIC_HPP
#define EFA_QUADRATIC_HPP

#include "efa/error.hpp"
#include "efa/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

namespace efa
{
/// û(x) = c0 + grad·(x−x_c) + ½(x−x_c)ᵀ hess (x−x_c).
template < int D >
struct QuadraticPoly
{
    Point< D >  center{};
    double      c0 = 0.0;
    Point< D >  grad{};
    Matrix< D > hess{};

    double operator()(const Point< D >& x) const
    {
        Point< D > r;
        for (int i = 0; i < D; ++i)
            r[i] = x[i] - center[i];
        double v = c0;
        for (int i = 0; i < D; ++i)
        {
            v += grad[i] * r[i];
            for (int j = 0; j < D; ++j)
                v += 0.5 * hess(i, j) * r[i] * r[j];
        }
        return v;
    }

    QuadraticPoly operator+(const QuadraticPoly& o) const
    {
        QuadraticPoly r = *this;
        r.c0 += o.c0;
        for (int i = 0; i < D; ++i)
            r.grad[i] += o.grad[i];
        r.hess = r.hess + o.hess;
        return r;
    }
};

/// The probe polynomial (x−x_c)_i (x−x_c)_j.
template < int D >
QuadraticPoly< D > monomial_probe(const Point< D >& center, int i, int j)
{
    QuadraticPoly< D > q;
    q.center = center;
    q.hess(i, j) += 1.0;
    q.hess(j, i) += 1.0;
    return q;
}

/// One data point of a fit: offset from the fit centre (in physical units) and value.
template < int D >
struct PatchSample
{
    Point< D > offset;
    double     value;
};

/// Unweighted least-squares fit of a quadratic over the monomials {1, x_i, x_i x_j (i≤j)}.
template < int D >
QuadraticPoly< D > fit_quadratic(std::span< const PatchSample< D > > patch, const Point< D >& center)
{
    constexpr int nb = 1 + D + D * (D + 1) / 2;
    require(patch.size() >= static_cast< std::size_t >(nb), "fit_quadratic: too few samples");
    Eigen::MatrixXd a(static_cast< Eigen::Index >(patch.size()), nb);
    Eigen::VectorXd b(static_cast< Eigen::Index >(patch.size()));
    for (std::size_t r = 0; r < patch.size(); ++r)
    {
        const auto& s = patch[r];
        require(std::isfinite(s.value), "fit_quadratic: non-finite sample");
        const auto row = static_cast< Eigen::Index >(r);
        int        c   = 0;
        a(row, c++)    = 1.0;
        for (int i = 0; i < D; ++i)
            a(row, c++) = s.offset[i];
        for (int i = 0; i < D; ++i)
            for (int j = i; j < D; ++j)
                a(row, c++) = s.offset[i] * s.offset[j];
        b(row) = s.value;
    }
    const Eigen::ColPivHouseholderQR< Eigen::MatrixXd > qr(a);
    if (qr.rank() < nb)
        throw InternalError("fit_quadratic: rank-deficient patch");
    const Eigen::VectorXd c = qr.solve(b);

    QuadraticPoly< D > q;
    q.center = center;
    int k    = 0;
    q.c0     = c(k++);
    for (int i = 0; i < D; ++i)
        q.grad[i] = c(k++);
    for (int i = 0; i < D; ++i)
        for (int j = i; j < D; ++j)
        {
            const double v = c(k++);
            if (i == j)
                q.hess(i, i) = 2.0 * v;
            else
            {
                q.hess(i, j) = v;
                q.hess(j, i) = v;
            }
        }
    return q;
}

/// Least-squares fit on the full (2m+1)^D stencil of spacing H; `values` is row-major over the
/// stencil with offsets −m…m per axis.
template < int D >
QuadraticPoly< D > fit_quadratic_patch(std::span< const double > values, double H, const Point< D >& center, int m = 2)
{
    require(m >= 1, "fit_quadratic_patch: m must be >= 1");
    const int w = 2 * m + 1;
    require(values.size() == static_cast< std::size_t >(D == 1 ? w : w * w), "fit_quadratic_patch: wrong patch size");
    std::vector< PatchSample< D > > patch;
    patch.reserve(values.size());
    for (std::size_t k = 0; k < values.size(); ++k)
    {
        PatchSample< D > s;
        if constexpr (D == 1)
            s.offset = {H * (static_cast< int >(k) - m)};
        else
            s.offset = {H * (static_cast< int >(k) / w - m), H * (static_cast< int >(k) % w - m)};
        s.value = values[k];
        patch.push_back(s);
    }
    return fit_quadratic< D >(patch, center);
}
} // namespace efa

#endif // EFA_QUADRATIC_HPP
