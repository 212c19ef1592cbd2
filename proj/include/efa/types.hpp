#ifndef EFA_TYPES_HPP
#define EFA_TYPES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace efa
{
template < int D >
concept SupportedDim = (D == 1 || D == 2);

template < int D >
using Point = std::array< double, D >;

/// Dense D×D matrix, row-major. Used for symmetric tensors throughout.
template < int D >
struct Matrix
{
    std::array< double, D * D > m{};

    constexpr double&       operator()(int i, int j) { return m[i * D + j]; }
    constexpr double        operator()(int i, int j) const { return m[i * D + j]; }
    friend constexpr bool   operator==(const Matrix&, const Matrix&) = default;

    static constexpr Matrix identity(double s = 1.0)
    {
        Matrix r;
        for (int i = 0; i < D; ++i)
            r(i, i) = s;
        return r;
    }
};

template < int D >
constexpr Matrix< D > operator*(double s, Matrix< D > a)
{
    for (auto& v : a.m)
        v *= s;
    return a;
}

template < int D >
constexpr Matrix< D > operator+(Matrix< D > a, const Matrix< D >& b)
{
    for (std::size_t k = 0; k < a.m.size(); ++k)
        a.m[k] += b.m[k];
    return a;
}

/// Σ_ij A_ij B_ij
template < int D >
constexpr double contract(const Matrix< D >& a, const Matrix< D >& b)
{
    double s = 0.0;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
            s += a(i, j) * b(i, j);
    return s;
}

template < int D >
constexpr double trace(const Matrix< D >& a)
{
    double s = 0.0;
    for (int i = 0; i < D; ++i)
        s += a(i, i);
    return s;
}

template < int D >
constexpr bool is_symmetric(const Matrix< D >& a)
{
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < i; ++j)
            if (a(i, j) != a(j, i))
                return false;
    return true;
}

/// Eigenvalues of a symmetric matrix, ascending.
template < int D >
std::array< double, D > sym_eigenvalues(const Matrix< D >& a)
{
    if constexpr (D == 1)
        return {a(0, 0)};
    else
    {
        const double mean = 0.5 * (a(0, 0) + a(1, 1));
        const double half = 0.5 * (a(0, 0) - a(1, 1));
        const double r    = std::hypot(half, a(0, 1));
        return {mean - r, mean + r};
    }
}

template < int D >
double spectral_norm(const Matrix< D >& a)
{
    const auto ev = sym_eigenvalues(a);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

/// max_i Σ_j |A_ij|; an upper bound for the spectral norm used in the CFL rules.
template < int D >
double gershgorin_bound(const Matrix< D >& a)
{
    double g = 0.0;
    for (int i = 0; i < D; ++i)
    {
        double row = 0.0;
        for (int j = 0; j < D; ++j)
            row += std::abs(a(i, j));
        g = std::max(g, row);
    }
    return g;
}
} // namespace efa

#endif // EFA_TYPES_HPP
