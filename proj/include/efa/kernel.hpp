#ifndef EFA_KERNEL_HPP
#define EFA_KERNEL_HPP

#include "efa/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

namespace efa
{
/// Averaging kernel K(t) = P(t²)(1−t²)^{q+1} on [−1,1], zero outside.
///
/// K is C^q (the factor (1−t²)^{q+1} kills q derivatives at ±1), has unit mass and p vanishing
/// moments. P has degree ⌊p/2⌋ in t²; odd moments vanish by symmetry.
class Kernel
{
public:
    Kernel(int p, int q, std::vector< double > coeffs) : p_{p}, q_{q}, coeffs_{std::move(coeffs)} {}

    int                          p() const { return p_; }
    int                          q() const { return q_; }
    const std::vector< double >& coeffs() const { return coeffs_; }

    double operator()(double t) const
    {
        if (!(std::abs(t) < 1.0))
            return 0.0;
        const double s    = t * t;
        double       poly = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            poly = poly * s + *it;
        return poly * std::pow(1.0 - s, q_ + 1);
    }

    /// K_w(x) = K(x/w)/w, supported on [−w, w].
    double scaled(double half_width, double x) const { return (*this)(x / half_width) / half_width; }

private:
    int                   p_;
    int                   q_;
    std::vector< double > coeffs_;
};

/// ∫_{−1}^{1} t^n (1−t²)^{q+1} dt = B((n+1)/2, q+2) for even n, 0 for odd n.
inline double bump_moment(int n, int q)
{
    if (n % 2 != 0)
        return 0.0;
    const double a = 0.5 * (n + 1);
    const double b = q + 2.0;
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

/// Builds the kernel in 𝕂^{p,q} of the polynomial-bump family by solving the even moment system.
inline Kernel build_kernel(int p, int q)
{
    require(p >= 1, "build_kernel: p must be >= 1");
    require(q >= 0, "build_kernel: q must be >= 0");
    const int       m = p / 2 + 1;
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(0)              = 1.0;
    for (int r = 0; r < m; ++r)
        for (int k = 0; k < m; ++k)
            a(r, k) = bump_moment(2 * k + 2 * r, q);
    const Eigen::FullPivLU< Eigen::MatrixXd > lu(a);
    if (!lu.isInvertible())
        throw InternalError("build_kernel: singular moment system");
    const Eigen::VectorXd c = lu.solve(rhs);
    return Kernel(p, q, std::vector< double >(c.data(), c.data() + m));
}

inline double eval_scaled(const Kernel& k, double eta, double x)
{
    require(eta > 0.0, "eval_scaled: eta must be positive");
    return k.scaled(eta, x);
}

/// Uniformly sampled 1D data: value[i] = f(origin + i·spacing).
struct UniformSamples
{
    double                  origin;
    double                  spacing;
    std::span< const double > values;
};

namespace detail
{
inline constexpr double coverage_tol = 1e-9;

/// Trapezoid weights h·K_w(x_i − c) (halved at the two end samples), rescaled to unit sum so that
/// constants are reproduced exactly; the rescaling factor is 1 + O(h²) or better.
inline std::vector< double > trapezoid_kernel_weights(const Kernel& k, double half_width, double origin, double h, std::size_t n, double center)
{
    std::vector< double > w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = h * k.scaled(half_width, origin + static_cast< double >(i) * h - center);
    if (n > 0)
    {
        w.front() *= 0.5;
        w.back() *= 0.5;
    }
    double mass = 0.0;
    for (const double v : w)
        mass += v;
    if (!(mass > 0.0))
        throw PreconditionError("kernel weights: window contains no kernel mass");
    for (auto& v : w)
        v /= mass;
    return w;
}

inline void check_coverage(double origin, double h, std::size_t n, double center, double half_width, const char* what)
{
    const double tol = coverage_tol * std::max(1.0, half_width);
    require(n >= 3, std::string(what) + ": need at least 3 samples");
    require(h > 0.0, std::string(what) + ": spacing must be positive");
    const double last = origin + static_cast< double >(n - 1) * h;
    require(origin <= center - half_width + tol && last >= center + half_width - tol,
            std::string(what) + ": samples do not cover the averaging window");
}
} // namespace detail

/// Trapezoidal approximation of ∫ K_w(x − c) f(x) dx from uniform samples covering [c−w, c+w].
inline double weighted_average(const Kernel& k, double half_width, const UniformSamples& f, double center)
{
    require(half_width > 0.0, "weighted_average: half width must be positive");
    detail::check_coverage(f.origin, f.spacing, f.values.size(), center, half_width, "weighted_average");
    const auto w = detail::trapezoid_kernel_weights(k, half_width, f.origin, f.spacing, f.values.size(), center);
    double     s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        s += w[i] * f.values[i];
    return s;
}

/// Same as above for explicitly given sample coordinates; they must be uniformly spaced.
inline double weighted_average(const Kernel& k, double half_width, std::span< const double > x, std::span< const double > f, double center)
{
    require(x.size() == f.size(), "weighted_average: coordinate/value size mismatch");
    require(x.size() >= 3, "weighted_average: need at least 3 samples");
    const double h = (x.back() - x.front()) / static_cast< double >(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i)
        require(std::abs((x[i] - x[i - 1]) - h) <= 1e-9 * std::abs(h), "weighted_average: non-uniform grid");
    return weighted_average(k, half_width, UniformSamples{x.front(), h, f}, center);
}
} // namespace efa

#endif // EFA_KERNEL_HPP
