#ifndef EFA_COEFFICIENT_HPP
#define EFA_COEFFICIENT_HPP

#include "efa/error.hpp"
#include "efa/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

namespace efa
{
enum class CoefficientKind
{
    periodic,
    locally_periodic,
    almost_periodic,
    constant
};

inline std::string to_string(CoefficientKind k)
{
    switch (k)
    {
    case CoefficientKind::periodic:
        return "periodic";
    case CoefficientKind::locally_periodic:
        return "locally_periodic";
    case CoefficientKind::almost_periodic:
        return "almost_periodic";
    case CoefficientKind::constant:
        return "constant";
    }
    return "unknown";
}

/// Named real parameters of a builtin coefficient (e.g. {"c", 0.5}).
using ParamMap = std::map< std::string, double >;

/// Parameters controlling how |A|_∞ is estimated.
struct SupSampling
{
    /// Number of low-discrepancy samples over [0,1]^D.
    std::size_t samples = std::size_t{1} << 20;
    /// Multiplicative safety factor applied to the sampled maximum.
    double inflation = 1.05;
};

/// A media model A^ε(x): a pure map from points to symmetric D×D matrices with
/// ellipticity bounds c₁ ≤ ζᵀAζ/|ζ|² ≤ c₂. Cheap to copy; the evaluator is shared and immutable.
template < int D >
    requires SupportedDim< D >
class CoefficientField
{
public:
    using Evaluator = std::function< Matrix< D >(const Point< D >&) >;

    CoefficientField(std::string     name,
                     CoefficientKind kind,
                     double          epsilon,
                     Evaluator       eval,
                     double          lower_bound,
                     double          upper_bound,
                     std::optional< Point< D > > cell_period = std::nullopt)
        : name_{std::move(name)},
          kind_{kind},
          epsilon_{epsilon},
          eval_{std::make_shared< const Evaluator >(std::move(eval))},
          lower_{lower_bound},
          upper_{upper_bound},
          period_{cell_period}
    {
        if (!(epsilon > 0.0))
            throw ConfigError("coefficient '" + name_ + "': epsilon must be positive");
        if (!(lower_bound > 0.0) || !(upper_bound >= lower_bound))
            throw ConfigError("coefficient '" + name_ + "': invalid ellipticity bounds");
    }

    Matrix< D > operator()(const Point< D >& x) const { return (*eval_)(x); }

    const std::string& name() const { return name_; }
    CoefficientKind    kind() const { return kind_; }
    double             epsilon() const { return epsilon_; }
    double             lower_bound() const { return lower_; }
    double             upper_bound() const { return upper_; }

    /// Period of the fine-scale cell in units of ε, if the field is (exactly) periodic in the fast variable.
    const std::optional< Point< D > >& cell_period() const { return period_; }

private:
    std::string                        name_;
    CoefficientKind                    kind_;
    double                             epsilon_;
    std::shared_ptr< const Evaluator > eval_;
    double                             lower_;
    double                             upper_;
    std::optional< Point< D > >        period_;
};

namespace detail
{
// Additive-recurrence (Kronecker) sequences: golden ratio in 1D, the R2 plastic-number sequence in 2D.
template < int D >
Point< D > kronecker_point(std::size_t k)
{
    if constexpr (D == 1)
    {
        constexpr double a = 0.6180339887498949;
        return {std::fmod(0.5 + a * static_cast< double >(k), 1.0)};
    }
    else
    {
        constexpr double g  = 1.32471795724474602596;
        constexpr double a1 = 1.0 / g;
        constexpr double a2 = 1.0 / (g * g);
        const double     kk = static_cast< double >(k);
        return {std::fmod(0.5 + a1 * kk, 1.0), std::fmod(0.5 + a2 * kk, 1.0)};
    }
}

/// Smallest integer n ≤ 1000 such that r·n is an integer (to 1e-12), if any.
inline std::optional< double > rational_period(double r)
{
    for (int n = 1; n <= 1000; ++n)
    {
        const double rn = r * n;
        if (std::abs(rn - std::round(rn)) < 1e-12 * std::max(1.0, std::abs(rn)))
            return static_cast< double >(n);
    }
    return std::nullopt;
}

inline double param_or(const ParamMap& params, const std::string& key, double fallback)
{
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}
} // namespace detail

/// |A|_∞ := sup_x ‖A(x)‖₂ estimated from `cfg.samples` Kronecker-sequence points over [0,1]^D,
/// multiplied by `cfg.inflation`.
template < int D >
double sup_norm(const CoefficientField< D >& field, const SupSampling& cfg = {})
{
    if (field.kind() == CoefficientKind::constant)
        return cfg.inflation * spectral_norm(field(Point< D >{}));
    double best = 0.0;
    for (std::size_t k = 0; k < cfg.samples; ++k)
        best = std::max(best, spectral_norm(field(detail::kronecker_point< D >(k))));
    return cfg.inflation * best;
}

/// Largest Gershgorin row sum over the same sample set (no inflation). Used by the CFL rules.
template < int D >
double sampled_gershgorin(const CoefficientField< D >& field, std::size_t samples = std::size_t{1} << 16)
{
    if (field.kind() == CoefficientKind::constant)
        return gershgorin_bound(field(Point< D >{}));
    double best = 0.0;
    for (std::size_t k = 0; k < samples; ++k)
        best = std::max(best, gershgorin_bound(field(detail::kronecker_point< D >(k))));
    return best;
}

// Builtin media. Formulas are evaluated in the fast variable x/ε; bounds are analytic except
// where noted.

/// c·I. `epsilon` only sets the micro-grid scale; the field has no structure.
template < int D >
CoefficientField< D > constant_coefficient(double c, double epsilon = 1.0)
{
    if (!(c > 0.0))
        throw ConfigError("constant coefficient requires c > 0");
    const auto a = Matrix< D >::identity(c);
    Point< D > period;
    period.fill(1.0);
    return CoefficientField< D >("constant", CoefficientKind::constant, epsilon, [a](const Point< D >&) { return a; }, c, c, period);
}

/// 1.1 + sin(2πx/ε) (with 1.1 → `alpha`).
inline CoefficientField< 1 > per1d_sin(double epsilon, double alpha = 1.1)
{
    if (!(alpha > 1.0))
        throw ConfigError("per1d_sin requires alpha > 1");
    constexpr double tp = 2.0 * std::numbers::pi;
    return CoefficientField< 1 >(
        "per1d_sin",
        CoefficientKind::periodic,
        epsilon,
        [=](const Point< 1 >& x) { return Matrix< 1 >{{alpha + std::sin(tp * x[0] / epsilon)}}; },
        alpha - 1.0,
        alpha + 1.0,
        Point< 1 >{1.0});
}

/// (1.5 + sin 2πx)(1.5 + sin 2πx/ε)
inline CoefficientField< 1 > locper1d(double epsilon)
{
    constexpr double tp = 2.0 * std::numbers::pi;
    return CoefficientField< 1 >(
        "locper1d",
        CoefficientKind::locally_periodic,
        epsilon,
        [=](const Point< 1 >& x) {
            return Matrix< 1 >{{(1.5 + std::sin(tp * x[0])) * (1.5 + std::sin(tp * x[0] / epsilon))}};
        },
        0.25,
        6.25);
}

/// ¼ exp(sin(2π r x/ε) + sin(2πx/ε)), r = √2 by default; a rational r (e.g. 1.41) makes it periodic.
inline CoefficientField< 1 > almostper1d(double epsilon, double ratio = std::numbers::sqrt2)
{
    constexpr double tp     = 2.0 * std::numbers::pi;
    const auto       period = detail::rational_period(ratio);
    // sup/inf are approached (irrational r) or attained up to O(1/period²) (rational r); the analytic
    // envelope is a valid bound in both cases.
    return CoefficientField< 1 >(
        "almostper1d",
        CoefficientKind::almost_periodic,
        epsilon,
        [=](const Point< 1 >& x) {
            const double y = x[0] / epsilon;
            return Matrix< 1 >{{0.25 * std::exp(std::sin(tp * ratio * y) + std::sin(tp * y))}};
        },
        0.25 * std::exp(-2.0),
        0.25 * std::exp(2.0),
        period ? std::optional< Point< 1 > >{Point< 1 >{*period}} : std::nullopt);
}

/// (1.1 + cos(2πx₁/ε) sin(2πx₂/ε) + exp(cos(2πx₁/ε) + sin(2πx₂/ε)))⁻¹ I.
/// Bounds from a 1024² sweep of the unit cell, widened by 1%.
inline CoefficientField< 2 > iso2d(double epsilon)
{
    constexpr double tp    = 2.0 * std::numbers::pi;
    auto             recip = [](double y1, double y2) {
        return 1.1 + std::cos(tp * y1) * std::sin(tp * y2) + std::exp(std::cos(tp * y1) + std::sin(tp * y2));
    };
    double     rmin = 1e300, rmax = 0.0;
    const int  n    = 1024;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
        {
            const double r = recip(static_cast< double >(i) / n, static_cast< double >(j) / n);
            rmin           = std::min(rmin, r);
            rmax           = std::max(rmax, r);
        }
    return CoefficientField< 2 >(
        "iso2d",
        CoefficientKind::periodic,
        epsilon,
        [=](const Point< 2 >& x) { return Matrix< 2 >::identity(1.0 / recip(x[0] / epsilon, x[1] / epsilon)); },
        0.99 / rmax,
        1.01 / rmin,
        Point< 2 >{1.0, 1.0});
}

/// (1/3)(3/2 + sin 2πx₁/ε)(3/2 + ½(cos 2πr x₁/ε + cos 2πx₂/ε)) [[1,c],[c,1]], r = √2 by default.
inline CoefficientField< 2 > aniso2d(double epsilon, double c, double ratio = std::numbers::sqrt2)
{
    if (!(std::abs(c) < 1.0))
        throw ConfigError("aniso2d requires |c| < 1");
    constexpr double tp     = 2.0 * std::numbers::pi;
    const auto       period = detail::rational_period(ratio);
    // The scalar factor s takes values in [1/12, 25/12]; eigenvalues of s·D are s(1 ± c).
    return CoefficientField< 2 >(
        "aniso2d",
        CoefficientKind::almost_periodic,
        epsilon,
        [=](const Point< 2 >& x) {
            const double y1 = x[0] / epsilon;
            const double y2 = x[1] / epsilon;
            const double s  = (1.0 / 3.0) * (1.5 + std::sin(tp * y1)) *
                             (1.5 + 0.5 * (std::cos(tp * ratio * y1) + std::cos(tp * y2)));
            Matrix< 2 > a;
            a(0, 0) = s;
            a(1, 1) = s;
            a(0, 1) = s * c;
            a(1, 0) = s * c;
            return a;
        },
        (1.0 - std::abs(c)) / 12.0,
        (1.0 + std::abs(c)) * 25.0 / 12.0,
        period ? std::optional< Point< 2 > >{Point< 2 >{*period, 1.0}} : std::nullopt);
}

/// Registry lookup by name. Recognised names: constant(c), per1d_sin(alpha), locper1d,
/// almostper1d(ratio) for D=1; constant(c), iso2d, aniso2d(c, ratio) for D=2.
template < int D >
CoefficientField< D > builtin_coefficient(const std::string& name, double epsilon, const ParamMap& params = {})
{
    if (!(epsilon > 0.0))
        throw ConfigError("epsilon must be positive");
    using detail::param_or;
    auto allow = [&](std::initializer_list< const char* > keys) {
        for (const auto& [k, v] : params)
            if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end())
                throw ConfigError("coefficient '" + name + "' has no parameter '" + k + "'");
    };
    if (name == "constant")
    {
        allow({"c"});
        return constant_coefficient< D >(param_or(params, "c", 1.0), epsilon);
    }
    if constexpr (D == 1)
    {
        if (name == "per1d_sin")
        {
            allow({"alpha"});
            return per1d_sin(epsilon, param_or(params, "alpha", 1.1));
        }
        if (name == "locper1d")
        {
            allow({});
            return locper1d(epsilon);
        }
        if (name == "almostper1d")
        {
            allow({"ratio"});
            return almostper1d(epsilon, param_or(params, "ratio", std::numbers::sqrt2));
        }
    }
    else
    {
        if (name == "iso2d")
        {
            allow({});
            return iso2d(epsilon);
        }
        if (name == "aniso2d")
        {
            allow({"c", "ratio"});
            return aniso2d(epsilon, param_or(params, "c", 0.0), param_or(params, "ratio", std::numbers::sqrt2));
        }
    }
    throw ConfigError("unknown coefficient '" + name + "' for dimension " + std::to_string(D));
}
} // namespace efa

#endif // EFA_COEFFICIENT_HPP
