#ifndef EFA_REGRESSION_HPP
#define EFA_REGRESSION_HPP

#include "efa/error.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace efa
{
inline constexpr double noise_floor = 1e-12;

/// Least-squares slope of log(error) against log(ε). Pairs with error below the noise floor are
/// dropped; at least three must remain.
inline double fit_loglog_slope(const std::vector< std::pair< double, double > >& pairs, double floor = noise_floor)
{
    std::vector< std::pair< double, double > > pts;
    for (const auto& [e, err] : pairs)
    {
        if (!(e > 0.0))
            throw RegressionError("fit_loglog_slope: abscissa must be positive");
        if (std::isfinite(err) && err >= floor)
            pts.emplace_back(std::log(e), std::log(err));
    }
    if (pts.size() < 3)
        throw RegressionError("fit_loglog_slope: fewer than 3 points above the noise floor");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts)
    {
        mx += x;
        my += y;
    }
    mx /= static_cast< double >(pts.size());
    my /= static_cast< double >(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : pts)
    {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if (!(sxx > 0.0))
        throw RegressionError("fit_loglog_slope: abscissae are all equal");
    return sxy / sxx;
}
} // namespace efa

#endif // EFA_REGRESSION_HPP
