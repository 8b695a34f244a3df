#include "hgf/normal.hpp"

#include "hgf/error.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

namespace hgf
{

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_sf(double x)
{
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double normal_quantile(double u)
{
    detail::require(u > 0.0 && u < 1.0, "normal_quantile needs u in (0, 1)");
    // Work from whichever tail keeps the argument exact.
    if (u < 0.5) return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
    return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * (1.0 - u));
}

} // namespace hgf
