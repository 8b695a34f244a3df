#pragma once

namespace hgf
{

/// Standard normal CDF.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate for large positive x.
double normal_sf(double x);

/// Inverse of normal_cdf on (0, 1). Symmetric: quantile(1 - u) == -quantile(u)
/// whenever 1 - u is exact.
double normal_quantile(double u);

} // namespace hgf
