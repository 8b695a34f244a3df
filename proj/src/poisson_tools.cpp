#include "hgf/poisson_tools.hpp"

#include "hgf/error.hpp"

#include <algorithm>
#include <cmath>

namespace hgf
{

using detail::require;

namespace
{
void check_input(const ChenSteinInput& in)
{
    require(in.log2_configs >= 0.0 && in.mu_N >= 0.0 && in.pair_term >= 0.0 && in.pair_term_se >= 0.0,
            "Chen-Stein inputs must be nonnegative");
}
} // namespace

double chen_stein_bound(const ChenSteinInput& input, const ModelParams& params)
{
    check_input(input);
    const double mu2 = input.mu_N * input.mu_N;
    // exp2 of a large negative exponent underflows to 0 rather than overflowing.
    const double self = std::exp2(-input.log2_configs) * mu2;
    const double cross = std::exp2(-static_cast<double>(params.bits_per_scale())) * mu2;
    return self + cross + input.pair_term;
}

double chen_stein_bound_se(const ChenSteinInput& input, const ModelParams& params, double mu_N_se)
{
    check_input(input);
    require(mu_N_se >= 0.0, "standard error must be nonnegative");
    const double slope =
        2.0 * input.mu_N * (std::exp2(-input.log2_configs) + std::exp2(-static_cast<double>(params.bits_per_scale())));
    return slope * mu_N_se + input.pair_term_se;
}

double poisson_pmf(std::uint64_t k, double lambda)
{
    require(lambda >= 0.0 && std::isfinite(lambda), "Poisson rate must be finite and nonnegative");
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    const double kk = static_cast<double>(k);
    return std::exp(kk * std::log(lambda) - lambda - std::lgamma(kk + 1.0));
}

namespace
{
/// Upper bound on P(X >= k) for X ~ Poisson(lambda) and k > lambda - 1:
/// the ratio of consecutive masses is lambda / (j + 1) <= lambda / (k + 1).
double tail_bound(std::uint64_t k, double lambda)
{
    const double kk = static_cast<double>(k);
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    if (kk + 1.0 <= lambda) return 1.0;
    return poisson_pmf(k, lambda) * (kk + 1.0) / (kk + 1.0 - lambda);
}
} // namespace

double tv_poisson(double lambda1, double lambda2)
{
    require(lambda1 >= 0.0 && lambda2 >= 0.0, "tv_poisson needs nonnegative rates");
    require(std::isfinite(lambda1) && std::isfinite(lambda2), "tv_poisson needs finite rates");
    if (lambda1 == lambda2) return 0.0;
    const double hi = std::max(lambda1, lambda2);
    double sum = 0.0;
    for (std::uint64_t k = 0;; ++k) {
        sum += std::abs(poisson_pmf(k, lambda1) - poisson_pmf(k, lambda2));
        const std::uint64_t next = k + 1;
        if (static_cast<double>(next) > hi && tail_bound(next, lambda1) < 1e-14 && tail_bound(next, lambda2) < 1e-14) {
            break;
        }
    }
    return 0.5 * sum;
}

double avoidance_gap_budget(double mu_N, double mu_limit, double cs_bound)
{
    require(cs_bound >= 0.0, "Chen-Stein bound must be nonnegative");
    return cs_bound + tv_poisson(mu_N, mu_limit);
}

} // namespace hgf
