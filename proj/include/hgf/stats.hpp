#pragma once

// Small statistical helpers shared by the analysis modules. All reductions run
// in input order so repeated evaluation is bit-identical.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace hgf
{

struct Estimate
{
    double value = 0.0;
    double std_error = 0.0;

    friend bool operator==(const Estimate&, const Estimate&) = default;
};

/// Sample mean and standard error of the mean (two-pass, n - 1 denominator).
/// A single observation gets standard error 0.
Estimate mean_estimate(std::span<const double> xs);

/// Frequency of successes with binomial standard error sqrt(p(1-p)/n).
Estimate binomial_estimate(std::uint64_t successes, std::uint64_t trials);

/// Sample variance with n - 1 denominator.
double sample_variance(std::span<const double> xs);

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
template <class Cdf>
double ks_statistic(std::span<const double> xs, Cdf&& cdf)
{
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Spearman rank correlation (average ranks for ties).
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// One-sided exact permutation p-value P(rho_perm >= rho_obs) for the
/// alternative "y increases with x". Needs 2 <= n <= 10.
double spearman_increasing_pvalue(std::span<const double> x, std::span<const double> y);

} // namespace hgf
