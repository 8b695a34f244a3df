#include "hgf/stats.hpp"

#include "hgf/error.hpp"

#include <cmath>
#include <numeric>

namespace hgf
{

Estimate mean_estimate(std::span<const double> xs)
{
    detail::require(!xs.empty(), "mean of an empty sample");
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    if (xs.size() == 1) return {mean, 0.0};
    return {mean, std::sqrt(sample_variance(xs) / n)};
}

double sample_variance(std::span<const double> xs)
{
    detail::require(xs.size() >= 2, "variance needs at least two observations");
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(xs.size() - 1);
}

Estimate binomial_estimate(std::uint64_t successes, std::uint64_t trials)
{
    detail::require(trials >= 1, "binomial estimate needs at least one trial");
    detail::require(successes <= trials, "more successes than trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

double ks_two_sample(std::span<const double> a, std::span<const double> b)
{
    detail::require(!a.empty() && !b.empty(), "two-sample KS needs nonempty samples");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

namespace
{
std::vector<double> average_ranks(std::span<const double> v)
{
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y)
{
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}
} // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y)
{
    detail::require(x.size() == y.size() && x.size() >= 2, "spearman needs paired samples of size >= 2");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

double spearman_increasing_pvalue(std::span<const double> x, std::span<const double> y)
{
    detail::require(x.size() == y.size() && x.size() >= 2 && x.size() <= 10,
                    "exact spearman test needs 2..10 paired observations");
    const auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    const double observed = pearson(rx, ry);
    std::sort(ry.begin(), ry.end());
    std::uint64_t at_least = 0;
    std::uint64_t total = 0;
    do {
        ++total;
        if (pearson(rx, ry) >= observed - 1e-12) ++at_least;
    } while (std::next_permutation(ry.begin(), ry.end()));
    // Tied ranks shrink the distinct-permutation count uniformly, so the ratio
    // over distinct arrangements is still the permutation p-value.
    return static_cast<double>(at_least) / static_cast<double>(total);
}

} // namespace hgf
