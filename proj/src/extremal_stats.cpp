#include "hgf/extremal_stats.hpp"

#include "hgf/error.hpp"
#include "hgf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace hgf
{

using detail::require;

double exact_unbarred_mean(const ModelParams& params, const Interval& window)
{
    require(window.compact(), "exact_unbarred_mean needs a compact window");
    const double n = static_cast<double>(params.size());
    const double level = centering(params);
    // log of 2^N / sqrt(2 pi N)
    const double log_scale = n * std::numbers::ln2 - 0.5 * std::log(2.0 * std::numbers::pi * n);
    auto density = [&](double x) {
        const double y = x + level;
        return std::exp(log_scale - y * y / (2.0 * n));
    };
    const auto result = integrate_adaptive(density, window.lower, window.upper, 1e-13);
    return result.value;
}

namespace
{
Interval resolve_window(std::span<const PointProcessSample> batch, const std::optional<Interval>& window)
{
    require(!batch.empty(), "batch must be nonempty");
    const Interval w = window.value_or(batch.front().window);
    for (const auto& s : batch) {
        require(s.window.contains(w), "analysis window must lie inside every replicate window");
        require(s.params == batch.front().params, "batch mixes model parameters");
    }
    return w;
}

bool passes(const ExtremalPoint& p, PointFilter filter)
{
    switch (filter) {
    case PointFilter::unbarred:
        return true;
    case PointFilter::barrier_U:
        return p.below_U;
    case PointFilter::barrier_E:
        return p.below_E;
    }
    return false;
}
} // namespace

std::uint64_t count_points(const PointProcessSample& sample, PointFilter filter, const Interval& window)
{
    std::uint64_t n = 0;
    for (const auto& p : sample.points) {
        if (window.contains(p.recentered) && passes(p, filter)) ++n;
    }
    return n;
}

Estimate empirical_mean_measure(std::span<const PointProcessSample> batch, PointFilter filter,
                                std::optional<Interval> window)
{
    const Interval w = resolve_window(batch, window);
    std::vector<double> counts;
    counts.reserve(batch.size());
    for (const auto& s : batch) counts.push_back(static_cast<double>(count_points(s, filter, w)));
    return mean_estimate(counts);
}

Estimate avoidance_probability(std::span<const PointProcessSample> batch, PointFilter filter,
                               std::optional<Interval> window)
{
    const Interval w = resolve_window(batch, window);
    std::uint64_t empty = 0;
    for (const auto& s : batch) {
        if (count_points(s, filter, w) == 0) ++empty;
    }
    return binomial_estimate(empty, batch.size());
}

MeanMeasureReport mean_measure_report(std::span<const PointProcessSample> batch, std::optional<Interval> window)
{
    const Interval w = resolve_window(batch, window);
    return MeanMeasureReport{w, exact_unbarred_mean(batch.front().params, w),
                             empirical_mean_measure(batch, PointFilter::unbarred, w),
                             empirical_mean_measure(batch, PointFilter::barrier_E, w), intensity(w)};
}

BarrierComparison compare_barriers(std::span<const PointProcessSample> batch, std::optional<Interval> window)
{
    const Interval w = resolve_window(batch, window);
    std::uint64_t differ = 0;
    std::vector<double> diffs;
    diffs.reserve(batch.size());
    for (const auto& s : batch) {
        const auto u = count_points(s, PointFilter::barrier_U, w);
        const auto e = count_points(s, PointFilter::barrier_E, w);
        if (u != e) ++differ;
        diffs.push_back(static_cast<double>(u) - static_cast<double>(e));
    }
    return {binomial_estimate(differ, batch.size()), mean_estimate(diffs)};
}

std::uint64_t OverlapCensus::total_pairs() const noexcept
{
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    return total;
}

OverlapCensus pair_overlap_census(std::span<const PointProcessSample> batch, std::optional<Interval> window)
{
    const Interval w = resolve_window(batch, window);
    const ModelParams& params = batch.front().params;
    const int depth = params.scales();
    require(depth >= 2, "overlap census needs K >= 2 (no interior overlaps otherwise)");

    OverlapCensus census;
    census.counts.assign(static_cast<std::size_t>(depth) + 1, 0);
    census.replicates = batch.size();
    std::vector<double> interior;
    interior.reserve(batch.size());

    std::vector<const ExtremalPoint*> kept;
    for (const auto& s : batch) {
        kept.clear();
        for (const auto& p : s.points) {
            if (p.below_E && w.contains(p.recentered)) kept.push_back(&p);
        }
        std::uint64_t inner = 0;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            for (std::size_t j = i + 1; j < kept.size(); ++j) {
                const int q = overlap(kept[i]->labels, kept[j]->labels, params);
                ++census.counts[static_cast<std::size_t>(q)];
                if (q != 0 && q != depth) ++inner;
            }
        }
        interior.push_back(static_cast<double>(inner));
    }
    census.interior_mean = mean_estimate(interior);
    return census;
}

LogCorrectionFit log_correction_fit(std::span<const MaxLevel> points)
{
    std::set<double> distinct;
    for (const auto& p : points) {
        require(std::isfinite(p.size) && p.size > 1.0, "log_correction_fit needs N > 1");
        distinct.insert(p.size);
    }
    require(distinct.size() >= 3, "log_correction_fit needs at least three distinct N");

    const double beta = beta_c();
    // Model: mean_max - beta N = c * g(N), g(N) = -ln N / (2 beta).
    double sgr = 0.0;
    double sgg = 0.0;
    for (const auto& p : points) {
        const double g = -std::log(p.size) / (2.0 * beta);
        const double r = p.mean_max - beta * p.size;
        sgr += g * r;
        sgg += g * g;
    }
    const double c = sgr / sgg;
    double ss = 0.0;
    for (const auto& p : points) {
        const double g = -std::log(p.size) / (2.0 * beta);
        const double e = (p.mean_max - beta * p.size) - c * g;
        ss += e * e;
    }
    return {c, std::sqrt(ss / static_cast<double>(points.size()))};
}

double gumbel_limit_location()
{
    const double beta = beta_c();
    return -std::log(beta * std::sqrt(2.0 * std::numbers::pi)) / beta;
}

double gumbel_location_pinned(std::span<const double> recentered)
{
    require(!recentered.empty(), "gumbel fit needs data");
    const double scale = 1.0 / beta_c();
    // MLE with known scale s: loc = -s ln(mean exp(-x/s)), shifted by the minimum.
    const double lo = *std::min_element(recentered.begin(), recentered.end());
    double acc = 0.0;
    for (double x : recentered) acc += std::exp(-(x - lo) / scale);
    return lo - scale * std::log(acc / static_cast<double>(recentered.size()));
}

MaxLawReport gumbel_report(std::span<const double> maxima, const ModelParams& params)
{
    require(maxima.size() >= 100, "gumbel_report needs at least 100 maxima, got " + std::to_string(maxima.size()));
    const double level = centering(params);
    std::vector<double> shifted;
    shifted.reserve(maxima.size());
    for (double m : maxima) {
        require(std::isfinite(m), "maxima must be finite");
        shifted.push_back(m - level);
    }
    const auto [lo, hi] = std::minmax_element(shifted.begin(), shifted.end());
    require(*lo < *hi, "gumbel fit is degenerate for constant maxima");
    const double var = sample_variance(shifted);

    MaxLawReport report{params, std::vector<double>(maxima.begin(), maxima.end()), 0.0, var, 0.0, 1.0 / beta_c(), 0.0};
    report.mean_recentered = mean_estimate(shifted).value;
    report.location = gumbel_location_pinned(shifted);
    const double loc = report.location;
    const double scale = report.scale;
    report.ks_statistic = ks_statistic(shifted, [&](double x) { return std::exp(-std::exp(-(x - loc) / scale)); });
    return report;
}

} // namespace hgf
