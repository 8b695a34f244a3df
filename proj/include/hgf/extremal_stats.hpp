#pragma once

// Statistics of replicate batches: mean measures (exact and empirical),
// avoidance functions, overlap census of extremal pairs, maximum-law fits and
// the log-correction estimator.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hgf/field_model.hpp"
#include "hgf/stats.hpp"
#include "hgf/tree_sampler.hpp"

namespace hgf
{

enum class PointFilter
{
    unbarred,  ///< every point
    barrier_U, ///< points with below_U
    barrier_E, ///< points with below_E
};

/**
 * E[Xi_N(A)] = 2^N int_A exp(-(x + a_N)^2 / (2N)) dx / sqrt(2 pi N), by
 * adaptive Gauss-Kronrod quadrature with relative error below 1e-10. The
 * integrand is evaluated in log space so 2^N never overflows.
 */
double exact_unbarred_mean(const ModelParams& params, const Interval& window);

/// Points of one replicate passing `filter` with recentered value in `window`.
std::uint64_t count_points(const PointProcessSample& sample, PointFilter filter, const Interval& window);

/// Mean count over replicates, with standard error. `window` defaults to the
/// batch window and must lie inside it.
Estimate empirical_mean_measure(std::span<const PointProcessSample> batch, PointFilter filter,
                                std::optional<Interval> window = std::nullopt);

/// Fraction of replicates with no point in the window, binomial standard error.
Estimate avoidance_probability(std::span<const PointProcessSample> batch, PointFilter filter,
                               std::optional<Interval> window = std::nullopt);

struct MeanMeasureReport
{
    Interval window;
    double exact_unbarred = 0.0;
    Estimate mc_unbarred;
    Estimate mc_barred_E;
    double limit_intensity = 0.0;
};

MeanMeasureReport mean_measure_report(std::span<const PointProcessSample> batch,
                                      std::optional<Interval> window = std::nullopt);

/// Replicate-level comparison of the U- and E-filtered counts.
struct BarrierComparison
{
    Estimate prob_differ;     ///< P(count_U != count_E)
    Estimate mean_difference; ///< E[count_U - count_E]
};

BarrierComparison compare_barriers(std::span<const PointProcessSample> batch,
                                   std::optional<Interval> window = std::nullopt);

struct OverlapCensus
{
    /// Unordered E-compliant pairs in the window, summed over replicates,
    /// indexed by overlap 0..K.
    std::vector<std::uint64_t> counts;
    /// Per-replicate count of pairs with overlap in 1..K-1, averaged.
    Estimate interior_mean;
    std::uint64_t replicates = 0;

    std::uint64_t total_pairs() const noexcept;
};

/// Requires K >= 2.
OverlapCensus pair_overlap_census(std::span<const PointProcessSample> batch,
                                  std::optional<Interval> window = std::nullopt);

struct MaxLevel
{
    double size = 0.0;     ///< N
    double mean_max = 0.0; ///< average of the replicate maxima
};

struct LogCorrectionFit
{
    double c_hat = 0.0;
    double rms_residual = 0.0;
};

/// Least squares for mean_max = beta_c N - c / (2 beta_c) ln N with beta_c
/// fixed and c free. Needs at least three distinct N.
LogCorrectionFit log_correction_fit(std::span<const MaxLevel> points);

struct MaxLawReport
{
    ModelParams params;
    std::vector<double> maxima;
    double mean_recentered = 0.0;
    double var_recentered = 0.0;
    double location = 0.0;
    double scale = 0.0; ///< pinned to 1 / beta_c
    double ks_statistic = 0.0;
};

/// Location of the Gumbel law exp(-e^{-beta_c x} / (beta_c sqrt(2 pi))) that
/// the recentered maximum approaches.
double gumbel_limit_location();

/// Gumbel fit of max - a_N with scale 1/beta_c and maximum-likelihood
/// location. Needs at least 100 non-constant maxima.
MaxLawReport gumbel_report(std::span<const double> maxima, const ModelParams& params);

/// Same fit on values that are already recentered (no params needed).
double gumbel_location_pinned(std::span<const double> recentered);

} // namespace hgf
