#pragma once

// Discrete bridges B(j) = sum_{i<j} d_i - (j/n) sum_{i<n} d_i and the
// barrier probabilities around them: the exact ballot value, the cyclic-shift
// argument behind it, and Monte Carlo checks of the small-shift stability.

#include <cstdint>
#include <span>
#include <vector>

#include "hgf/stats.hpp"

namespace hgf
{

struct Rational
{
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// P(B_n(j) <= 0 for j = 1..n) = 1/n for increments with a density.
Rational ballot_exact(std::int64_t n);

class BridgePath
{
public:
    /// Needs at least two finite increments. Prefix sums use compensated
    /// (Neumaier) summation; B(0) and B(n) are exactly zero.
    explicit BridgePath(std::vector<double> increments);

    std::size_t length() const noexcept { return increments_.size(); }
    const std::vector<double>& increments() const noexcept { return increments_; }
    /// B(0..n).
    const std::vector<double>& values() const noexcept { return values_; }
    double operator()(std::size_t j) const { return values_.at(j); }

    /// max_{1 <= j <= n-1} B(j).
    double interior_max() const noexcept;

    /// The bridge built from increments (d_r, d_{r+1}, ..., d_{r-1}).
    BridgePath rotated(std::size_t r) const;

private:
    std::vector<double> increments_;
    std::vector<double> values_;
};

/// Thrown when the bridge maximum over positions 0..n-1 is not unique.
class TieError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct RotationCensus
{
    std::vector<std::size_t> qualifying; ///< rotations whose bridge stays <= 0 on 1..n-1
    std::size_t argmax = 0;              ///< position of the maximum of B over 0..n-1
};

/// Checks all n rotations. Throws TieError when the maximum is attained twice.
RotationCensus rotation_census(std::span<const double> increments);

/// The unique rotation whose bridge stays below zero. Throws TieError on a tied
/// maximum and std::logic_error if the census does not find exactly one.
std::size_t rotation_oracle(std::span<const double> increments);

/**
 * Monte Carlo frequency of B(j) <= eps for all j = 1..n-1 with standard
 * Gaussian increments. Replicates are split into fixed chunks; chunk c uses
 * CounterRng(seed, c), so the estimate does not depend on `threads`.
 */
Estimate bridge_below_mc(std::size_t n, double eps, std::uint64_t reps, std::uint64_t seed, unsigned threads = 1);

/// Replicates per Monte Carlo chunk.
inline constexpr std::uint64_t bridge_chunk = 1u << 16;

struct PerturbationPoint
{
    std::size_t n = 0;
    Estimate below_zero;  ///< P(max <= 0)
    Estimate below_eps;   ///< P(max <= eps)
    Estimate difference;  ///< D(n) = |P(max <= eps) - P(max <= 0)|
    Estimate scaled;      ///< D(n) n / |eps|
    bool degenerate = false; ///< reps == 1: no usable standard error
};

struct PerturbationReport
{
    double eps = 0.0;
    double cap = 0.0;
    std::vector<PerturbationPoint> points;
    double c_fit = 0.0;               ///< max_n D(n) n / |eps|
    std::vector<std::size_t> violations; ///< n with D(n) n / |eps| > cap
    double spread = 0.0;              ///< max / min of the scaled values
    double trend_rho = 0.0;           ///< Spearman rho of scaled values against n
    double trend_pvalue = 1.0;        ///< one-sided exact p-value for an increasing trend
};

/// Default cap on D(n) n / |eps| above which a grid point is flagged.
inline constexpr double perturbation_default_cap = 5.0;

/**
 * Estimates D(n) with common random numbers: both events are evaluated on
 * the same bridges, so D(n) is the frequency of the band between 0 and eps.
 * Requires 0 < |eps| <= 1 and n >= 2 for every grid point.
 */
PerturbationReport perturbation_check(std::span<const std::size_t> n_grid, double eps, std::uint64_t reps,
                                      std::uint64_t seed, double cap = perturbation_default_cap,
                                      unsigned threads = 1);

/// Interior maxima of `reps` Gaussian bridges of length n (chunked streams as
/// in bridge_below_mc). `rotation` shifts every increment vector cyclically
/// before the bridge is built.
std::vector<double> bridge_maxima(std::size_t n, std::uint64_t reps, std::uint64_t seed, std::size_t rotation = 0,
                                  unsigned threads = 1);

} // namespace hgf
