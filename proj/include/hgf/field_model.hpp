#pragma once

// Closed-form quantities of the hierarchical Gaussian field: geometry,
// centering, limiting intensity, covariance and barriers.

#include <cstdint>
#include <span>
#include <vector>

namespace hgf
{

/// Labels of a configuration, one entry per scale, each in 1..b.
using Labels = std::vector<std::uint32_t>;

/**
 * Geometry of the field. A tree with `scales` levels, each node having
 * 2^bits_per_scale children, so that the system size is N = scales * bits.
 * The exponent alpha = ln K / ln N is derived, never supplied.
 */
class ModelParams
{
public:
    ModelParams(int scales, int bits_per_scale);

    int scales() const noexcept { return scales_; }
    int bits_per_scale() const noexcept { return bits_; }
    int size() const noexcept { return scales_ * bits_; }
    double alpha() const noexcept { return alpha_; }
    std::uint64_t branching() const noexcept { return std::uint64_t{1} << bits_; }
    double increment_variance() const noexcept { return static_cast<double>(bits_); }

    /// log2 of the number of leaves; equals N.
    int log2_leaves() const noexcept { return size(); }

    /// Number of tree nodes below the root, sum_{j=1..K} b^j.
    /// Saturates at UINT64_MAX when it does not fit.
    std::uint64_t node_count() const noexcept;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    int scales_;
    int bits_;
    double alpha_;
};

/// sqrt(2 ln 2).
double beta_c() noexcept;

/// Level of the maximum: beta_c N - (1 + 2 alpha) / (2 beta_c) ln N.
double centering(const ModelParams& params);

/**
 * Window on the real line, closed at both ends. The lower end must be finite;
 * the upper end may be +infinity.
 */
struct Interval
{
    Interval(double lower, double upper);

    double lower;
    double upper;

    bool compact() const noexcept;
    bool contains(double x) const noexcept { return x >= lower && x <= upper; }
    bool contains(const Interval& other) const noexcept
    {
        return other.lower >= lower && other.upper <= upper;
    }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Limiting intensity mu(A) = int_A exp(-beta_c x) dx / sqrt(2 pi).
double intensity(const Interval& window);

/// Length of the common label prefix of two configurations.
int overlap(std::span<const std::uint32_t> sigma, std::span<const std::uint32_t> tau,
            const ModelParams& params);

/// cov[X_sigma, X_tau] = overlap * m.
double covariance(std::span<const std::uint32_t> sigma, std::span<const std::uint32_t> tau,
                  const ModelParams& params);

/// Midpoint of the admissible range (0, (1 - alpha) / 2).
double default_gamma(const ModelParams& params);

/**
 * Scale-indexed threshold. Three families are supported:
 *  - upper:   U(k) = beta_c k m + ln N
 *  - lowered: E(k) = U(k) - N^gamma on interior scales, U(k) at k = 0 and k = K
 *  - custom:  U(k) + f(k) for a table f(0..K)
 */
class Barrier
{
public:
    enum class Kind
    {
        upper,
        lowered,
        custom
    };

    static Barrier upper();
    /// Throws unless 0 < gamma < (1 - alpha) / 2.
    static Barrier lowered(const ModelParams& params, double gamma);
    static Barrier lowered(const ModelParams& params) { return lowered(params, default_gamma(params)); }
    /// `offsets` must hold K + 1 values. With `pinned_endpoints` the table is
    /// additionally required to vanish at k = 0 and k = K.
    static Barrier custom(const ModelParams& params, std::vector<double> offsets,
                          bool pinned_endpoints = true);

    Kind kind() const noexcept { return kind_; }
    double gamma() const noexcept { return gamma_; }
    const std::vector<double>& offsets() const noexcept { return offsets_; }

    double value(int k, const ModelParams& params) const;

    /// value(k) for k = 0..K.
    std::vector<double> table(const ModelParams& params) const;

private:
    Barrier(Kind kind, double gamma, std::vector<double> offsets)
        : kind_(kind), gamma_(gamma), offsets_(std::move(offsets))
    {
    }

    Kind kind_;
    double gamma_;
    std::vector<double> offsets_;
};

double barrier_value(const Barrier& barrier, int k, const ModelParams& params);

} // namespace hgf
