#include "hgf/field_model.hpp"

#include "hgf/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hgf
{

using detail::require;

ModelParams::ModelParams(int scales, int bits_per_scale)
    : scales_(scales), bits_(bits_per_scale), alpha_(0.0)
{
    require(scales >= 1, "scales must be >= 1, got " + std::to_string(scales));
    require(bits_per_scale >= 1 && bits_per_scale <= 62,
            "bits_per_scale must lie in 1..62, got " + std::to_string(bits_per_scale));
    require(scales <= std::numeric_limits<int>::max() / bits_per_scale, "system size overflows");
    // K = 1 is the uncorrelated endpoint; ln K / ln N would be 0/0 when N = 1.
    if (scales_ > 1) alpha_ = std::log(static_cast<double>(scales_)) / std::log(static_cast<double>(size()));
}

std::uint64_t ModelParams::node_count() const noexcept
{
    constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t b = branching();
    std::uint64_t level = 1;
    std::uint64_t total = 0;
    for (int j = 1; j <= scales_; ++j) {
        if (level > cap / b) return cap;
        level *= b;
        if (total > cap - level) return cap;
        total += level;
    }
    return total;
}

double beta_c() noexcept
{
    // 2 ln 2 is exact in binary, so the result is the correctly rounded root.
    return std::sqrt(2.0 * std::numbers::ln2);
}

double centering(const ModelParams& params)
{
    const int n = params.size();
    require(n >= 2, "centering needs N >= 2, got N = " + std::to_string(n));
    const double beta = beta_c();
    // Evaluation order: lead = beta*N; slope = (1 + 2 alpha) / (2 beta); lead - slope*ln N.
    const double lead = beta * static_cast<double>(n);
    const double slope = (1.0 + 2.0 * params.alpha()) / (2.0 * beta);
    return lead - slope * std::log(static_cast<double>(n));
}

Interval::Interval(double lo, double hi) : lower(lo), upper(hi)
{
    require(!std::isnan(lo) && !std::isnan(hi), "interval endpoints must not be NaN");
    require(std::isfinite(lo), "interval lower end must be finite");
    require(lo < hi, "interval needs lower < upper");
}

bool Interval::compact() const noexcept
{
    return std::isfinite(lower) && std::isfinite(upper);
}

double intensity(const Interval& window)
{
    const double beta = beta_c();
    const double norm = beta * std::sqrt(2.0 * std::numbers::pi);
    // exp(-beta lo) - exp(-beta hi) without cancellation: exp(-beta lo) * (1 - exp(-beta (hi - lo))).
    const double head = std::exp(-beta * window.lower);
    const double frac = std::isinf(window.upper) ? 1.0 : -std::expm1(-beta * (window.upper - window.lower));
    return head * frac / norm;
}

int overlap(std::span<const std::uint32_t> sigma, std::span<const std::uint32_t> tau,
            const ModelParams& params)
{
    const auto k = static_cast<std::size_t>(params.scales());
    require(sigma.size() == k && tau.size() == k,
            "label vectors must have length K = " + std::to_string(k));
    const std::uint64_t b = params.branching();
    for (std::size_t j = 0; j < k; ++j) {
        require(sigma[j] >= 1 && sigma[j] <= b && tau[j] >= 1 && tau[j] <= b, "labels must lie in 1..b");
    }
    int common = 0;
    while (static_cast<std::size_t>(common) < k && sigma[common] == tau[common]) ++common;
    return common;
}

double covariance(std::span<const std::uint32_t> sigma, std::span<const std::uint32_t> tau,
                  const ModelParams& params)
{
    return overlap(sigma, tau, params) * params.increment_variance();
}

double default_gamma(const ModelParams& params)
{
    return (1.0 - params.alpha()) / 4.0;
}

namespace
{
void check_gamma(const ModelParams& params, double gamma)
{
    const double cap = (1.0 - params.alpha()) / 2.0;
    require(gamma > 0.0 && gamma < cap,
            "gamma must satisfy 0 < gamma < (1 - alpha)/2 = " + std::to_string(cap) + ", got " +
                std::to_string(gamma));
}
} // namespace

Barrier Barrier::upper()
{
    return Barrier(Kind::upper, 0.0, {});
}

Barrier Barrier::lowered(const ModelParams& params, double gamma)
{
    check_gamma(params, gamma);
    return Barrier(Kind::lowered, gamma, {});
}

Barrier Barrier::custom(const ModelParams& params, std::vector<double> offsets, bool pinned_endpoints)
{
    require(offsets.size() == static_cast<std::size_t>(params.scales()) + 1,
            "custom barrier needs K + 1 offsets");
    for (double f : offsets) require(std::isfinite(f), "custom barrier offsets must be finite");
    if (pinned_endpoints) {
        require(offsets.front() == 0.0 && offsets.back() == 0.0,
                "custom barrier offsets must vanish at k = 0 and k = K");
    }
    return Barrier(Kind::custom, 0.0, std::move(offsets));
}

double Barrier::value(int k, const ModelParams& params) const
{
    const int scales = params.scales();
    require(k >= 0 && k <= scales, "barrier scale index out of range: " + std::to_string(k));
    const double n = static_cast<double>(params.size());
    // U(k) = (beta * k) * m + ln N
    const double base = beta_c() * static_cast<double>(k) * params.increment_variance() + std::log(n);
    switch (kind_) {
    case Kind::upper:
        return base;
    case Kind::lowered:
        check_gamma(params, gamma_);
        if (k == 0 || k == scales) return base;
        return base - std::pow(n, gamma_);
    case Kind::custom:
        require(offsets_.size() == static_cast<std::size_t>(scales) + 1, "custom barrier built for another K");
        return base + offsets_[static_cast<std::size_t>(k)];
    }
    return base;
}

std::vector<double> Barrier::table(const ModelParams& params) const
{
    std::vector<double> out(static_cast<std::size_t>(params.scales()) + 1);
    for (int k = 0; k <= params.scales(); ++k) out[static_cast<std::size_t>(k)] = value(k, params);
    return out;
}

double barrier_value(const Barrier& barrier, int k, const ModelParams& params)
{
    return barrier.value(k, params);
}

} // namespace hgf
