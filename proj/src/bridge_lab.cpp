#include "hgf/bridge_lab.hpp"

#include "hgf/error.hpp"
#include "hgf/normal.hpp"
#include "hgf/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace hgf
{

using detail::require;

Rational ballot_exact(std::int64_t n)
{
    require(n >= 1, "ballot_exact needs n >= 1");
    return {1, n};
}

BridgePath::BridgePath(std::vector<double> increments) : increments_(std::move(increments))
{
    const std::size_t n = increments_.size();
    require(n >= 2, "a bridge needs at least two increments");
    for (double d : increments_) require(std::isfinite(d), "bridge increments must be finite");

    std::vector<double> prefix(n + 1, 0.0);
    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = increments_[i];
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
        prefix[i + 1] = sum + comp;
    }
    const double total = prefix[n];
    values_.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        values_[j] = prefix[j] - total * (static_cast<double>(j) / static_cast<double>(n));
    }
}

double BridgePath::interior_max() const noexcept
{
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j + 1 < values_.size(); ++j) m = std::max(m, values_[j]);
    return m;
}

BridgePath BridgePath::rotated(std::size_t r) const
{
    const std::size_t n = increments_.size();
    std::vector<double> inc(n);
    for (std::size_t i = 0; i < n; ++i) inc[i] = increments_[(r + i) % n];
    return BridgePath(std::move(inc));
}

RotationCensus rotation_census(std::span<const double> increments)
{
    const BridgePath bridge(std::vector<double>(increments.begin(), increments.end()));
    const std::size_t n = bridge.length();
    const auto& b = bridge.values();

    RotationCensus census;
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        scale = std::max(scale, std::abs(b[j]));
        if (b[j] > b[census.argmax]) census.argmax = j;
    }
    const double tol = 1e-12 * (1.0 + scale);
    for (std::size_t j = 0; j < n; ++j) {
        if (j != census.argmax && b[census.argmax] - b[j] <= tol) {
            throw TieError("bridge maximum attained at positions " + std::to_string(census.argmax) + " and " +
                           std::to_string(j));
        }
    }

    for (std::size_t r = 0; r < n; ++r) {
        const BridgePath rot = bridge.rotated(r);
        bool below = true;
        for (std::size_t j = 1; j < n && below; ++j) below = rot(j) <= 0.0;
        if (below) census.qualifying.push_back(r);
    }
    return census;
}

std::size_t rotation_oracle(std::span<const double> increments)
{
    const auto census = rotation_census(increments);
    if (census.qualifying.size() != 1) {
        throw std::logic_error("expected exactly one qualifying rotation, found " +
                               std::to_string(census.qualifying.size()));
    }
    return census.qualifying.front();
}

namespace
{

/// Runs `body(chunk_index, chunk_reps)` over all chunks, spread over threads.
template <class Body>
void for_each_chunk(std::uint64_t reps, unsigned threads, Body&& body)
{
    const std::uint64_t chunks = (reps + bridge_chunk - 1) / bridge_chunk;
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            const std::uint64_t count = std::min(bridge_chunk, reps - c * bridge_chunk);
            body(c, count);
        }
    };
    const unsigned workers = static_cast<unsigned>(std::clamp<std::uint64_t>(threads == 0 ? 1 : threads, 1, chunks));
    if (workers == 1) {
        worker();
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
}

std::uint64_t stream_id(std::size_t n, std::uint64_t chunk)
{
    return (static_cast<std::uint64_t>(n) << 40) ^ chunk;
}

/// Interior maxima of `count` bridges of length n from one chunk stream.
/// Replicate i reads stream positions i*n .. i*n + n - 1.
void chunk_maxima(std::size_t n, std::uint64_t seed, std::uint64_t chunk, std::uint64_t count, std::size_t rotation,
                  std::vector<double>& out)
{
    const CounterRng rng(seed, stream_id(n, chunk));
    std::vector<double> inc(n);
    out.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t base = i * n;
        for (std::size_t k = 0; k < n; ++k) inc[(k + n - rotation % n) % n] = rng.gaussian(base + k);
        double total = 0.0;
        for (double d : inc) total += d;
        double prefix = 0.0;
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j < n; ++j) {
            prefix += inc[j - 1];
            m = std::max(m, prefix - total * (static_cast<double>(j) / static_cast<double>(n)));
        }
        out[i] = m;
    }
}

/// Number of bridges whose interior maximum is <= each threshold.
std::vector<std::uint64_t> count_below(std::size_t n, std::span<const double> thresholds, std::uint64_t reps,
                                       std::uint64_t seed, unsigned threads)
{
    const std::uint64_t chunks = (reps + bridge_chunk - 1) / bridge_chunk;
    std::vector<std::vector<std::uint64_t>> per_chunk(chunks, std::vector<std::uint64_t>(thresholds.size(), 0));
    for_each_chunk(reps, threads, [&](std::uint64_t c, std::uint64_t count) {
        std::vector<double> maxima;
        chunk_maxima(n, seed, c, count, 0, maxima);
        auto& hits = per_chunk[c];
        for (double m : maxima) {
            for (std::size_t t = 0; t < thresholds.size(); ++t) {
                if (m <= thresholds[t]) ++hits[t];
            }
        }
    });
    std::vector<std::uint64_t> total(thresholds.size(), 0);
    for (const auto& hits : per_chunk) {
        for (std::size_t t = 0; t < hits.size(); ++t) total[t] += hits[t];
    }
    return total;
}

} // namespace

Estimate bridge_below_mc(std::size_t n, double eps, std::uint64_t reps, std::uint64_t seed, unsigned threads)
{
    require(n >= 2, "bridge_below_mc needs n >= 2");
    require(reps >= 1, "bridge_below_mc needs reps >= 1");
    require(!std::isnan(eps), "eps must not be NaN");
    const double thresholds[] = {eps};
    const auto hits = count_below(n, thresholds, reps, seed, threads);
    return binomial_estimate(hits[0], reps);
}

std::vector<double> bridge_maxima(std::size_t n, std::uint64_t reps, std::uint64_t seed, std::size_t rotation,
                                  unsigned threads)
{
    require(n >= 2, "bridge_maxima needs n >= 2");
    require(reps >= 1, "bridge_maxima needs reps >= 1");
    const std::uint64_t chunks = (reps + bridge_chunk - 1) / bridge_chunk;
    std::vector<std::vector<double>> per_chunk(chunks);
    for_each_chunk(reps, threads, [&](std::uint64_t c, std::uint64_t count) {
        chunk_maxima(n, seed, c, count, rotation, per_chunk[c]);
    });
    std::vector<double> out;
    out.reserve(reps);
    for (const auto& v : per_chunk) out.insert(out.end(), v.begin(), v.end());
    return out;
}

PerturbationReport perturbation_check(std::span<const std::size_t> n_grid, double eps, std::uint64_t reps,
                                      std::uint64_t seed, double cap, unsigned threads)
{
    require(eps != 0.0, "perturbation_check needs eps != 0 (the bound is vacuous otherwise)");
    require(std::abs(eps) <= 1.0, "perturbation_check needs |eps| <= 1");
    require(reps >= 1, "perturbation_check needs reps >= 1");
    require(!n_grid.empty(), "perturbation_check needs a nonempty grid");
    for (auto n : n_grid) require(n >= 2, "perturbation_check needs n >= 2 on the grid");

    PerturbationReport report;
    report.eps = eps;
    report.cap = cap;
    const double thresholds[] = {0.0, eps};
    for (std::size_t n : n_grid) {
        const auto hits = count_below(n, thresholds, reps, seed, threads);
        PerturbationPoint pt;
        pt.n = n;
        pt.below_zero = binomial_estimate(hits[0], reps);
        pt.below_eps = binomial_estimate(hits[1], reps);
        // The events are nested, so the band count is the difference.
        const std::uint64_t band = hits[0] > hits[1] ? hits[0] - hits[1] : hits[1] - hits[0];
        pt.difference = binomial_estimate(band, reps);
        const double factor = static_cast<double>(n) / std::abs(eps);
        pt.scaled = {pt.difference.value * factor, pt.difference.std_error * factor};
        pt.degenerate = reps == 1;
        if (pt.scaled.value > cap) report.violations.push_back(n);
        report.points.push_back(pt);
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::vector<double> ns;
    std::vector<double> scaled;
    for (const auto& pt : report.points) {
        lo = std::min(lo, pt.scaled.value);
        hi = std::max(hi, pt.scaled.value);
        ns.push_back(static_cast<double>(pt.n));
        scaled.push_back(pt.scaled.value);
    }
    report.c_fit = hi;
    report.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (ns.size() >= 2 && ns.size() <= 10) {
        report.trend_rho = spearman_rho(ns, scaled);
        report.trend_pvalue = spearman_increasing_pvalue(ns, scaled);
    }
    return report;
}

} // namespace hgf
