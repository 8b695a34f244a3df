#include "hgf/tree_sampler.hpp"

#include "hgf/error.hpp"
#include "hgf/normal.hpp"
#include "hgf/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <queue>
#include <string>
#include <thread>

namespace hgf
{

namespace
{

constexpr std::uint64_t grid_size = std::uint64_t{1} << 52;

void check_budget(const ModelParams& params, const SamplerOptions& options)
{
    const int n = params.log2_leaves();
    if (n > 62 || (std::uint64_t{1} << n) > options.leaf_budget) {
        throw BudgetError("tree with 2^" + std::to_string(n) + " leaves exceeds the leaf budget of " +
                          std::to_string(options.leaf_budget));
    }
}

/// Smallest grid index whose uniform could map to a standard normal >= z.
/// Deliberately low by a few grid cells and by a relative 1e-9 in z; every
/// candidate at or above it is re-checked after exact inversion.
std::uint64_t grid_threshold(double z)
{
    if (std::isnan(z)) return 0;
    const double zz = z - 1e-9 * std::max(1.0, std::abs(z));
    const double p = normal_cdf(zz);
    const double idx = std::floor(p * static_cast<double>(grid_size) - 0.5) - 4.0;
    if (!(idx > 0.0)) return 0;
    if (idx >= static_cast<double>(grid_size)) return grid_size;
    return static_cast<std::uint64_t>(idx);
}

/// Pre-order subtree sizes s_d for d = 1..K (index 0 unused).
std::vector<std::uint64_t> subtree_sizes(const ModelParams& params)
{
    const int k = params.scales();
    const std::uint64_t b = params.branching();
    std::vector<std::uint64_t> sizes(static_cast<std::size_t>(k) + 1, 0);
    std::uint64_t s = 1;
    sizes[static_cast<std::size_t>(k)] = s;
    for (int d = k - 1; d >= 1; --d) {
        s = s * b + 1;
        sizes[static_cast<std::size_t>(d)] = s;
    }
    return sizes;
}

/// A parent of leaves (a node at depth K-1, or the root when K = 1).
struct LeafParent
{
    double prefix_sum;
    bool below_upper;
    bool below_lowered;
    std::uint64_t first_leaf; ///< stream position of the first child leaf
    const std::vector<std::uint64_t>& child_index; ///< zero-based labels at depths 1..K-1
};

/// Iterative depth-first walk over internal nodes. `visit` is called once per
/// leaf parent, in pre-order. Returns the number of internal-node draws.
template <class Visit>
std::uint64_t walk_internal(const ModelParams& params, const CounterRng& rng, const std::vector<double>& upper,
                            const std::vector<double>& lowered, bool& any_above_upper, Visit&& visit)
{
    const int depth = params.scales();
    const std::uint64_t b = params.branching();
    const double sd = std::sqrt(params.increment_variance());
    const auto sizes = subtree_sizes(params);

    const auto slots = static_cast<std::size_t>(depth);
    std::vector<double> sums(slots, 0.0);
    std::vector<char> ok_upper(slots, 1);
    std::vector<char> ok_lowered(slots, 1);
    std::vector<std::uint64_t> first_child(slots, 0);
    std::vector<std::uint64_t> child(slots, 0);

    if (depth == 1) {
        visit(LeafParent{0.0, true, true, 0, child});
        return 0;
    }

    std::uint64_t draws = 0;
    int d = 1;
    child[1] = 0;
    for (;;) {
        const auto du = static_cast<std::size_t>(d);
        const std::uint64_t rank = first_child[du - 1] + child[du] * sizes[du];
        const double s = sums[du - 1] + sd * rng.gaussian(rank);
        ++draws;
        sums[du] = s;
        ok_upper[du] = ok_upper[du - 1] && s <= upper[du];
        ok_lowered[du] = ok_lowered[du - 1] && s <= lowered[du];
        if (s > upper[du]) any_above_upper = true;
        first_child[du] = rank + 1;

        if (d < depth - 1) {
            ++d;
            child[static_cast<std::size_t>(d)] = 0;
            continue;
        }
        visit(LeafParent{s, ok_upper[du] != 0, ok_lowered[du] != 0, rank + 1, child});

        while (d >= 1 && ++child[static_cast<std::size_t>(d)] == b) --d;
        if (d == 0) break;
    }
    return draws;
}

/// Scans the b leaf words of one parent. Calls `candidate(position, word)`
/// for every leaf whose grid index is >= threshold and returns the word with
/// the largest grid index (first one in case of equality) and its position.
template <class Candidate>
std::pair<std::uint64_t, std::uint64_t> scan_leaves(const CounterRng& rng, std::uint64_t first, std::uint64_t count,
                                                    std::uint64_t threshold, Candidate&& candidate)
{
    const std::uint64_t end = first + count;
    std::uint64_t best_word = 0;
    std::uint64_t best_pos = first;
    bool have_best = false;
    for (std::uint64_t q = first >> 1; 2 * q < end; ++q) {
        const auto words = rng.block(q);
        for (std::uint64_t lane = 0; lane < 2; ++lane) {
            const std::uint64_t pos = 2 * q + lane;
            if (pos < first || pos >= end) continue;
            const std::uint64_t word = words[lane];
            const std::uint64_t idx = CounterRng::grid_index(word);
            if (!have_best || idx > CounterRng::grid_index(best_word)) {
                best_word = word;
                best_pos = pos;
                have_best = true;
            }
            if (idx >= threshold) candidate(pos, word);
        }
    }
    return {best_word, best_pos};
}

Labels leaf_labels(const LeafParent& parent, int depth, std::uint64_t leaf_offset)
{
    Labels labels(static_cast<std::size_t>(depth));
    for (int d = 1; d < depth; ++d) {
        labels[static_cast<std::size_t>(d - 1)] =
            static_cast<std::uint32_t>(parent.child_index[static_cast<std::size_t>(d)] + 1);
    }
    labels[static_cast<std::size_t>(depth - 1)] = static_cast<std::uint32_t>(leaf_offset + 1);
    return labels;
}

} // namespace

std::uint64_t node_rank(std::span<const std::uint32_t> prefix, const ModelParams& params)
{
    detail::require(!prefix.empty() && prefix.size() <= static_cast<std::size_t>(params.scales()),
                    "node_rank needs a prefix of length 1..K");
    const auto sizes = subtree_sizes(params);
    std::uint64_t rank = prefix.size() - 1;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        detail::require(prefix[i] >= 1 && prefix[i] <= params.branching(), "labels must lie in 1..b");
        rank += (prefix[i] - 1) * sizes[i + 1];
    }
    return rank;
}

PathState trace_path(const ModelParams& params, std::span<const std::uint32_t> labels, const SeedSpec& seed)
{
    detail::require(labels.size() == static_cast<std::size_t>(params.scales()), "labels must have length K");
    const CounterRng rng(seed.master_seed, seed.replicate_index);
    const double sd = std::sqrt(params.increment_variance());
    PathState path;
    path.labels.assign(labels.begin(), labels.end());
    path.prefix_sums.assign(labels.size() + 1, 0.0);
    for (std::size_t k = 1; k <= labels.size(); ++k) {
        const std::uint64_t rank = node_rank(labels.first(k), params);
        path.prefix_sums[k] = path.prefix_sums[k - 1] + sd * rng.gaussian(rank);
    }
    return path;
}

PointProcessSample sample_window(const ModelParams& params, const Interval& window, const Barrier& lowered,
                                 const SeedSpec& seed, const SamplerOptions& options)
{
    check_budget(params, options);
    const int depth = params.scales();
    const auto upper = Barrier::upper().table(params);
    const auto low = lowered.table(params);
    const double level = centering(params);
    const double sd = std::sqrt(params.increment_variance());
    const std::uint64_t b = params.branching();
    const CounterRng rng(seed.master_seed, seed.replicate_index);
    const double top_upper = upper.back();
    const double top_lowered = low.back();

    PointProcessSample out{{}, window, params, seed, -std::numeric_limits<double>::infinity(), false, 0};
    std::vector<std::uint64_t> hits;

    auto on_parent = [&](const LeafParent& parent) {
        // Leaf energy = S_{K-1} + sd * z; recentered >= lower  <=>  z >= t.
        const double t = (level + window.lower - parent.prefix_sum) / sd;
        hits.clear();
        const auto [best_word, best_pos] = scan_leaves(rng, parent.first_leaf, b, grid_threshold(t),
                                                       [&](std::uint64_t pos, std::uint64_t) { hits.push_back(pos); });
        (void)best_pos;
        out.gaussian_draws += b;

        const double top = parent.prefix_sum + sd * normal_quantile(CounterRng::to_uniform(best_word));
        if (top > out.max_energy) out.max_energy = top;
        if (top > top_upper) out.any_path_above_U = true;

        for (std::uint64_t pos : hits) {
            const double energy = parent.prefix_sum + sd * rng.gaussian(pos);
            const double recentered = energy - level;
            if (!window.contains(recentered)) continue;
            out.points.push_back(ExtremalPoint{recentered, leaf_labels(parent, depth, pos - parent.first_leaf),
                                               parent.below_upper && energy <= top_upper,
                                               parent.below_lowered && energy <= top_lowered});
        }
    };

    bool above = false;
    out.gaussian_draws += walk_internal(params, rng, upper, low, above, on_parent);
    out.any_path_above_U = out.any_path_above_U || above;
    return out;
}

std::vector<LeafEnergy> sample_topk(const ModelParams& params, std::uint64_t k, const SeedSpec& seed,
                                    const SamplerOptions& options)
{
    check_budget(params, options);
    const std::uint64_t leaves = std::uint64_t{1} << params.log2_leaves();
    detail::require(k >= 1 && k <= leaves, "k must lie in 1..b^K");

    const int depth = params.scales();
    const double sd = std::sqrt(params.increment_variance());
    const std::uint64_t b = params.branching();
    const CounterRng rng(seed.master_seed, seed.replicate_index);
    const auto upper = Barrier::upper().table(params);

    auto lighter = [](const LeafEnergy& x, const LeafEnergy& y) { return x.energy > y.energy; };
    std::priority_queue<LeafEnergy, std::vector<LeafEnergy>, decltype(lighter)> heap(lighter);

    auto on_parent = [&](const LeafParent& parent) {
        std::uint64_t threshold = 0;
        if (heap.size() == k) threshold = grid_threshold((heap.top().energy - parent.prefix_sum) / sd);
        scan_leaves(rng, parent.first_leaf, b, threshold, [&](std::uint64_t pos, std::uint64_t word) {
            const double energy = parent.prefix_sum + sd * normal_quantile(CounterRng::to_uniform(word));
            if (heap.size() < k) {
                heap.push(LeafEnergy{energy, leaf_labels(parent, depth, pos - parent.first_leaf)});
            } else if (energy > heap.top().energy) {
                heap.pop();
                heap.push(LeafEnergy{energy, leaf_labels(parent, depth, pos - parent.first_leaf)});
            }
        });
    };

    bool unused = false;
    walk_internal(params, rng, upper, upper, unused, on_parent);

    std::vector<LeafEnergy> out;
    out.reserve(heap.size());
    while (!heap.empty()) {
        out.push_back(heap.top());
        heap.pop();
    }
    std::sort(out.begin(), out.end(), [](const LeafEnergy& x, const LeafEnergy& y) {
        if (x.energy != y.energy) return x.energy > y.energy;
        return x.labels < y.labels;
    });
    return out;
}

std::vector<PointProcessSample> replicate_batch(const ModelParams& params, const Interval& window,
                                                const Barrier& lowered, std::uint64_t reps,
                                                std::uint64_t master_seed, unsigned threads,
                                                const SamplerOptions& options)
{
    detail::require(reps >= 1, "reps must be >= 1");
    check_budget(params, options);
    // Validates the barrier against params before any worker starts.
    (void)lowered.table(params);

    std::vector<std::optional<PointProcessSample>> slots(reps);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= reps) return;
            try {
                slots[i] = sample_window(params, window, lowered, SeedSpec{master_seed, i}, options);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(reps);
                return;
            }
        }
    };

    const unsigned workers = static_cast<unsigned>(std::clamp<std::uint64_t>(threads == 0 ? 1 : threads, 1, reps));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<PointProcessSample> out;
    out.reserve(reps);
    for (auto& slot : slots) out.push_back(std::move(*slot));
    return out;
}

} // namespace hgf
