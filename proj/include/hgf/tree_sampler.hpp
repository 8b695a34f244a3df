#pragma once

// Depth-first streaming sampler for the hierarchical field. Leaves are never
// materialized; only points falling in the requested window are kept.
//
// Node increments come from CounterRng(master_seed, replicate_index) at the
// node's pre-order rank among non-root nodes (first child of the root has
// rank 0). A node at depth d with zero-based child index c under a parent of
// rank r has rank r + 1 + c * s_d, where s_d = sum_{i=0..K-d} b^i is the size
// of its subtree; the root counts as rank -1. The increment is sqrt(m) times
// the standard normal quantile of the stream word, and S_d = S_{d-1} + inc.

#include <cstdint>
#include <vector>

#include "hgf/field_model.hpp"

namespace hgf
{

struct SeedSpec
{
    std::uint64_t master_seed = 0;
    std::uint64_t replicate_index = 0;

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

struct SamplerOptions
{
    /// Trees with more leaves than this are refused.
    std::uint64_t leaf_budget = std::uint64_t{1} << 28;
};

struct PathState
{
    std::vector<double> prefix_sums; ///< S_0..S_K, S_0 = 0
    Labels labels;                   ///< sigma_1..sigma_K
};

struct ExtremalPoint
{
    double recentered = 0.0; ///< X_sigma - a_N
    Labels labels;
    bool below_U = false; ///< S_k <= U(k) for k = 1..K
    bool below_E = false; ///< S_k <= E(k) for k = 1..K

    friend bool operator==(const ExtremalPoint&, const ExtremalPoint&) = default;
};

struct PointProcessSample
{
    std::vector<ExtremalPoint> points; ///< in depth-first order
    Interval window;
    ModelParams params;
    SeedSpec seed;
    double max_energy = 0.0;        ///< global maximum of X_sigma
    bool any_path_above_U = false;  ///< some S_k > U(k) anywhere in the tree
    std::uint64_t gaussian_draws = 0;

    friend bool operator==(const PointProcessSample&, const PointProcessSample&) = default;
};

struct LeafEnergy
{
    double energy = 0.0;
    Labels labels;

    friend bool operator==(const LeafEnergy&, const LeafEnergy&) = default;
};

/// Pre-order rank of the node with the given (1-based) label prefix.
std::uint64_t node_rank(std::span<const std::uint32_t> prefix, const ModelParams& params);

/// Recomputes the full path of one configuration straight from the stream.
PathState trace_path(const ModelParams& params, std::span<const std::uint32_t> labels, const SeedSpec& seed);

/**
 * All leaves whose recentered energy lies in `window`, flagged against U and
 * against `lowered` (normally the E barrier), plus the global maximum and the
 * whole-tree U-violation flag.
 *
 * Throws BudgetError when b^K exceeds the leaf budget.
 */
PointProcessSample sample_window(const ModelParams& params, const Interval& window, const Barrier& lowered,
                                 const SeedSpec& seed, const SamplerOptions& options = {});

/// The k largest leaf energies of the same realization, sorted descending.
std::vector<LeafEnergy> sample_topk(const ModelParams& params, std::uint64_t k, const SeedSpec& seed,
                                    const SamplerOptions& options = {});

/**
 * `reps` independent replicates; replicate i uses SeedSpec{master_seed, i}.
 * The result is ordered by replicate index and identical for any `threads`.
 */
std::vector<PointProcessSample> replicate_batch(const ModelParams& params, const Interval& window,
                                                const Barrier& lowered, std::uint64_t reps,
                                                std::uint64_t master_seed, unsigned threads,
                                                const SamplerOptions& options = {});

} // namespace hgf
