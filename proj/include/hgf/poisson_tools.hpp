#pragma once

#include <cstdint>

#include "hgf/field_model.hpp"

namespace hgf
{

/// Inputs of the Chen-Stein bound for the E-filtered count in a window.
struct ChenSteinInput
{
    double log2_configs = 0.0; ///< log2 of the number of configurations (= N)
    double mu_N = 0.0;         ///< mean of the modified process in the window
    double pair_term = 0.0;    ///< sum over ordered pairs with interior overlap of E[I_s I_t]
    double pair_term_se = 0.0;
};

/// 2^{-N} mu_N^2 + 2^{-m} mu_N^2 + pair_term.
double chen_stein_bound(const ChenSteinInput& input, const ModelParams& params);

/// Standard error of chen_stein_bound, propagated linearly from the standard
/// errors of mu_N (given) and of the pair term (in `input`).
double chen_stein_bound_se(const ChenSteinInput& input, const ModelParams& params, double mu_N_se);

/// Poisson probability mass via log-gamma.
double poisson_pmf(std::uint64_t k, double lambda);

/// Total-variation distance between Poisson(lambda1) and Poisson(lambda2).
/// The sum runs until both remaining tails are below 1e-14.
double tv_poisson(double lambda1, double lambda2);

/// cs_bound + tv_poisson(mu_N, mu_limit): total budget for
/// |P(count = 0) - exp(-mu_limit)|.
double avoidance_gap_budget(double mu_N, double mu_limit, double cs_bound);

} // namespace hgf
