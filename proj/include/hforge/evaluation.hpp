#pragma once

#include "hforge/model.hpp"

#include <functional>
#include <span>
#include <vector>

namespace hforge {

// Probability mass per state. Entries are non-negative and sum to at most 1:
// mass on a (state, action) with an all-zero row disappears.
using StateDistribution = std::vector<Rat>;

// Throws DomainError if the policy does not fit the model's observation and
// action sets, or (for step-indexed policies) is shorter than `horizon`.
void check_policy_domain(const Pomdp& m, const Policy& policy, std::size_t horizon);

// Expected (optionally discounted) reward over steps 0..h-1 by forward
// propagation of state distributions. History policies are propagated as a
// tree of distributions, one per realised observation string.
Rat finite_horizon_performance(const Pomdp& m, const Policy& policy, const Metric& metric);

// Solves V = R + beta P V over the states reachable under the policy.
Rat discounted_performance_stationary(const Pomdp& m, const StationaryPolicy& policy, const Rat& beta);

// Long-run average reward: recurrent classes of the induced chain, their
// stationary distributions and the absorption probabilities into them.
Rat average_performance_stationary(const Pomdp& m, const StationaryPolicy& policy);

// Dispatches on the metric. Infinite-horizon metrics accept stationary and
// finite-memory policies only.
Rat performance(const Pomdp& m, const Policy& policy, const Metric& metric);

struct ProductModel {
    Pomdp model;             // states s * |M| + q, observations o * |M| + q
    StationaryPolicy policy; // the transducer read as a stationary policy
};

ProductModel finite_memory_cross_product(const Pomdp& m, const FiniteMemoryPolicy& policy);

// Marginal distribution over states of m after `step` steps.
StateDistribution state_distribution_at(const Pomdp& m, const Policy& policy, std::size_t step);

using HistoryChooser = std::function<ActionId(std::span<const ObsId>)>;

// Materialises a history policy on every observation string of length
// 1..horizon realisable under the chooser itself.
HistoryPolicy history_policy_from(const Pomdp& m, std::size_t horizon, const HistoryChooser& choose);

} // namespace hforge
