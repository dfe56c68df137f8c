#pragma once

#include "hforge/caps.hpp"
#include "hforge/formula.hpp"
#include "hforge/model.hpp"
#include "hforge/tbn.hpp"

#include <cstdint>
#include <vector>

namespace hforge {

// Exact optimum of an enumeration together with the lexicographically
// smallest optimal witness.
template <class P>
struct Optimum {
    Rat value;
    P witness;
    BigInt policy_space;     // size of the full policy class searched
    std::uint64_t evaluated; // policies (or search nodes) actually evaluated
};

// Maximises over all n_actions^n_obs stationary policies. Observations at
// which every action behaves identically on all reachable states are pinned
// to action 0; this never changes the optimum or the lexicographically
// smallest witness, it only avoids re-evaluating equivalent policies.
Optimum<StationaryPolicy> brute_force_stationary_value(const Pomdp& m, const Metric& metric, const Caps& caps = {});

// Maximises over time-dependent policies for a finite metric. Searches the
// per-step action tables depth first, sharing work between policies whose
// prefixes reach the same state distribution. The witness is the
// lexicographically smallest optimal table, ordered step-major.
Optimum<TimeDependentPolicy> brute_force_time_dependent_value(const Pomdp& m, const Metric& metric,
                                                              const Caps& caps = {});
Optimum<TimeDependentPolicy> brute_force_time_dependent_value(const Pomdp& m, std::size_t horizon,
                                                              const Caps& caps = {});

// Optimal history-dependent value for a finite metric by backward induction
// over the observation-history tree.
Rat exact_history_value(const Pomdp& m, const Metric& metric, const Caps& caps = {});

struct SatResult {
    bool satisfiable = false;
    std::vector<bool> best_assignment;
    std::size_t max_satisfied = 0;
};

// Exhaustive sweep of all 2^n assignments. best_assignment is the first
// assignment reaching the maximum, counting with variable 0 as the most
// significant bit.
SatResult sat_enumerate(const Cnf& f, const Caps& caps = {});

// Game-tree value: max at existential, mean at random quantifiers.
Rat ssat_value(const SsatFormula& f, const Caps& caps = {});

std::vector<bool> circuit_eval(const Circuit& c);
// Evaluates with the CONST gates (declaration order) replaced by `inputs`.
std::vector<bool> circuit_eval(const Circuit& c, const std::vector<bool>& inputs);

// Flat, fully observable expansion over all 2^n fluent assignments. State
// index k encodes fluent i in bit i; the initial state is t.initial.
Pomdp expand_2tbn(const Tbn& t, const Caps& caps = {});

struct ReachableExpansion {
    Pomdp model;
    std::vector<FluentState> states; // state index -> fluent assignment
};

// Expansion restricted to assignments reachable from t.initial.
ReachableExpansion expand_2tbn_reachable(const Tbn& t, const Caps& caps = {});

// Distribution over next-slice assignments for one (state, action).
std::vector<std::pair<FluentState, Rat>> tbn_successors(const Tbn& t, const FluentState& state, ActionId a);

struct SuccinctMdpWidths {
    std::size_t state_bits = 1;
    std::size_t action_bits = 1;
    // A probability is the integer spelled by its bits (LSB first) divided by
    // 2^fraction_bits; bits 0..fraction_bits are read, so 1 is representable.
    std::size_t fraction_bits = 1;
};

// Circuit ct has inputs (s, a, s', bit index), each LSB first, and one
// output; the bit index has bit_width(fraction_bits) bits. Rows that do not
// sum to exactly 0 or 1 raise DomainError.
Pomdp expand_succinct_mdp(const Circuit& ct, const SuccinctReward& cr, const SuccinctMdpWidths& widths,
                          const Caps& caps = {});

std::size_t bits_for(std::uint64_t n_values);

} // namespace hforge
