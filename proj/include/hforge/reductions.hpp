#pragma once

#include "hforge/formula.hpp"
#include "hforge/model.hpp"
#include "hforge/tbn.hpp"

#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace hforge {

enum class PolicyClass { Stationary, TimeDependent, History };

std::string to_string(PolicyClass c);

enum class Bound { Equal, AtMost, AtLeast, Greater, Less };

std::string to_string(Bound b);
bool satisfies_bound(const Rat& value, Bound b, const Rat& reference);

// Declared value dichotomy: the optimal value over `policy_class` relates to
// yes_value on yes-instances and to no_value on no-instances. The values are
// absent when they are too large to materialise; `text` always describes the
// claim.
struct ValueClaim {
    PolicyClass policy_class = PolicyClass::Stationary;
    std::optional<Rat> yes_value;
    Bound yes_bound = Bound::Equal;
    std::optional<Rat> no_value;
    Bound no_bound = Bound::Equal;
    std::string text;

    bool holds_for_yes(const Rat& value) const;
    bool holds_for_no(const Rat& value) const;
};

struct SsatLayout {
    SsatFormula source;
    unsigned error_exponent = 1; // c
    std::size_t copies = 1;      // k
    std::size_t copy_horizon = 0;
    std::vector<StateId> stage3_entries; // first literal state of every block of copy 0
};

struct GadgetOutput {
    std::variant<Pomdp, Tbn> model;
    std::size_t recommended_horizon = 0;
    Metric recommended_metric = FiniteTotal{0};
    ValueClaim claim;
    std::optional<SsatLayout> ssat;

    const Pomdp& pomdp() const;
    const Tbn& tbn() const;
};

// Literal states in clause order, then F, then T. Observations are the
// variables followed by F and T.
GadgetOutput threesat_to_pomdp(const Cnf& f);

GadgetOutput epsilon_gap_gadget(const Cnf& f, const Rat& eps);

// States: s0, (i, j) variable-major, sat_1..sat_n, T, F. One observation.
GadgetOutput threesat_to_uomdp(const Cnf& f);

// m^2 chained copies of the unobservable gadget without their rewards. T of
// copy c is s0 of copy c+1, all error states are one sink F, and the last T
// pays 1 (or beta^-(m^2(n+1))) on any action before moving to F; hence the
// recommended horizon m^2(n+1)+1.
GadgetOutput amplify_uomdp(const Cnf& f, const std::optional<Rat>& discount = std::nullopt);

GadgetOutput ssat_to_pomdp(const SsatFormula& f, unsigned error_exponent = 1);
GadgetOutput ssat_repeat(const GadgetOutput& g, std::size_t k);

// Least c with 2^c > (2 - eps)/(1 - eps), then least k with
// 2n < k((1 - eps)(1 - 2^-c) - 2^-c).
std::pair<unsigned, std::size_t> choose_ssat_constants(const Rat& eps, std::size_t n_vars);

// State 2g + p is gate g with parity p; state 2|G| is the sink.
GadgetOutput cvp_to_mdp(const Circuit& c, std::size_t k_gap);

struct CircuitTbn {
    Tbn tbn;
    std::vector<std::size_t> input_fluents;  // fluent read by each input gate
    std::vector<std::size_t> output_fluents; // fluent holding each output after one step
    std::vector<std::size_t> gate_fluents;   // per gate; inputs map to their input fluent
};

// Fluents io_0..io_{w-1} with w = max(#inputs, #outputs), then one fluent per
// non-input gate. One step reads the inputs from io_* and leaves output i in
// io_i.
CircuitTbn circuit_to_2tbn_layout(const Circuit& c);
Tbn circuit_to_2tbn(const Circuit& c);

struct SuccinctOptions {
    std::size_t k_gap = 1;
    // Replaces the reward exponent 2^(|S|+k+1) by this value.
    std::optional<std::size_t> test_exponent;
};

struct SuccinctFluents {
    std::vector<std::size_t> gate_bits; // i_0.. least significant first
    std::size_t parity = 0;
    std::vector<std::size_t> type_bits; // t_0..t_2
    std::size_t random = 0;
};

// Fluent layout of the 2TBN built by succinct_cvp_to_2tbn.
SuccinctFluents succinct_fluents(std::size_t index_bits);

GadgetOutput succinct_cvp_to_2tbn(const SuccinctCircuitInstance& s, const SuccinctOptions& options = {});

// Describes C as a succinct instance: C's gate g becomes gate g + 1, gate 0
// is the sink, and S(0, 2) names the output gate. S is a sum of products
// over the full adjacency table. C's out-degree must be at most 2.
SuccinctCircuitInstance synthesize_succinct_instance(const Circuit& c);

// Inserts double-negation buffers so that no gate feeds more than two gate
// inputs. Gate indices of the original circuit are preserved.
Circuit normalize_out_degree(const Circuit& c);

// Clause walk with a self-looping T where every action pays 1, for the
// average-reward metric.
GadgetOutput infinite_horizon_sat_gadget(const Cnf& f);

} // namespace hforge
