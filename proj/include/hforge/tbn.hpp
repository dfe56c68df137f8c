#pragma once

#include "hforge/formula.hpp"
#include "hforge/model.hpp"
#include "hforge/rational.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace hforge {

// One assignment to all fluents; entry k is fluent k.
using FluentState = std::vector<bool>;

// Parent of a next-slice fluent: either the fluent's value in the current
// slice (asynchronous edge v_i -> v'_k) or in the next slice (synchronous
// edge v'_i -> v'_k).
struct Parent {
    std::size_t fluent;
    bool synchronous;

    friend bool operator==(const Parent&, const Parent&) = default;
};

// Conditional probability table for one next-slice fluent. prob_one has
// 2^parents.size() rows; the first parent is the most significant bit of
// the row index.
struct FluentCpt {
    std::vector<Parent> parents;
    std::vector<Rat> prob_one;

    friend bool operator==(const FluentCpt&, const FluentCpt&) = default;
};

struct TbnAction {
    std::vector<FluentCpt> fluents;

    friend bool operator==(const TbnAction&, const TbnAction&) = default;
};

// Sparse reward table over expanded states; missing entries are 0.
struct ExplicitReward {
    std::map<std::pair<FluentState, ActionId>, Rat> entries;

    friend bool operator==(const ExplicitReward&, const ExplicitReward&) = default;
};

// Reward given bitwise by a circuit. The circuit's inputs are, in order:
// the state bits (fluent order), the action bits and the bit-index bits
// (both least significant first). It has one output, bit `index` of the
// reward. Bits at or beyond `width` are 0 regardless of the circuit.
struct SuccinctReward {
    Circuit circuit;
    std::size_t state_bits = 0;
    std::size_t action_bits = 0;
    std::size_t index_bits = 0;
    BigInt width;

    bool bit(const FluentState& state, ActionId action, const BigInt& index) const;
    // Assembles the full reward; throws CapExceeded if width > max_bits.
    Rat materialize(const FluentState& state, ActionId action, std::uint64_t max_bits) const;

    friend bool operator==(const SuccinctReward&, const SuccinctReward&) = default;
};

void validate_succinct_reward(const SuccinctReward& r);

// Two-phase temporal Bayes net over binary fluents.
struct Tbn {
    std::vector<std::string> fluents;
    std::vector<TbnAction> actions;
    FluentState initial;
    std::variant<ExplicitReward, SuccinctReward> reward;

    std::size_t n_fluents() const { return fluents.size(); }
    Rat reward_of(const FluentState& state, ActionId action, std::uint64_t max_bits) const;

    friend bool operator==(const Tbn&, const Tbn&) = default;
};

// Shape checks, CPT ranges and acyclicity of synchronous edges; throws
// DomainError.
void validate_tbn(const Tbn& t);
// Fluent evaluation order for one action (synchronous parents first).
std::vector<std::size_t> synchronous_order(const Tbn& t, ActionId a);

std::uint64_t encode_state(const FluentState& s);
FluentState decode_state(std::uint64_t index, std::size_t n_fluents);

// Gate-type codes of the succinct circuit value encoding. Code 0 is the
// fictitious sink gate.
enum class GateCode : unsigned { Sink = 0, And = 1, Or = 2, Not = 3, Input0 = 4, Input1 = 5 };
inline constexpr std::size_t kGateCodeBits = 3;
inline constexpr std::size_t kNeighborBits = 2;

// Succinct circuit value instance: circuit S maps (gate index i, neighbor
// selector k) to (neighbor gate j, type code of j). Inputs: i (index_bits,
// LSB first) then k (2 bits). Outputs: j (index_bits, LSB first) then the
// type code (3 bits, LSB first). Selectors 0/1 are predecessors, 2/3 are
// successors; missing neighbors are gate 0.
struct SuccinctCircuitInstance {
    Circuit circuit;
    std::size_t index_bits = 0;

    friend bool operator==(const SuccinctCircuitInstance&, const SuccinctCircuitInstance&) = default;
};

void validate_succinct_instance(const SuccinctCircuitInstance& s);

struct NeighborQuery {
    std::uint64_t gate;
    GateCode type;
};
NeighborQuery query_neighbor(const SuccinctCircuitInstance& s, std::uint64_t gate, unsigned selector);

} // namespace hforge
