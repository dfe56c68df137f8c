#pragma once

#include "hforge/errors.hpp"
#include "hforge/rational.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hforge {

using StateId = std::size_t;
using ActionId = std::size_t;
using ObsId = std::size_t;

struct Transition {
    StateId target;
    Rat prob;

    friend bool operator==(const Transition&, const Transition&) = default;
};

// Flat POMDP with deterministic observations. Transition rows are stored
// sparsely (no zero entries, sorted by target). Rows may sum to 0: such a
// (state, action) pair absorbs probability mass.
class Pomdp {
public:
    Pomdp() = default;
    Pomdp(std::size_t n_states, std::size_t n_actions, std::size_t n_obs, StateId initial = 0);

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }
    std::size_t n_obs() const { return n_obs_; }
    StateId initial() const { return initial_; }

    ObsId obs(StateId s) const { return obs_[s]; }
    std::span<const Transition> row(StateId s, ActionId a) const { return rows_[index(s, a)]; }
    Rat prob(StateId s, ActionId a, StateId to) const;
    const Rat& reward(StateId s, ActionId a) const { return rewards_[index(s, a)]; }

    void set_initial(StateId s);
    void set_obs(StateId s, ObsId o);
    // Overwrites t(s, a, to); a zero probability removes the entry.
    void set_transition(StateId s, ActionId a, StateId to, const Rat& p);
    // Adds p to t(s, a, to).
    void add_transition(StateId s, ActionId a, StateId to, const Rat& p);
    void set_reward(StateId s, ActionId a, const Rat& r);

    // Optional human-readable names; empty vectors mean "unnamed".
    std::vector<std::string> state_labels;
    std::vector<std::string> action_labels;
    std::vector<std::string> obs_labels;

    std::string state_name(StateId s) const;
    std::string obs_name(ObsId o) const;

    // Structural equality; labels are ignored.
    friend bool operator==(const Pomdp& a, const Pomdp& b);

private:
    std::size_t index(StateId s, ActionId a) const { return s * n_actions_ + a; }
    void check_state(StateId s) const;
    void check_action(ActionId a) const;

    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::size_t n_obs_ = 0;
    StateId initial_ = 0;
    std::vector<ObsId> obs_;
    std::vector<std::vector<Transition>> rows_;
    std::vector<Rat> rewards_;
};

struct Violation {
    enum class Kind { RowSum, ProbabilityRange, InitialState, Observation, Empty };
    Kind kind;
    std::string message;
};

std::vector<Violation> validate_pomdp(const Pomdp& m);

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

enum class ObservabilityClass { FullyObservable, Unobservable, General };

ObservabilityClass classify_observability(const Pomdp& m);
std::string to_string(ObservabilityClass c);

// Policies ------------------------------------------------------------------

struct StationaryPolicy {
    std::vector<ActionId> act; // indexed by observation

    friend bool operator==(const StationaryPolicy&, const StationaryPolicy&) = default;
};

struct TimeDependentPolicy {
    std::vector<std::vector<ActionId>> act; // act[step][observation]

    std::size_t horizon() const { return act.size(); }
    ActionId at(ObsId o, std::size_t step) const { return act[step][o]; }

    friend bool operator==(const TimeDependentPolicy&, const TimeDependentPolicy&) = default;
};

// Maps observation sequences of length 1..horizon to actions. Stored as a
// tree whose edges are labelled by observations; node 0 is the empty history
// and carries no action.
class HistoryPolicy {
public:
    HistoryPolicy();

    void set(std::span<const ObsId> history, ActionId action);
    std::optional<ActionId> lookup(std::span<const ObsId> history) const;
    // Length of the longest history with an assigned action.
    std::size_t horizon() const { return horizon_; }
    std::size_t size() const { return nodes_.size() - 1; }

private:
    struct Node {
        std::optional<ActionId> action;
        std::vector<std::pair<ObsId, std::size_t>> children;
    };
    std::optional<std::size_t> child(std::size_t node, ObsId o) const;

    std::vector<Node> nodes_;
    std::size_t horizon_ = 0;
};

struct MemoryStep {
    ActionId action;
    std::size_t next_memory;

    friend bool operator==(const MemoryStep&, const MemoryStep&) = default;
};

struct FiniteMemoryPolicy {
    std::size_t n_obs = 0;
    std::size_t n_memory = 1;
    std::size_t initial_memory = 0;
    std::vector<MemoryStep> steps; // index obs * n_memory + memory

    const MemoryStep& at(ObsId o, std::size_t memory) const { return steps[o * n_memory + memory]; }

    friend bool operator==(const FiniteMemoryPolicy&, const FiniteMemoryPolicy&) = default;
};

using Policy = std::variant<StationaryPolicy, TimeDependentPolicy, HistoryPolicy, FiniteMemoryPolicy>;

// Metrics -------------------------------------------------------------------

struct FiniteTotal {
    std::size_t horizon;
};
struct FiniteDiscounted {
    Rat beta;
    std::size_t horizon;
};
struct InfiniteDiscounted {
    Rat beta;
};
struct Average {};

using Metric = std::variant<FiniteTotal, FiniteDiscounted, InfiniteDiscounted, Average>;

// Throws DomainError unless 0 < beta < 1 for the discounted variants.
void validate_metric(const Metric& metric);
bool is_finite(const Metric& metric);
std::optional<std::size_t> horizon_of(const Metric& metric);
// Discount factor of the metric, 1 when undiscounted.
Rat discount_of(const Metric& metric);
std::string to_string(const Metric& metric);

} // namespace hforge
