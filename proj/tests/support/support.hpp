#pragma once

#include "hforge/formula.hpp"
#include "hforge/model.hpp"
#include "hforge/reductions.hpp"

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hforge::testing {

using Rng = std::mt19937_64;

inline Rat frac(long p, long q)
{
    return Rat(BigInt(p), BigInt(q));
}

// Value of a policy as a sum over trajectories: every state sequence of
// length <= h contributes its probability times the (discounted) reward of
// its last step. Policies are consulted on the observation string directly.
Rat trajectory_value(const Pomdp& m, const Policy& policy, std::size_t h, const Rat& beta = Rat(1));

Pomdp random_pomdp(Rng& rng, std::size_t max_states = 4, std::size_t max_actions = 3, bool allow_dead_ends = true,
                   bool nonnegative = false);
StationaryPolicy random_stationary(Rng& rng, const Pomdp& m);
TimeDependentPolicy random_time_dependent(Rng& rng, const Pomdp& m, std::size_t h);
// Assigns an action to every observation string of length 1..h.
HistoryPolicy random_history(Rng& rng, const Pomdp& m, std::size_t h);
FiniteMemoryPolicy random_finite_memory(Rng& rng, const Pomdp& m, std::size_t max_memory = 3);

Cnf random_cnf(Rng& rng, std::size_t max_vars = 4, std::size_t max_clauses = 4);
Cnf sample_formula(); // (!x1 | x3 | x4) & (x1 | !x2 | x4)
Cnf contradiction();  // (x1) & (!x1)
// Sample formula followed by 50 random formulas from a fixed seed.
std::vector<Cnf> cnf_corpus();

struct MaxSat {
    bool satisfiable;
    std::size_t max_satisfied;
};
MaxSat count_max_sat(const Cnf& f);

// Carry and sum of x + y + cin; inputs x, y, cin in that order.
Circuit full_adder();

struct Tree {
    enum Kind { Zero, One, Not, And, Or } kind;
    std::vector<Tree> kids;
};
bool tree_value(const Tree& t);
std::size_t tree_size(const Tree& t);
Circuit tree_circuit(const Tree& t);
// Every tree of depth <= max_depth with at most max_gates nodes.
std::vector<Tree> enumerate_trees(std::size_t max_depth, std::size_t max_gates);

SsatFormula ssat_exists_random(); // E x1 R x2 : (x1 | x2)
SsatFormula ssat_random_exists(); // R x1 E x2 : (x1)

// History chooser for the SSAT gadget that plays `strategy` at existential
// steps (argument: bits fixed so far) and then answers every literal query
// with the bit it committed to for that variable.
using SsatStrategy = std::function<bool(std::size_t step, const std::vector<bool>& previous)>;
std::function<ActionId(std::span<const ObsId>)> consistent_chooser(const GadgetOutput& g,
                                                                   const SsatStrategy& strategy);

// Interprets the gadget's observation labels.
struct SsatObs {
    ObsId start, stage1, bit0, bit1, first_pos;
};
SsatObs ssat_observations(const Pomdp& m);

// Upper bound on e^m as an exact rational (Taylor sum plus tail).
Rat exp_upper(unsigned m);

} // namespace hforge::testing

namespace hforge::testing {

// Builds the succinct instance of c, compiles it with reward exponent
// |C| + k + 1, expands the reachable part and checks that the projection
// onto (gate, parity) is a bisimulation with cvp_to_mdp(c, k): equal initial
// state, projected rows equal to the cvp rows, equal rewards. Returns a
// description of the first mismatch, or an empty string.
struct SuccinctCheck {
    std::string mismatch;
    std::size_t expanded_states = 0;
    std::size_t paying_states = 0;
};
SuccinctCheck succinct_matches_cvp(const Circuit& c, std::size_t k_gap);

} // namespace hforge::testing
