#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hforge {

// Variables are 0-based internally; the DIMACS parser converts at the boundary.
struct Literal {
    std::size_t var;
    bool positive; // signum: true = x, false = not x

    friend bool operator==(const Literal&, const Literal&) = default;
};

using Clause = std::vector<Literal>;

struct Cnf {
    std::size_t n_vars = 0;
    std::vector<Clause> clauses;

    friend bool operator==(const Cnf&, const Cnf&) = default;
};

// Clauses must have 1 to 3 literals over distinct in-range variables.
void validate_cnf(const Cnf& f);
bool satisfies(const Clause& c, const std::vector<bool>& assignment);
std::size_t count_satisfied(const Cnf& f, const std::vector<bool>& assignment);

enum class Quantifier { Exists, Random };

struct QuantifiedVar {
    std::size_t var;
    Quantifier quantifier;

    friend bool operator==(const QuantifiedVar&, const QuantifiedVar&) = default;
};

struct SsatFormula {
    std::vector<QuantifiedVar> prefix; // in quantification order
    Cnf matrix;

    friend bool operator==(const SsatFormula&, const SsatFormula&) = default;
};

// Every matrix variable must be quantified exactly once.
void validate_ssat(const SsatFormula& f);

enum class GateKind { And, Or, Not, Const0, Const1 };

std::string to_string(GateKind k);
std::size_t arity(GateKind k);
inline bool is_input(GateKind k) { return k == GateKind::Const0 || k == GateKind::Const1; }

struct Gate {
    std::string id;
    GateKind kind;
    std::vector<std::size_t> inputs; // gate indices

    friend bool operator==(const Gate&, const Gate&) = default;
};

// Boolean circuit. The CONST gates double as the circuit's inputs: in
// declaration order they supply the input bits when a circuit is evaluated
// on an explicit input vector.
struct Circuit {
    std::vector<Gate> gates;
    std::vector<std::size_t> outputs;

    std::vector<std::size_t> input_gates() const;
    std::size_t add(GateKind kind, std::vector<std::size_t> inputs, std::string id = {});

    friend bool operator==(const Circuit&, const Circuit&) = default;
};

// Arity and reference checks plus cycle detection; throws DomainError.
void validate_circuit(const Circuit& c);
// Gate indices in an order where every gate follows its inputs.
std::vector<std::size_t> topological_order(const Circuit& c);

} // namespace hforge
