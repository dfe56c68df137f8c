#pragma once

#include "hforge/formula.hpp"
#include "hforge/model.hpp"
#include "hforge/tbn.hpp"

#include <string>
#include <string_view>

namespace hforge {

// DIMACS CNF. Variables are 1-based in text and 0-based in memory.
Cnf parse_cnf(std::string_view text);
std::string serialize_cnf(const Cnf& f);

// DIMACS with quantifier lines "e <vars> 0" / "r <vars> 0" before clauses.
SsatFormula parse_ssat(std::string_view text);
std::string serialize_ssat(const SsatFormula& f);

// Netlist: "gate <id> AND|OR <a> <b>", "gate <id> NOT <a>",
// "gate <id> CONST 0|1", "output <id>". References may point forward.
Circuit parse_circuit(std::string_view text);
std::string serialize_circuit(const Circuit& c);

// Netlist followed by "index-width <l>".
SuccinctCircuitInstance parse_succinct_instance(std::string_view text);
std::string serialize_succinct_instance(const SuccinctCircuitInstance& s);

// Throws ParseError on syntax errors and ValidationError when the parsed
// model breaks an invariant.
Pomdp parse_pomdp(std::string_view text);
std::string serialize_pomdp(const Pomdp& m);

Tbn parse_tbn(std::string_view text);
std::string serialize_tbn(const Tbn& t);

// Stationary, time-dependent or finite-memory; history policies have no
// text form.
Policy parse_policy(std::string_view text);
std::string serialize_policy(const Policy& p);

} // namespace hforge
