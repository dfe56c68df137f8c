#pragma once

#include "hforge/caps.hpp"
#include "hforge/formula.hpp"
#include "hforge/rational.hpp"
#include "hforge/tbn.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hforge {

enum class SourceKind { Cnf, Ssat, Circuit, Succinct };

std::string to_string(SourceKind k);
// CNF unless the text has quantifier lines (SSAT), gate lines (circuit) or
// an index-width line (succinct instance).
SourceKind detect_source_kind(std::string_view text);

struct VerifyOptions {
    // cnf: sat3 (default), gap, uomdp, amplify, inf
    // ssat: ssat; circuit: cvp (default), tbn, succinct; succinct: succinct
    std::string path;
    Rat eps{BigInt(1), BigInt(2)}; // gap path
    std::optional<unsigned> c;
    std::optional<std::size_t> k;
    std::size_t gap = 1;
    Caps caps;
};

struct VerifyReport {
    std::string path;
    std::string claim;
    bool yes_instance = false;
    bool inside_gap = false; // source outside the gadget's promise
    std::string truth;  // how the source was decided
    std::optional<Rat> value;
    std::vector<std::string> notes;
    bool pass = false;

    std::string text() const;
};

// Compiles the source along `options.path`, decides the source exactly and
// checks the gadget's declared value claim with an exact oracle.
VerifyReport verify_source(std::string_view text, const VerifyOptions& options);

// Evaluates the circuit described by a succinct instance, starting at the
// gate named by S(0, 2).
bool succinct_circuit_value(const SuccinctCircuitInstance& s, const Caps& caps = {});

} // namespace hforge
