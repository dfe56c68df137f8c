#pragma once

#include <cstdint>
#include <string_view>

namespace hforge {

// Desk-scale guardrails. Exceeding one raises CapExceeded; nothing is ever
// silently truncated.
struct Caps {
    std::uint64_t policies = std::uint64_t{1} << 20;
    std::uint64_t states = std::uint64_t{1} << 16;
    std::uint64_t sat_vars = 24;

    // "policies=<n>,states=<n>,sat_vars=<n>"; unknown keys are rejected.
    static Caps parse(std::string_view text);
    // Reads HARDNESS_FORGE_CAPS, falling back to the defaults.
    static Caps from_env();
};

} // namespace hforge
