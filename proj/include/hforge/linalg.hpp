#pragma once

#include "hforge/rational.hpp"

#include <vector>

namespace hforge {

using RatMatrix = std::vector<std::vector<Rat>>;

// Solves A x = b exactly by Gaussian elimination. Throws DomainError when A
// is singular.
std::vector<Rat> solve_linear(RatMatrix a, std::vector<Rat> b);

} // namespace hforge
