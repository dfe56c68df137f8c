#pragma once

#include "hforge/model.hpp"

#include <functional>
#include <optional>

namespace hforge {

enum class ApproxKind { KAdditive, Ptas };

// A pluggable value estimator. KAdditive: v - k <= mu <= v. Ptas: called
// with eps, (1 - eps) v <= mu <= v. The metric is part of the callable.
struct Approximator {
    std::function<Rat(const Pomdp&, const std::optional<Rat>&)> fn;
    ApproxKind kind = ApproxKind::KAdditive;
    Rat k;

    Rat operator()(const Pomdp& m, const std::optional<Rat>& eps = std::nullopt) const { return fn(m, eps); }
};

// nu^h zeta, (beta nu)^h zeta or (beta nu)^|S| zeta, where nu is the least
// nonzero transition probability and zeta the least nonzero reward among
// states reachable under some action sequence.
Rat positive_value_lower_bound(const Pomdp& m, const Metric& metric);

Pomdp scale_rewards(const Pomdp& m, const Rat& theta);

// Least integer strictly greater than x.
BigInt least_integer_above(const Rat& x);

bool decide_positivity_via_kadditive(const Approximator& a, const Pomdp& m, const Metric& metric);
Rat kadditive_to_ptas(const Approximator& a, const Pomdp& m, const Rat& eps, const Metric& metric);
// Uses eps = min(1/2, k/(4v)) for the second call, where v = a(m, 1/2).
Rat ptas_to_kadditive(const Approximator& a, const Pomdp& m, const Rat& k);

} // namespace hforge
