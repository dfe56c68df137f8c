#include "hforge/approx.hpp"

#include <optional>

namespace hforge {

namespace {

struct Extremes {
    std::optional<Rat> nu;
    std::optional<Rat> zeta;
};

Extremes reachable_extremes(const Pomdp& m)
{
    Extremes out;
    std::vector<bool> seen(m.n_states(), false);
    std::vector<StateId> queue{m.initial()};
    seen[m.initial()] = true;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const StateId s = queue[i];
        for (ActionId a = 0; a < m.n_actions(); ++a) {
            const Rat& r = m.reward(s, a);
            if (r.sign() > 0 && (!out.zeta || r < *out.zeta))
                out.zeta = r;
            for (const auto& t : m.row(s, a)) {
                if (!out.nu || t.prob < *out.nu)
                    out.nu = t.prob;
                if (!seen[t.target]) {
                    seen[t.target] = true;
                    queue.push_back(t.target);
                }
            }
        }
    }
    return out;
}

void require_nonnegative(const Pomdp& m)
{
    for (StateId s = 0; s < m.n_states(); ++s)
        for (ActionId a = 0; a < m.n_actions(); ++a)
            if (m.reward(s, a).sign() < 0)
                throw DomainError("negative reward at (" + std::to_string(s) + "," + std::to_string(a) + ")");
}

} // namespace

Rat positive_value_lower_bound(const Pomdp& m, const Metric& metric)
{
    validate_metric(metric);
    require_nonnegative(m);
    if (std::holds_alternative<Average>(metric))
        throw DomainError("no lower bound is defined for the average metric");
    const auto ex = reachable_extremes(m);
    if (!ex.zeta)
        throw DomainError("no reachable nonzero reward: the value is 0 and the bound is undefined");
    const Rat nu = ex.nu.value_or(Rat(1));
    const Rat step = discount_of(metric) * nu;
    const std::size_t exponent = is_finite(metric) ? *horizon_of(metric) : m.n_states();
    return pow(step, static_cast<long>(exponent)) * *ex.zeta;
}

Pomdp scale_rewards(const Pomdp& m, const Rat& theta)
{
    if (theta.sign() <= 0)
        throw DomainError("scale factor must be positive, got " + theta.str());
    Pomdp out = m;
    for (StateId s = 0; s < m.n_states(); ++s)
        for (ActionId a = 0; a < m.n_actions(); ++a)
            out.set_reward(s, a, m.reward(s, a) * theta);
    return out;
}

BigInt least_integer_above(const Rat& x)
{
    return floor(x) + 1;
}

bool decide_positivity_via_kadditive(const Approximator& a, const Pomdp& m, const Metric& metric)
{
    if (a.kind != ApproxKind::KAdditive)
        throw DomainError("decide_positivity needs a k-additive approximator");
    require_nonnegative(m);
    if (!reachable_extremes(m).zeta)
        return false;
    const Rat delta = positive_value_lower_bound(m, metric);
    const Rat theta(least_integer_above(a.k / delta));
    return a(scale_rewards(m, theta)).sign() > 0;
}

Rat kadditive_to_ptas(const Approximator& a, const Pomdp& m, const Rat& eps, const Metric& metric)
{
    if (eps.sign() <= 0)
        throw DomainError("epsilon must be positive, got " + eps.str());
    if (!decide_positivity_via_kadditive(a, m, metric))
        return Rat(0);
    const Rat delta = positive_value_lower_bound(m, metric);
    const Rat theta(least_integer_above(a.k / (eps * delta)));
    return a(scale_rewards(m, theta)) / theta;
}

Rat ptas_to_kadditive(const Approximator& a, const Pomdp& m, const Rat& k)
{
    if (a.kind != ApproxKind::Ptas)
        throw DomainError("ptas_to_kadditive needs an approximation scheme");
    if (k.sign() <= 0)
        throw DomainError("k must be positive, got " + k.str());
    const Rat half(BigInt(1), BigInt(2));
    const Rat v = a(m, half);
    if (v.is_zero())
        return Rat(0);
    const Rat eps = std::min(half, k / (Rat(4) * v));
    return a(m, eps);
}

} // namespace hforge
