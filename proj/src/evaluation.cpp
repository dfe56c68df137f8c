#include "hforge/evaluation.hpp"

#include "hforge/linalg.hpp"

#include <algorithm>
#include <map>

namespace hforge {

namespace {

void check_action(const Pomdp& m, ActionId a)
{
    if (a >= m.n_actions())
        throw DomainError("policy chooses action " + std::to_string(a) + " but the model has " +
                          std::to_string(m.n_actions()));
}

void check_stationary(const Pomdp& m, const StationaryPolicy& p)
{
    if (p.act.size() != m.n_obs())
        throw DomainError("stationary policy covers " + std::to_string(p.act.size()) + " observations, model has " +
                          std::to_string(m.n_obs()));
    for (const auto a : p.act)
        check_action(m, a);
}

void check_finite_memory(const Pomdp& m, const FiniteMemoryPolicy& p)
{
    if (p.n_obs != m.n_obs())
        throw DomainError("finite-memory policy covers " + std::to_string(p.n_obs) + " observations, model has " +
                          std::to_string(m.n_obs()));
    if (p.n_memory == 0 || p.initial_memory >= p.n_memory || p.steps.size() != p.n_obs * p.n_memory)
        throw DomainError("finite-memory policy is not total on observations x memory");
    for (const auto& s : p.steps) {
        check_action(m, s.action);
        if (s.next_memory >= p.n_memory)
            throw DomainError("finite-memory policy moves to unknown memory state");
    }
}

// Pushes `mass` in state s through action a into `next`.
void propagate(const Pomdp& m, StateId s, ActionId a, const Rat& mass, StateDistribution& next)
{
    for (const auto& t : m.row(s, a))
        next[t.target] += mass * t.prob;
}

struct Branch {
    std::vector<ObsId> history;
    std::map<StateId, Rat> mass;
};

// Advances every history branch by one step; `on_branch` sees each branch
// with the action chosen for it before the step is taken.
template <class Choose, class Visit>
std::vector<Branch> step_branches(const Pomdp& m, const std::vector<Branch>& branches, Choose&& choose, Visit&& visit)
{
    std::vector<Branch> next;
    for (const auto& b : branches) {
        const ActionId a = choose(b.history);
        check_action(m, a);
        visit(b, a);
        std::map<ObsId, std::map<StateId, Rat>> split;
        for (const auto& [s, mass] : b.mass)
            for (const auto& t : m.row(s, a))
                split[m.obs(t.target)][t.target] += mass * t.prob;
        for (auto& [o, dist] : split) {
            Branch child{b.history, std::move(dist)};
            child.history.push_back(o);
            next.push_back(std::move(child));
        }
    }
    return next;
}

std::vector<Branch> root_branches(const Pomdp& m)
{
    return {Branch{{m.obs(m.initial())}, {{m.initial(), Rat(1)}}}};
}

ActionId history_action(const HistoryPolicy& p, const std::vector<ObsId>& history)
{
    const auto a = p.lookup(history);
    if (!a)
        throw DomainError("history policy undefined on a realisable history of length " +
                          std::to_string(history.size()));
    return *a;
}

Rat history_performance(const Pomdp& m, const HistoryPolicy& p, const Rat& beta, std::size_t h)
{
    Rat total;
    Rat weight(1);
    auto branches = root_branches(m);
    for (std::size_t i = 0; i < h && !branches.empty(); ++i) {
        Rat step_reward;
        branches = step_branches(
            m, branches, [&](const std::vector<ObsId>& hist) { return history_action(p, hist); },
            [&](const Branch& b, ActionId a) {
                for (const auto& [s, mass] : b.mass)
                    step_reward += mass * m.reward(s, a);
            });
        total += weight * step_reward;
        weight *= beta;
    }
    return total;
}

// Stationary (or step-indexed) forward propagation.
template <class ActionAt>
Rat markov_performance(const Pomdp& m, ActionAt&& action_at, const Rat& beta, std::size_t h)
{
    StateDistribution d(m.n_states());
    d[m.initial()] = 1;
    Rat total;
    Rat weight(1);
    for (std::size_t i = 0; i < h; ++i) {
        StateDistribution next(m.n_states());
        Rat step_reward;
        for (StateId s = 0; s < m.n_states(); ++s) {
            if (d[s].is_zero())
                continue;
            const ActionId a = action_at(m.obs(s), i);
            step_reward += d[s] * m.reward(s, a);
            propagate(m, s, a, d[s], next);
        }
        total += weight * step_reward;
        weight *= beta;
        d = std::move(next);
    }
    return total;
}

// States reachable from the initial state under a stationary policy.
std::vector<StateId> reachable_under(const Pomdp& m, const StationaryPolicy& p)
{
    std::vector<bool> seen(m.n_states(), false);
    std::vector<StateId> order{m.initial()};
    seen[m.initial()] = true;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const StateId s = order[i];
        for (const auto& t : m.row(s, p.act[m.obs(s)]))
            if (!seen[t.target]) {
                seen[t.target] = true;
                order.push_back(t.target);
            }
    }
    return order;
}

} // namespace

void check_policy_domain(const Pomdp& m, const Policy& policy, std::size_t horizon)
{
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StationaryPolicy>) {
                check_stationary(m, p);
            } else if constexpr (std::is_same_v<T, TimeDependentPolicy>) {
                if (p.horizon() < horizon)
                    throw DomainError("time-dependent policy has horizon " + std::to_string(p.horizon()) +
                                      ", evaluation needs " + std::to_string(horizon));
                for (const auto& row : p.act) {
                    if (row.size() != m.n_obs())
                        throw DomainError("time-dependent policy row does not cover all observations");
                    for (const auto a : row)
                        check_action(m, a);
                }
            } else if constexpr (std::is_same_v<T, HistoryPolicy>) {
                // gaps are reported when a realisable history reaches them
            } else {
                check_finite_memory(m, p);
            }
        },
        policy);
}

Rat finite_horizon_performance(const Pomdp& m, const Policy& policy, const Metric& metric)
{
    validate_metric(metric);
    const auto h = horizon_of(metric);
    if (!h)
        throw DomainError("finite_horizon_performance needs a finite-horizon metric");
    const Rat beta = discount_of(metric);
    check_policy_domain(m, policy, *h);
    return std::visit(
        [&](const auto& p) -> Rat {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StationaryPolicy>) {
                return markov_performance(m, [&](ObsId o, std::size_t) { return p.act[o]; }, beta, *h);
            } else if constexpr (std::is_same_v<T, TimeDependentPolicy>) {
                return markov_performance(m, [&](ObsId o, std::size_t i) { return p.at(o, i); }, beta, *h);
            } else if constexpr (std::is_same_v<T, HistoryPolicy>) {
                return history_performance(m, p, beta, *h);
            } else {
                const auto product = finite_memory_cross_product(m, p);
                return finite_horizon_performance(product.model, product.policy, metric);
            }
        },
        policy);
}

Rat discounted_performance_stationary(const Pomdp& m, const StationaryPolicy& policy, const Rat& beta)
{
    validate_metric(InfiniteDiscounted{beta});
    check_stationary(m, policy);
    const auto states = reachable_under(m, policy);
    std::vector<std::size_t> local(m.n_states(), 0);
    for (std::size_t i = 0; i < states.size(); ++i)
        local[states[i]] = i;
    const std::size_t n = states.size();
    RatMatrix a(n, std::vector<Rat>(n));
    std::vector<Rat> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const StateId s = states[i];
        const ActionId act = policy.act[m.obs(s)];
        a[i][i] += 1;
        for (const auto& t : m.row(s, act))
            a[i][local[t.target]] -= beta * t.prob;
        b[i] = m.reward(s, act);
    }
    return solve_linear(std::move(a), std::move(b))[0];
}

Rat average_performance_stationary(const Pomdp& m, const StationaryPolicy& policy)
{
    check_stationary(m, policy);
    const auto states = reachable_under(m, policy);
    const std::size_t n = states.size();
    std::vector<std::size_t> local(m.n_states(), 0);
    for (std::size_t i = 0; i < n; ++i)
        local[states[i]] = i;

    // Induced chain restricted to reachable states.
    std::vector<std::vector<std::pair<std::size_t, Rat>>> chain(n);
    std::vector<Rat> reward(n);
    for (std::size_t i = 0; i < n; ++i) {
        const StateId s = states[i];
        const ActionId a = policy.act[m.obs(s)];
        reward[i] = m.reward(s, a);
        for (const auto& t : m.row(s, a))
            chain[i].emplace_back(local[t.target], t.prob);
    }

    // Tarjan's strongly connected components (iterative).
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    int counter = 0, n_comp = 0;
    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] >= 0)
            continue;
        work.emplace_back(root, 0);
        while (!work.empty()) {
            auto& [v, next] = work.back();
            if (next == 0 && index[v] < 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (next < chain[v].size()) {
                const std::size_t w = chain[v][next++].first;
                if (index[w] < 0)
                    work.emplace_back(w, 0);
                else if (on_stack[w])
                    low[v] = std::min(low[v], index[w]);
                continue;
            }
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = n_comp;
                } while (w != v);
                ++n_comp;
            }
            const std::size_t done = v;
            work.pop_back();
            if (!work.empty())
                low[work.back().first] = std::min(low[work.back().first], low[done]);
        }
    }

    // A class is recurrent when it is closed and keeps its mass (no state in
    // it has an all-zero row).
    std::vector<bool> closed(n_comp, true);
    for (std::size_t i = 0; i < n; ++i) {
        if (chain[i].empty())
            closed[comp[i]] = false;
        for (const auto& [j, p] : chain[i])
            if (comp[j] != comp[i])
                closed[comp[i]] = false;
    }

    std::vector<Rat> gain(n);
    std::vector<bool> recurrent(n, false);
    for (int c = 0; c < n_comp; ++c) {
        if (!closed[c])
            continue;
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (comp[i] == c)
                members.push_back(i);
        std::vector<std::size_t> pos(n, 0);
        for (std::size_t k = 0; k < members.size(); ++k)
            pos[members[k]] = k;
        // x (P - I) = 0 with the last balance equation replaced by sum x = 1.
        const std::size_t k = members.size();
        RatMatrix a(k, std::vector<Rat>(k));
        std::vector<Rat> b(k);
        for (std::size_t col = 0; col < k; ++col) {
            const std::size_t i = members[col];
            for (const auto& [j, p] : chain[i])
                a[pos[j]][col] += p;
            a[col][col] -= 1;
        }
        for (std::size_t col = 0; col < k; ++col)
            a[k - 1][col] = 1;
        b[k - 1] = 1;
        const auto x = solve_linear(std::move(a), std::move(b));
        Rat g;
        for (std::size_t col = 0; col < k; ++col)
            g += x[col] * reward[members[col]];
        for (const auto i : members) {
            gain[i] = g;
            recurrent[i] = true;
        }
    }

    // Transient states: g = P_TT g + P_TR gain_R.
    std::vector<std::size_t> transient;
    std::vector<std::size_t> tpos(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (!recurrent[i]) {
            tpos[i] = transient.size();
            transient.push_back(i);
        }
    if (recurrent[0])
        return gain[0];
    const std::size_t k = transient.size();
    RatMatrix a(k, std::vector<Rat>(k));
    std::vector<Rat> b(k);
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t i = transient[r];
        a[r][r] += 1;
        for (const auto& [j, p] : chain[i]) {
            if (recurrent[j])
                b[r] += p * gain[j];
            else
                a[r][tpos[j]] -= p;
        }
    }
    const auto g = solve_linear(std::move(a), std::move(b));
    return g[tpos[0]];
}

Rat performance(const Pomdp& m, const Policy& policy, const Metric& metric)
{
    validate_metric(metric);
    if (is_finite(metric))
        return finite_horizon_performance(m, policy, metric);
    const StationaryPolicy* stationary = std::get_if<StationaryPolicy>(&policy);
    ProductModel product;
    const Pomdp* model = &m;
    if (const auto* fm = std::get_if<FiniteMemoryPolicy>(&policy)) {
        product = finite_memory_cross_product(m, *fm);
        model = &product.model;
        stationary = &product.policy;
    }
    if (!stationary)
        throw DomainError("infinite-horizon metrics are only evaluated for stationary and finite-memory policies");
    if (const auto* d = std::get_if<InfiniteDiscounted>(&metric))
        return discounted_performance_stationary(*model, *stationary, d->beta);
    return average_performance_stationary(*model, *stationary);
}

ProductModel finite_memory_cross_product(const Pomdp& m, const FiniteMemoryPolicy& policy)
{
    check_finite_memory(m, policy);
    const std::size_t mem = policy.n_memory;
    ProductModel out{Pomdp(m.n_states() * mem, m.n_actions(), m.n_obs() * mem, m.initial() * mem + policy.initial_memory),
                     StationaryPolicy{std::vector<ActionId>(m.n_obs() * mem)}};
    for (StateId s = 0; s < m.n_states(); ++s) {
        for (std::size_t q = 0; q < mem; ++q) {
            const StateId ps = s * mem + q;
            const auto& step = policy.at(m.obs(s), q);
            out.model.set_obs(ps, m.obs(s) * mem + q);
            for (ActionId a = 0; a < m.n_actions(); ++a) {
                out.model.set_reward(ps, a, m.reward(s, a));
                for (const auto& t : m.row(s, a))
                    out.model.set_transition(ps, a, t.target * mem + step.next_memory, t.prob);
            }
        }
    }
    for (ObsId o = 0; o < m.n_obs(); ++o)
        for (std::size_t q = 0; q < mem; ++q)
            out.policy.act[o * mem + q] = policy.at(o, q).action;
    return out;
}

StateDistribution state_distribution_at(const Pomdp& m, const Policy& policy, std::size_t step)
{
    check_policy_domain(m, policy, step);
    StateDistribution out(m.n_states());
    if (const auto* hp = std::get_if<HistoryPolicy>(&policy)) {
        auto branches = root_branches(m);
        for (std::size_t i = 0; i < step; ++i)
            branches = step_branches(
                m, branches, [&](const std::vector<ObsId>& hist) { return history_action(*hp, hist); },
                [](const Branch&, ActionId) {});
        for (const auto& b : branches)
            for (const auto& [s, mass] : b.mass)
                out[s] += mass;
        return out;
    }
    if (const auto* fm = std::get_if<FiniteMemoryPolicy>(&policy)) {
        const auto product = finite_memory_cross_product(m, *fm);
        const auto joint = state_distribution_at(product.model, product.policy, step);
        for (StateId ps = 0; ps < joint.size(); ++ps)
            out[ps / fm->n_memory] += joint[ps];
        return out;
    }
    out[m.initial()] = 1;
    for (std::size_t i = 0; i < step; ++i) {
        StateDistribution next(m.n_states());
        for (StateId s = 0; s < m.n_states(); ++s) {
            if (out[s].is_zero())
                continue;
            const ObsId o = m.obs(s);
            const ActionId a = std::holds_alternative<StationaryPolicy>(policy)
                                   ? std::get<StationaryPolicy>(policy).act[o]
                                   : std::get<TimeDependentPolicy>(policy).at(o, i);
            propagate(m, s, a, out[s], next);
        }
        out = std::move(next);
    }
    return out;
}

HistoryPolicy history_policy_from(const Pomdp& m, std::size_t horizon, const HistoryChooser& choose)
{
    HistoryPolicy policy;
    auto branches = root_branches(m);
    for (std::size_t i = 0; i < horizon && !branches.empty(); ++i)
        branches = step_branches(
            m, branches, [&](const std::vector<ObsId>& hist) { return choose(hist); },
            [&](const Branch& b, ActionId a) { policy.set(b.history, a); });
    return policy;
}

} // namespace hforge
