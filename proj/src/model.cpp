#include "hforge/model.hpp"

#include <algorithm>
#include <sstream>

namespace hforge {

Pomdp::Pomdp(std::size_t n_states, std::size_t n_actions, std::size_t n_obs, StateId initial)
    : n_states_(n_states), n_actions_(n_actions), n_obs_(n_obs), initial_(initial), obs_(n_states, 0),
      rows_(n_states * n_actions), rewards_(n_states * n_actions)
{
}

void Pomdp::check_state(StateId s) const
{
    if (s >= n_states_)
        throw DomainError("state " + std::to_string(s) + " out of range (" + std::to_string(n_states_) + " states)");
}

void Pomdp::check_action(ActionId a) const
{
    if (a >= n_actions_)
        throw DomainError("action " + std::to_string(a) + " out of range (" + std::to_string(n_actions_) +
                          " actions)");
}

Rat Pomdp::prob(StateId s, ActionId a, StateId to) const
{
    const auto& r = rows_[index(s, a)];
    const auto it = std::lower_bound(r.begin(), r.end(), to, [](const Transition& t, StateId v) { return t.target < v; });
    return (it != r.end() && it->target == to) ? it->prob : Rat(0);
}

void Pomdp::set_initial(StateId s) { initial_ = s; }

void Pomdp::set_obs(StateId s, ObsId o)
{
    check_state(s);
    if (o >= n_obs_)
        throw DomainError("observation " + std::to_string(o) + " out of range");
    obs_[s] = o;
}

void Pomdp::set_transition(StateId s, ActionId a, StateId to, const Rat& p)
{
    check_state(s);
    check_state(to);
    check_action(a);
    auto& r = rows_[index(s, a)];
    auto it = std::lower_bound(r.begin(), r.end(), to, [](const Transition& t, StateId v) { return t.target < v; });
    if (it != r.end() && it->target == to) {
        if (p.is_zero())
            r.erase(it);
        else
            it->prob = p;
    } else if (!p.is_zero()) {
        r.insert(it, Transition{to, p});
    }
}

void Pomdp::add_transition(StateId s, ActionId a, StateId to, const Rat& p)
{
    set_transition(s, a, to, prob(s, a, to) + p);
}

void Pomdp::set_reward(StateId s, ActionId a, const Rat& r)
{
    check_state(s);
    check_action(a);
    rewards_[index(s, a)] = r;
}

std::string Pomdp::state_name(StateId s) const
{
    return s < state_labels.size() ? state_labels[s] : "s" + std::to_string(s);
}

std::string Pomdp::obs_name(ObsId o) const
{
    return o < obs_labels.size() ? obs_labels[o] : "o" + std::to_string(o);
}

bool operator==(const Pomdp& a, const Pomdp& b)
{
    return a.n_states_ == b.n_states_ && a.n_actions_ == b.n_actions_ && a.n_obs_ == b.n_obs_ &&
           a.initial_ == b.initial_ && a.obs_ == b.obs_ && a.rows_ == b.rows_ && a.rewards_ == b.rewards_;
}

std::vector<Violation> validate_pomdp(const Pomdp& m)
{
    std::vector<Violation> out;
    if (m.n_states() == 0 || m.n_actions() == 0 || m.n_obs() == 0) {
        out.push_back({Violation::Kind::Empty, "model needs at least one state, action and observation"});
        return out;
    }
    if (m.initial() >= m.n_states())
        out.push_back({Violation::Kind::InitialState, "initial state " + std::to_string(m.initial()) + " out of range"});
    for (StateId s = 0; s < m.n_states(); ++s) {
        if (m.obs(s) >= m.n_obs())
            out.push_back({Violation::Kind::Observation, "state " + std::to_string(s) + " has no valid observation"});
        for (ActionId a = 0; a < m.n_actions(); ++a) {
            Rat sum;
            for (const auto& t : m.row(s, a)) {
                if (t.prob < 0 || t.prob > 1) {
                    out.push_back({Violation::Kind::ProbabilityRange,
                                   "t(" + std::to_string(s) + "," + std::to_string(a) + "," + std::to_string(t.target) +
                                       ") = " + t.prob.str() + " outside [0,1]"});
                }
                sum += t.prob;
            }
            if (!sum.is_zero() && sum != 1) {
                out.push_back({Violation::Kind::RowSum, "row-sum of (" + std::to_string(s) + "," + std::to_string(a) +
                                                            ") is " + sum.str() + ", expected 0 or 1"});
            }
        }
    }
    return out;
}

namespace {

std::string join_violations(const std::vector<Violation>& v)
{
    std::ostringstream os;
    os << "invalid model";
    for (const auto& x : v)
        os << "; " << x.message;
    return os.str();
}

} // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(join_violations(violations)), violations_(std::move(violations))
{
}

ObservabilityClass classify_observability(const Pomdp& m)
{
    if (m.n_obs() == 1)
        return ObservabilityClass::Unobservable;
    if (m.n_obs() == m.n_states()) {
        std::vector<bool> seen(m.n_obs(), false);
        bool bijective = true;
        for (StateId s = 0; s < m.n_states() && bijective; ++s) {
            if (seen[m.obs(s)])
                bijective = false;
            seen[m.obs(s)] = true;
        }
        if (bijective)
            return ObservabilityClass::FullyObservable;
    }
    return ObservabilityClass::General;
}

std::string to_string(ObservabilityClass c)
{
    switch (c) {
    case ObservabilityClass::FullyObservable: return "fully-observable";
    case ObservabilityClass::Unobservable: return "unobservable";
    case ObservabilityClass::General: return "general";
    }
    return "?";
}

HistoryPolicy::HistoryPolicy() : nodes_(1) {}

std::optional<std::size_t> HistoryPolicy::child(std::size_t node, ObsId o) const
{
    for (const auto& [obs, idx] : nodes_[node].children)
        if (obs == o)
            return idx;
    return std::nullopt;
}

void HistoryPolicy::set(std::span<const ObsId> history, ActionId action)
{
    if (history.empty())
        throw DomainError("history policy: empty history has no action");
    std::size_t node = 0;
    for (const ObsId o : history) {
        if (auto c = child(node, o)) {
            node = *c;
        } else {
            nodes_.push_back({});
            nodes_[node].children.emplace_back(o, nodes_.size() - 1);
            node = nodes_.size() - 1;
        }
    }
    nodes_[node].action = action;
    horizon_ = std::max(horizon_, history.size());
}

std::optional<ActionId> HistoryPolicy::lookup(std::span<const ObsId> history) const
{
    std::size_t node = 0;
    for (const ObsId o : history) {
        auto c = child(node, o);
        if (!c)
            return std::nullopt;
        node = *c;
    }
    return nodes_[node].action;
}

void validate_metric(const Metric& metric)
{
    auto check_beta = [](const Rat& beta) {
        if (beta <= 0 || beta >= 1)
            throw DomainError("discount factor must satisfy 0 < beta < 1, got " + beta.str());
    };
    if (const auto* d = std::get_if<FiniteDiscounted>(&metric))
        check_beta(d->beta);
    if (const auto* d = std::get_if<InfiniteDiscounted>(&metric))
        check_beta(d->beta);
}

bool is_finite(const Metric& metric)
{
    return std::holds_alternative<FiniteTotal>(metric) || std::holds_alternative<FiniteDiscounted>(metric);
}

std::optional<std::size_t> horizon_of(const Metric& metric)
{
    if (const auto* t = std::get_if<FiniteTotal>(&metric))
        return t->horizon;
    if (const auto* d = std::get_if<FiniteDiscounted>(&metric))
        return d->horizon;
    return std::nullopt;
}

Rat discount_of(const Metric& metric)
{
    if (const auto* d = std::get_if<FiniteDiscounted>(&metric))
        return d->beta;
    if (const auto* d = std::get_if<InfiniteDiscounted>(&metric))
        return d->beta;
    return Rat(1);
}

std::string to_string(const Metric& metric)
{
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FiniteTotal>)
                return "total(h=" + std::to_string(m.horizon) + ")";
            else if constexpr (std::is_same_v<T, FiniteDiscounted>)
                return "discounted(beta=" + m.beta.str() + ",h=" + std::to_string(m.horizon) + ")";
            else if constexpr (std::is_same_v<T, InfiniteDiscounted>)
                return "discounted(beta=" + m.beta.str() + ",h=inf)";
            else
                return "average";
        },
        metric);
}

} // namespace hforge
