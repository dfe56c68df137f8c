#include "hforge/oracles.hpp"

#include "hforge/evaluation.hpp"

#include <bit>
#include <map>
#include <optional>

namespace hforge {

namespace {

std::vector<bool> reachable_any_action(const Pomdp& m)
{
    std::vector<bool> seen(m.n_states(), false);
    std::vector<StateId> queue{m.initial()};
    seen[m.initial()] = true;
    for (std::size_t i = 0; i < queue.size(); ++i)
        for (ActionId a = 0; a < m.n_actions(); ++a)
            for (const auto& t : m.row(queue[i], a))
                if (!seen[t.target]) {
                    seen[t.target] = true;
                    queue.push_back(t.target);
                }
    return seen;
}

bool actions_equivalent(const Pomdp& m, StateId s)
{
    for (ActionId a = 1; a < m.n_actions(); ++a) {
        if (m.reward(s, a) != m.reward(s, 0))
            return false;
        const auto r0 = m.row(s, 0);
        const auto ra = m.row(s, a);
        if (!std::equal(r0.begin(), r0.end(), ra.begin(), ra.end()))
            return false;
    }
    return true;
}

BigInt int_pow(std::size_t base, std::size_t exponent)
{
    BigInt out;
    mpz_ui_pow_ui(out.get_mpz_t(), base, exponent);
    return out;
}

// Observations whose action choice can matter given the states in `support`.
std::vector<ObsId> branching_observations(const Pomdp& m, const std::vector<bool>& support)
{
    std::vector<bool> matters(m.n_obs(), false);
    for (StateId s = 0; s < m.n_states(); ++s)
        if (support[s] && !matters[m.obs(s)] && !actions_equivalent(m, s))
            matters[m.obs(s)] = true;
    std::vector<ObsId> out;
    for (ObsId o = 0; o < m.n_obs(); ++o)
        if (matters[o])
            out.push_back(o);
    return out;
}

// Advances an odometer over `digits` positions (last position fastest).
bool next_choice(std::vector<ActionId>& digits, std::size_t base)
{
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < base)
            return true;
        digits[i] = 0;
    }
    return false;
}

// Scales a nonzero distribution to total mass 1; returns the old mass.
Rat normalize(std::vector<Rat>& d)
{
    Rat total;
    for (const auto& x : d)
        total += x;
    if (!total.is_zero() && total != Rat(1))
        for (auto& x : d)
            x /= total;
    return total;
}

std::size_t finite_horizon_or_throw(const Metric& metric, const char* who)
{
    validate_metric(metric);
    const auto h = horizon_of(metric);
    if (!h)
        throw DomainError(std::string(who) + " needs a finite-horizon metric");
    return *h;
}

class TimeDependentSearch {
public:
    TimeDependentSearch(const Pomdp& m, std::size_t h, Rat beta, const Caps& caps)
        : m_(m), h_(h), beta_(std::move(beta)), caps_(caps)
    {
    }

    struct Node {
        Rat value; // for the normalised distribution, discounted from step 0
        std::vector<std::vector<ActionId>> rows;
    };

    const Node& solve(std::size_t t, std::vector<Rat> d)
    {
        auto key = std::make_pair(t, std::move(d));
        if (const auto it = memo_.find(key); it != memo_.end())
            return it->second;
        const auto& dist = key.second;
        Node best;
        if (t == h_) {
            return memo_.emplace(std::move(key), std::move(best)).first->second;
        }
        std::vector<bool> support(m_.n_states());
        for (StateId s = 0; s < m_.n_states(); ++s)
            support[s] = !dist[s].is_zero();
        const auto branch = branching_observations(m_, support);
        const Rat weight = pow(beta_, static_cast<long>(t));
        std::vector<ActionId> digits(branch.size(), 0);
        bool first = true;
        do {
            if (++evaluated_ > caps_.policies)
                throw CapExceeded("time-dependent search exceeded " + std::to_string(caps_.policies) + " nodes");
            std::vector<ActionId> row(m_.n_obs(), 0);
            for (std::size_t i = 0; i < branch.size(); ++i)
                row[branch[i]] = digits[i];
            Rat immediate;
            std::vector<Rat> next(m_.n_states());
            for (StateId s = 0; s < m_.n_states(); ++s) {
                if (!support[s])
                    continue;
                const ActionId a = row[m_.obs(s)];
                immediate += dist[s] * m_.reward(s, a);
                for (const auto& tr : m_.row(s, a))
                    next[tr.target] += dist[s] * tr.prob;
            }
            const Rat mass = normalize(next);
            Rat value = weight * immediate;
            const Node* child = nullptr;
            if (!mass.is_zero()) {
                child = &solve(t + 1, std::move(next));
                value += mass * child->value;
            }
            if (first || value > best.value) {
                first = false;
                best.value = value;
                best.rows.assign(1, row);
                if (child)
                    best.rows.insert(best.rows.end(), child->rows.begin(), child->rows.end());
                else
                    best.rows.resize(h_ - t, std::vector<ActionId>(m_.n_obs(), 0));
            }
        } while (next_choice(digits, m_.n_actions()));
        return memo_.emplace(std::move(key), std::move(best)).first->second;
    }

    std::uint64_t evaluated() const { return evaluated_; }

private:
    const Pomdp& m_;
    std::size_t h_;
    Rat beta_;
    const Caps& caps_;
    std::uint64_t evaluated_ = 0;
    std::map<std::pair<std::size_t, std::vector<Rat>>, Node> memo_;
};

class HistorySearch {
public:
    HistorySearch(const Pomdp& m, std::size_t h, Rat beta, const Caps& caps)
        : m_(m), h_(h), beta_(std::move(beta)), caps_(caps)
    {
    }

    // Optimal value of a normalised belief at `depth`.
    Rat solve(std::size_t depth, std::vector<Rat> belief)
    {
        if (depth == h_)
            return Rat(0);
        auto key = std::make_pair(depth, std::move(belief));
        if (const auto it = memo_.find(key); it != memo_.end())
            return it->second;
        if (++nodes_ > caps_.policies)
            throw CapExceeded("history search exceeded " + std::to_string(caps_.policies) + " belief nodes");
        const auto& b = key.second;
        const Rat weight = pow(beta_, static_cast<long>(depth));
        std::optional<Rat> best;
        for (ActionId a = 0; a < m_.n_actions(); ++a) {
            Rat value;
            std::map<ObsId, std::vector<Rat>> split;
            for (StateId s = 0; s < m_.n_states(); ++s) {
                if (b[s].is_zero())
                    continue;
                value += weight * b[s] * m_.reward(s, a);
                for (const auto& tr : m_.row(s, a)) {
                    auto& post = split[m_.obs(tr.target)];
                    if (post.empty())
                        post.resize(m_.n_states());
                    post[tr.target] += b[s] * tr.prob;
                }
            }
            for (auto& [o, post] : split) {
                const Rat mass = normalize(post);
                value += mass * solve(depth + 1, std::move(post));
            }
            if (!best || value > *best)
                best = value;
        }
        return memo_.emplace(std::move(key), *best).first->second;
    }

private:
    const Pomdp& m_;
    std::size_t h_;
    Rat beta_;
    const Caps& caps_;
    std::uint64_t nodes_ = 0;
    std::map<std::pair<std::size_t, std::vector<Rat>>, Rat> memo_;
};

void push_bits(std::vector<bool>& out, std::uint64_t value, std::size_t width)
{
    for (std::size_t b = 0; b < width; ++b)
        out.push_back(((value >> b) & 1u) != 0);
}

void check_state_cap(std::size_t bits, const Caps& caps, const char* what)
{
    if (bits >= 63 || (std::uint64_t{1} << bits) > caps.states)
        throw CapExceeded(std::string(what) + ": 2^" + std::to_string(bits) + " states exceed the cap of " +
                          std::to_string(caps.states));
}

} // namespace

Optimum<StationaryPolicy> brute_force_stationary_value(const Pomdp& m, const Metric& metric, const Caps& caps)
{
    validate_metric(metric);
    const auto branch = branching_observations(m, reachable_any_action(m));
    const BigInt space = int_pow(m.n_actions(), m.n_obs());
    const BigInt needed = int_pow(m.n_actions(), branch.size());
    if (needed > BigInt(static_cast<unsigned long>(caps.policies)))
        throw CapExceeded("stationary enumeration needs " + needed.get_str() + " policies, cap is " +
                          std::to_string(caps.policies));
    Optimum<StationaryPolicy> best{Rat(0), {}, space, 0};
    std::vector<ActionId> digits(branch.size(), 0);
    do {
        StationaryPolicy p{std::vector<ActionId>(m.n_obs(), 0)};
        for (std::size_t i = 0; i < branch.size(); ++i)
            p.act[branch[i]] = digits[i];
        const Rat v = performance(m, p, metric);
        if (best.evaluated++ == 0 || v > best.value) {
            best.value = v;
            best.witness = std::move(p);
        }
    } while (next_choice(digits, m.n_actions()));
    return best;
}

Optimum<TimeDependentPolicy> brute_force_time_dependent_value(const Pomdp& m, const Metric& metric, const Caps& caps)
{
    const auto h = finite_horizon_or_throw(metric, "brute_force_time_dependent_value");
    TimeDependentSearch search(m, h, discount_of(metric), caps);
    std::vector<Rat> d(m.n_states());
    d[m.initial()] = 1;
    const auto& root = search.solve(0, std::move(d));
    return {root.value, TimeDependentPolicy{root.rows}, int_pow(m.n_actions(), m.n_obs() * h), search.evaluated()};
}

Optimum<TimeDependentPolicy> brute_force_time_dependent_value(const Pomdp& m, std::size_t horizon, const Caps& caps)
{
    return brute_force_time_dependent_value(m, FiniteTotal{horizon}, caps);
}

Rat exact_history_value(const Pomdp& m, const Metric& metric, const Caps& caps)
{
    const auto h = finite_horizon_or_throw(metric, "exact_history_value");
    HistorySearch search(m, h, discount_of(metric), caps);
    std::vector<Rat> b(m.n_states());
    b[m.initial()] = 1;
    return search.solve(0, std::move(b));
}

SatResult sat_enumerate(const Cnf& f, const Caps& caps)
{
    validate_cnf(f);
    if (f.n_vars > caps.sat_vars || f.n_vars >= 63)
        throw CapExceeded("sat_enumerate: " + std::to_string(f.n_vars) + " variables exceed the cap of " +
                          std::to_string(caps.sat_vars));
    SatResult out;
    std::vector<bool> assignment(f.n_vars);
    const std::uint64_t total = std::uint64_t{1} << f.n_vars;
    for (std::uint64_t x = 0; x < total; ++x) {
        for (std::size_t i = 0; i < f.n_vars; ++i)
            assignment[i] = ((x >> (f.n_vars - 1 - i)) & 1u) != 0;
        const auto k = count_satisfied(f, assignment);
        if (x == 0 || k > out.max_satisfied) {
            out.max_satisfied = k;
            out.best_assignment = assignment;
        }
    }
    out.satisfiable = out.max_satisfied == f.clauses.size();
    return out;
}

namespace {

Rat ssat_rec(const SsatFormula& f, std::size_t depth, std::vector<bool>& assignment)
{
    if (depth == f.prefix.size())
        return count_satisfied(f.matrix, assignment) == f.matrix.clauses.size() ? Rat(1) : Rat(0);
    const auto& q = f.prefix[depth];
    assignment[q.var] = false;
    const Rat v0 = ssat_rec(f, depth + 1, assignment);
    assignment[q.var] = true;
    const Rat v1 = ssat_rec(f, depth + 1, assignment);
    assignment[q.var] = false;
    if (q.quantifier == Quantifier::Exists)
        return std::max(v0, v1);
    return (v0 + v1) / Rat(2);
}

} // namespace

Rat ssat_value(const SsatFormula& f, const Caps& caps)
{
    validate_ssat(f);
    if (f.prefix.size() > caps.sat_vars)
        throw CapExceeded("ssat_value: " + std::to_string(f.prefix.size()) + " variables exceed the cap of " +
                          std::to_string(caps.sat_vars));
    std::vector<bool> assignment(f.matrix.n_vars, false);
    return ssat_rec(f, 0, assignment);
}

std::vector<bool> circuit_eval(const Circuit& c)
{
    std::vector<bool> inputs;
    for (const auto g : c.input_gates())
        inputs.push_back(c.gates[g].kind == GateKind::Const1);
    return circuit_eval(c, inputs);
}

std::vector<bool> circuit_eval(const Circuit& c, const std::vector<bool>& inputs)
{
    const auto order = topological_order(c);
    const auto in = c.input_gates();
    if (inputs.size() != in.size())
        throw DomainError("circuit has " + std::to_string(in.size()) + " inputs, got " + std::to_string(inputs.size()));
    std::vector<bool> value(c.gates.size(), false);
    for (std::size_t i = 0; i < in.size(); ++i)
        value[in[i]] = inputs[i];
    for (const auto g : order) {
        const auto& gate = c.gates[g];
        switch (gate.kind) {
        case GateKind::And: value[g] = value[gate.inputs[0]] && value[gate.inputs[1]]; break;
        case GateKind::Or: value[g] = value[gate.inputs[0]] || value[gate.inputs[1]]; break;
        case GateKind::Not: value[g] = !value[gate.inputs[0]]; break;
        case GateKind::Const0:
        case GateKind::Const1: break;
        }
    }
    std::vector<bool> out;
    out.reserve(c.outputs.size());
    for (const auto o : c.outputs)
        out.push_back(value[o]);
    return out;
}

std::vector<std::pair<FluentState, Rat>> tbn_successors(const Tbn& t, const FluentState& state, ActionId a)
{
    if (a >= t.actions.size())
        throw DomainError("2TBN has no action " + std::to_string(a));
    const auto& act = t.actions[a];
    std::vector<std::pair<FluentState, Rat>> partial{{FluentState(t.n_fluents(), false), Rat(1)}};
    for (const auto f : synchronous_order(t, a)) {
        const auto& cpt = act.fluents[f];
        std::vector<std::pair<FluentState, Rat>> next;
        next.reserve(partial.size() * 2);
        for (auto& [bits, p] : partial) {
            std::size_t row = 0;
            for (const auto& par : cpt.parents)
                row = (row << 1) | ((par.synchronous ? bits[par.fluent] : state[par.fluent]) ? 1u : 0u);
            const Rat& one = cpt.prob_one[row];
            if (one != Rat(1)) {
                next.emplace_back(bits, p * (Rat(1) - one));
            }
            if (!one.is_zero()) {
                bits[f] = true;
                next.emplace_back(std::move(bits), p * one);
            }
        }
        partial = std::move(next);
    }
    return partial;
}

Pomdp expand_2tbn(const Tbn& t, const Caps& caps)
{
    validate_tbn(t);
    const std::size_t n = t.n_fluents();
    check_state_cap(n, caps, "expand_2tbn");
    const std::size_t n_states = std::size_t{1} << n;
    Pomdp m(n_states, t.actions.size(), n_states, encode_state(t.initial));
    for (StateId s = 0; s < n_states; ++s) {
        m.set_obs(s, s);
        const auto bits = decode_state(s, n);
        for (ActionId a = 0; a < t.actions.size(); ++a) {
            for (const auto& [next, p] : tbn_successors(t, bits, a))
                m.add_transition(s, a, encode_state(next), p);
            m.set_reward(s, a, t.reward_of(bits, a, caps.states));
        }
    }
    return m;
}

ReachableExpansion expand_2tbn_reachable(const Tbn& t, const Caps& caps)
{
    validate_tbn(t);
    std::map<FluentState, StateId> index;
    std::vector<FluentState> states{t.initial};
    index.emplace(t.initial, 0);
    std::vector<std::vector<std::vector<std::pair<StateId, Rat>>>> rows;
    for (std::size_t i = 0; i < states.size(); ++i) {
        rows.emplace_back(t.actions.size());
        for (ActionId a = 0; a < t.actions.size(); ++a) {
            for (auto& [next, p] : tbn_successors(t, states[i], a)) {
                auto [it, fresh] = index.emplace(next, states.size());
                if (fresh) {
                    if (states.size() >= caps.states)
                        throw CapExceeded("reachable 2TBN expansion exceeds " + std::to_string(caps.states) +
                                          " states");
                    states.push_back(next);
                }
                rows[i][a].emplace_back(it->second, p);
            }
        }
    }
    ReachableExpansion out{Pomdp(states.size(), t.actions.size(), states.size(), 0), states};
    for (StateId s = 0; s < states.size(); ++s) {
        out.model.set_obs(s, s);
        for (ActionId a = 0; a < t.actions.size(); ++a) {
            for (const auto& [to, p] : rows[s][a])
                out.model.add_transition(s, a, to, p);
            out.model.set_reward(s, a, t.reward_of(states[s], a, caps.states));
        }
    }
    return out;
}

std::size_t bits_for(std::uint64_t n_values)
{
    return n_values <= 1 ? 1 : static_cast<std::size_t>(std::bit_width(n_values - 1));
}

Pomdp expand_succinct_mdp(const Circuit& ct, const SuccinctReward& cr, const SuccinctMdpWidths& widths,
                          const Caps& caps)
{
    validate_circuit(ct);
    validate_succinct_reward(cr);
    const std::size_t sb = widths.state_bits, ab = widths.action_bits, fb = widths.fraction_bits;
    const std::size_t ib = bits_for(fb + 1);
    if (ct.input_gates().size() != 2 * sb + ab + ib || ct.outputs.size() != 1)
        throw DomainError("transition circuit must have " + std::to_string(2 * sb + ab + ib) +
                          " inputs and one output");
    if (cr.state_bits != sb || cr.action_bits != ab)
        throw DomainError("reward circuit widths do not match the transition circuit");
    check_state_cap(sb, caps, "expand_succinct_mdp");
    if (ab >= 20 || fb >= 62)
        throw CapExceeded("expand_succinct_mdp: action or fraction width too large");
    const std::size_t n_states = std::size_t{1} << sb;
    const std::size_t n_actions = std::size_t{1} << ab;
    const Rat scale = Rat(BigInt(1), pow2(fb));
    Pomdp m(n_states, n_actions, n_states, 0);
    for (StateId s = 0; s < n_states; ++s) {
        m.set_obs(s, s);
        const auto bits = decode_state(s, sb);
        for (ActionId a = 0; a < n_actions; ++a) {
            Rat sum;
            for (StateId to = 0; to < n_states; ++to) {
                std::uint64_t numer = 0;
                for (std::size_t b = 0; b <= fb; ++b) {
                    std::vector<bool> in;
                    push_bits(in, s, sb);
                    push_bits(in, a, ab);
                    push_bits(in, to, sb);
                    push_bits(in, b, ib);
                    if (circuit_eval(ct, in).at(0))
                        numer |= std::uint64_t{1} << b;
                }
                const Rat p = Rat(numer) * scale;
                if (p > Rat(1))
                    throw DomainError("transition probability " + p.str() + " exceeds 1");
                m.set_transition(s, a, to, p);
                sum += p;
            }
            if (!sum.is_zero() && sum != Rat(1))
                throw DomainError("row (" + std::to_string(s) + "," + std::to_string(a) + ") sums to " + sum.str());
            m.set_reward(s, a, cr.materialize(bits, a, caps.states));
        }
    }
    return m;
}

} // namespace hforge
