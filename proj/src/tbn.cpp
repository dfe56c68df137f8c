#include "hforge/tbn.hpp"

#include "hforge/errors.hpp"
#include "hforge/oracles.hpp"

namespace hforge {

namespace {

void push_bits(std::vector<bool>& out, std::uint64_t value, std::size_t width)
{
    for (std::size_t b = 0; b < width; ++b)
        out.push_back(((value >> b) & 1u) != 0);
}

} // namespace

bool SuccinctReward::bit(const FluentState& state, ActionId action, const BigInt& index) const
{
    if (index < 0 || index >= width)
        return false;
    if (index_bits < 64 && index >= pow2(index_bits))
        return false;
    if (state.size() != state_bits)
        throw DomainError("reward circuit: state has " + std::to_string(state.size()) + " bits, expected " +
                          std::to_string(state_bits));
    std::vector<bool> inputs(state.begin(), state.end());
    push_bits(inputs, action, action_bits);
    for (std::size_t b = 0; b < index_bits; ++b)
        inputs.push_back(mpz_tstbit(index.get_mpz_t(), b) != 0);
    return circuit_eval(circuit, inputs).at(0);
}

Rat SuccinctReward::materialize(const FluentState& state, ActionId action, std::uint64_t max_bits) const
{
    if (width > BigInt(static_cast<unsigned long>(max_bits)))
        throw CapExceeded("reward has " + width.get_str() + " bits, cap is " + std::to_string(max_bits));
    BigInt value = 0;
    const auto w = width.get_ui();
    for (unsigned long b = 0; b < w; ++b)
        if (bit(state, action, BigInt(b)))
            mpz_setbit(value.get_mpz_t(), b);
    return Rat(value);
}

void validate_succinct_reward(const SuccinctReward& r)
{
    validate_circuit(r.circuit);
    const auto n_in = r.circuit.input_gates().size();
    if (n_in != r.state_bits + r.action_bits + r.index_bits)
        throw DomainError("reward circuit has " + std::to_string(n_in) + " inputs, expected " +
                          std::to_string(r.state_bits + r.action_bits + r.index_bits));
    if (r.circuit.outputs.size() != 1)
        throw DomainError("reward circuit must have exactly one output");
    if (r.width < 0)
        throw DomainError("reward width must be non-negative");
    if (r.index_bits < 64 && r.width > pow2(r.index_bits))
        throw DomainError("reward width exceeds what the index bits can address");
}

Rat Tbn::reward_of(const FluentState& state, ActionId action, std::uint64_t max_bits) const
{
    if (const auto* e = std::get_if<ExplicitReward>(&reward)) {
        const auto it = e->entries.find({state, action});
        return it == e->entries.end() ? Rat(0) : it->second;
    }
    return std::get<SuccinctReward>(reward).materialize(state, action, max_bits);
}

std::vector<std::size_t> synchronous_order(const Tbn& t, ActionId a)
{
    const auto& act = t.actions.at(a);
    const std::size_t n = t.n_fluents();
    std::vector<int> mark(n, 0);
    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t root = 0; root < n; ++root) {
        if (mark[root])
            continue;
        mark[root] = 1;
        stack.emplace_back(root, 0);
        while (!stack.empty()) {
            auto& [f, next] = stack.back();
            const auto& parents = act.fluents[f].parents;
            while (next < parents.size() && !parents[next].synchronous)
                ++next;
            if (next < parents.size()) {
                const std::size_t p = parents[next++].fluent;
                if (mark[p] == 1)
                    throw DomainError("synchronous cycle through fluent " + t.fluents[p] + " under action " +
                                      std::to_string(a));
                if (mark[p] == 0) {
                    mark[p] = 1;
                    stack.emplace_back(p, 0);
                }
            } else {
                mark[f] = 2;
                order.push_back(f);
                stack.pop_back();
            }
        }
    }
    return order;
}

void validate_tbn(const Tbn& t)
{
    const std::size_t n = t.n_fluents();
    if (t.actions.empty())
        throw DomainError("2TBN has no actions");
    if (t.initial.size() != n)
        throw DomainError("2TBN initial state has " + std::to_string(t.initial.size()) + " bits, expected " +
                          std::to_string(n));
    for (std::size_t a = 0; a < t.actions.size(); ++a) {
        const auto& act = t.actions[a];
        if (act.fluents.size() != n)
            throw DomainError("action " + std::to_string(a) + " specifies " + std::to_string(act.fluents.size()) +
                              " fluents, expected " + std::to_string(n));
        for (std::size_t f = 0; f < n; ++f) {
            const auto& cpt = act.fluents[f];
            for (const auto& p : cpt.parents)
                if (p.fluent >= n)
                    throw DomainError("fluent " + t.fluents[f] + " has an out-of-range parent");
            if (cpt.parents.size() >= 24 || cpt.prob_one.size() != (std::size_t{1} << cpt.parents.size()))
                throw DomainError("fluent " + t.fluents[f] + " has a CPT of the wrong size under action " +
                                  std::to_string(a));
            for (const auto& p : cpt.prob_one)
                if (p < 0 || p > 1)
                    throw DomainError("CPT entry " + p.str() + " of fluent " + t.fluents[f] + " outside [0,1]");
        }
        synchronous_order(t, a);
    }
    if (const auto* s = std::get_if<SuccinctReward>(&t.reward)) {
        validate_succinct_reward(*s);
        if (s->state_bits != n)
            throw DomainError("reward circuit reads " + std::to_string(s->state_bits) + " state bits, 2TBN has " +
                              std::to_string(n) + " fluents");
        if (s->action_bits < 64 && (std::uint64_t{1} << s->action_bits) < t.actions.size())
            throw DomainError("reward circuit has too few action bits");
    } else {
        for (const auto& [key, value] : std::get<ExplicitReward>(t.reward).entries) {
            if (key.first.size() != n || key.second >= t.actions.size())
                throw DomainError("reward entry does not match the 2TBN shape");
        }
    }
}

std::uint64_t encode_state(const FluentState& s)
{
    if (s.size() > 63)
        throw CapExceeded("state with " + std::to_string(s.size()) + " fluents cannot be indexed densely");
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i])
            out |= std::uint64_t{1} << i;
    return out;
}

FluentState decode_state(std::uint64_t index, std::size_t n_fluents)
{
    FluentState s(n_fluents);
    for (std::size_t i = 0; i < n_fluents; ++i)
        s[i] = ((index >> i) & 1u) != 0;
    return s;
}

void validate_succinct_instance(const SuccinctCircuitInstance& s)
{
    validate_circuit(s.circuit);
    if (s.index_bits == 0 || s.index_bits > 32)
        throw DomainError("succinct instance: index width must be between 1 and 32");
    const auto n_in = s.circuit.input_gates().size();
    if (n_in != s.index_bits + kNeighborBits)
        throw DomainError("succinct instance: circuit has " + std::to_string(n_in) + " inputs, expected " +
                          std::to_string(s.index_bits + kNeighborBits));
    if (s.circuit.outputs.size() != s.index_bits + kGateCodeBits)
        throw DomainError("succinct instance: circuit has " + std::to_string(s.circuit.outputs.size()) +
                          " outputs, expected " + std::to_string(s.index_bits + kGateCodeBits));
}

NeighborQuery query_neighbor(const SuccinctCircuitInstance& s, std::uint64_t gate, unsigned selector)
{
    std::vector<bool> in;
    push_bits(in, gate, s.index_bits);
    push_bits(in, selector, kNeighborBits);
    const auto out = circuit_eval(s.circuit, in);
    std::uint64_t j = 0;
    for (std::size_t b = 0; b < s.index_bits; ++b)
        if (out[b])
            j |= std::uint64_t{1} << b;
    unsigned code = 0;
    for (std::size_t b = 0; b < kGateCodeBits; ++b)
        if (out[s.index_bits + b])
            code |= 1u << b;
    if (code > static_cast<unsigned>(GateCode::Input1))
        throw DomainError("succinct instance produced unknown gate code " + std::to_string(code));
    return {j, static_cast<GateCode>(code)};
}

} // namespace hforge
