#include "hforge/reductions.hpp"

#include "hforge/oracles.hpp"

#include <functional>
#include <limits>

namespace hforge {

namespace {

struct Source {
    std::size_t fluent;
    bool synchronous;
};

FluentCpt truth_table(std::vector<Source> parents, const std::function<Rat(std::size_t)>& row_value)
{
    FluentCpt cpt;
    for (const auto& s : parents)
        cpt.parents.push_back({s.fluent, s.synchronous});
    const std::size_t rows = std::size_t{1} << parents.size();
    cpt.prob_one.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r)
        cpt.prob_one.push_back(row_value(r));
    return cpt;
}

FluentCpt copy_of(Source s)
{
    return truth_table({s}, [](std::size_t r) { return Rat(r & 1u); });
}

std::size_t add_fluent(Tbn& t, std::string name)
{
    t.fluents.push_back(std::move(name));
    for (auto& a : t.actions)
        a.fluents.emplace_back();
    return t.fluents.size() - 1;
}

void set_all_actions(Tbn& t, std::size_t fluent, const FluentCpt& cpt)
{
    for (auto& a : t.actions)
        a.fluents[fluent] = cpt;
}

// Adds one fluent per non-input gate of c, wired synchronously along c's
// wires, with the same deterministic CPT under every action. Returns the
// source holding each gate's value in the next slice.
std::vector<Source> embed_circuit(Tbn& t, const Circuit& c, const std::vector<Source>& inputs, const std::string& prefix)
{
    const auto in = c.input_gates();
    if (inputs.size() != in.size())
        throw DomainError("embedded circuit expects " + std::to_string(in.size()) + " inputs");
    std::vector<Source> at(c.gates.size(), Source{0, false});
    for (std::size_t i = 0; i < in.size(); ++i)
        at[in[i]] = inputs[i];
    for (const auto g : topological_order(c)) {
        const auto& gate = c.gates[g];
        if (is_input(gate.kind))
            continue;
        const std::size_t f = add_fluent(t, prefix + (gate.id.empty() ? "g" + std::to_string(g) : gate.id));
        std::vector<Source> parents;
        for (const auto p : gate.inputs)
            parents.push_back(at[p]);
        std::function<Rat(std::size_t)> fn;
        switch (gate.kind) {
        case GateKind::And: fn = [](std::size_t r) { return Rat(r == 3 ? 1 : 0); }; break;
        case GateKind::Or: fn = [](std::size_t r) { return Rat(r != 0 ? 1 : 0); }; break;
        default: fn = [](std::size_t r) { return Rat(r == 0 ? 1 : 0); }; break;
        }
        set_all_actions(t, f, truth_table(parents, fn));
        at[g] = Source{f, true};
    }
    return at;
}

unsigned code_of(GateKind k)
{
    switch (k) {
    case GateKind::And: return static_cast<unsigned>(GateCode::And);
    case GateKind::Or: return static_cast<unsigned>(GateCode::Or);
    case GateKind::Not: return static_cast<unsigned>(GateCode::Not);
    case GateKind::Const0: return static_cast<unsigned>(GateCode::Input0);
    case GateKind::Const1: return static_cast<unsigned>(GateCode::Input1);
    }
    return 0;
}

std::size_t xor_gate(Circuit& c, std::size_t x, std::size_t y)
{
    const auto both = c.add(GateKind::And, {x, y});
    return c.add(GateKind::And, {c.add(GateKind::Or, {x, y}), c.add(GateKind::Not, {both})});
}

std::size_t and_all(Circuit& c, const std::vector<std::size_t>& terms)
{
    std::size_t acc = terms.at(0);
    for (std::size_t i = 1; i < terms.size(); ++i)
        acc = c.add(GateKind::And, {acc, terms[i]});
    return acc;
}

} // namespace

CircuitTbn circuit_to_2tbn_layout(const Circuit& c)
{
    validate_circuit(c);
    const auto in = c.input_gates();
    const std::size_t n = in.size(), n_out = c.outputs.size();
    const std::size_t w = std::max(n, n_out);
    CircuitTbn out;
    auto& t = out.tbn;
    t.actions.resize(1);
    t.reward = ExplicitReward{};
    for (std::size_t i = 0; i < w; ++i)
        add_fluent(t, "io" + std::to_string(i));
    std::vector<Source> inputs;
    for (std::size_t i = 0; i < n; ++i) {
        inputs.push_back(Source{i, false});
        out.input_fluents.push_back(i);
    }
    const auto at = embed_circuit(t, c, inputs, "");
    for (std::size_t i = 0; i < w; ++i) {
        if (i < n_out) {
            set_all_actions(t, i, copy_of(at[c.outputs[i]]));
            out.output_fluents.push_back(i);
        } else {
            set_all_actions(t, i, copy_of(Source{i, false}));
        }
    }
    for (const auto& s : at)
        out.gate_fluents.push_back(s.fluent);
    t.initial.assign(t.n_fluents(), false);
    return out;
}

Tbn circuit_to_2tbn(const Circuit& c)
{
    return circuit_to_2tbn_layout(c).tbn;
}

SuccinctFluents succinct_fluents(std::size_t index_bits)
{
    SuccinctFluents f;
    for (std::size_t b = 0; b < index_bits; ++b)
        f.gate_bits.push_back(b);
    f.parity = index_bits;
    f.type_bits = {index_bits + 1, index_bits + 2, index_bits + 3};
    f.random = index_bits + 4;
    return f;
}

GadgetOutput succinct_cvp_to_2tbn(const SuccinctCircuitInstance& s, const SuccinctOptions& options)
{
    validate_succinct_instance(s);
    const std::size_t l = s.index_bits;
    const auto lay = succinct_fluents(l);
    Tbn t;
    t.actions.resize(2);
    for (std::size_t b = 0; b < l; ++b)
        add_fluent(t, "i" + std::to_string(b));
    add_fluent(t, "p");
    for (std::size_t b = 0; b < kGateCodeBits; ++b)
        add_fluent(t, "t" + std::to_string(b));
    add_fluent(t, "r");
    const std::size_t sel = add_fluent(t, "sel");
    const std::size_t k1 = add_fluent(t, "k1");

    const auto type_of = [](std::size_t row_bits) {
        // row_bits holds t0 t1 t2 with t0 most significant.
        return static_cast<unsigned>(((row_bits >> 2) & 1u) | (((row_bits >> 1) & 1u) << 1) | ((row_bits & 1u) << 2));
    };
    const auto is_random = [](unsigned p, unsigned type) {
        return (type == static_cast<unsigned>(GateCode::Or) && p == 1) ||
               (type == static_cast<unsigned>(GateCode::And) && p == 0);
    };
    const auto is_chooser = [](unsigned p, unsigned type) {
        return (type == static_cast<unsigned>(GateCode::Or) && p == 0) ||
               (type == static_cast<unsigned>(GateCode::And) && p == 1);
    };
    const auto is_gate = [](unsigned type) { return type >= 1 && type <= 3; };

    const Source p_src{lay.parity, false};
    std::vector<Source> state_parents{p_src};
    for (const auto b : lay.type_bits)
        state_parents.push_back(Source{b, false});

    // r': fair coin exactly in the random cases.
    set_all_actions(t, lay.random, truth_table(state_parents, [&](std::size_t row) {
                        return is_random(static_cast<unsigned>(row >> 3), type_of(row & 7u)) ? Rat(BigInt(1), BigInt(2))
                                                                                            : Rat(1);
                    }));
    // Selector fed to S: the action, the random bit, or 0.
    for (ActionId a = 0; a < 2; ++a) {
        auto parents = state_parents;
        parents.push_back(Source{lay.random, true});
        t.actions[a].fluents[sel] = truth_table(parents, [&, a](std::size_t row) {
            const unsigned p = static_cast<unsigned>(row >> 4);
            const unsigned type = type_of((row >> 1) & 7u);
            if (is_chooser(p, type))
                return Rat(a);
            if (is_random(p, type))
                return Rat(row & 1u);
            return Rat(0);
        });
    }
    set_all_actions(t, k1, truth_table({}, [](std::size_t) { return Rat(0); }));

    std::vector<Source> s_inputs;
    for (std::size_t b = 0; b < l; ++b)
        s_inputs.push_back(Source{lay.gate_bits[b], false});
    s_inputs.push_back(Source{sel, true});
    s_inputs.push_back(Source{k1, true});
    const auto at = embed_circuit(t, s.circuit, s_inputs, "S.");

    // i' and t' copy S's outputs while at an AND/OR/NOT gate, else go to the sink.
    std::vector<Source> type_parents(state_parents.begin() + 1, state_parents.end());
    const auto masked_copy = [&](std::size_t fluent, Source value) {
        auto parents = type_parents;
        parents.push_back(value);
        set_all_actions(t, fluent, truth_table(parents, [&](std::size_t row) {
                            return is_gate(type_of(row >> 1)) ? Rat(row & 1u) : Rat(0);
                        }));
    };
    for (std::size_t b = 0; b < l; ++b)
        masked_copy(lay.gate_bits[b], at[s.circuit.outputs[b]]);
    for (std::size_t b = 0; b < kGateCodeBits; ++b)
        masked_copy(lay.type_bits[b], at[s.circuit.outputs[l + b]]);
    set_all_actions(t, lay.parity, truth_table(state_parents, [&](std::size_t row) {
                        const unsigned p = static_cast<unsigned>(row >> 3);
                        const unsigned type = type_of(row & 7u);
                        if (type == static_cast<unsigned>(GateCode::Not))
                            return Rat(1 - p);
                        return is_gate(type) ? Rat(p) : Rat(0);
                    }));

    const auto start = query_neighbor(s, 0, 2);
    t.initial.assign(t.n_fluents(), false);
    for (std::size_t b = 0; b < l; ++b)
        t.initial[lay.gate_bits[b]] = ((start.gate >> b) & 1u) != 0;
    for (std::size_t b = 0; b < kGateCodeBits; ++b)
        t.initial[lay.type_bits[b]] = ((static_cast<unsigned>(start.type) >> b) & 1u) != 0;
    t.initial[lay.random] = true;

    // Reward circuit: bit E of the reward is set exactly at paying states.
    BigInt exponent;
    std::size_t index_bits;
    if (options.test_exponent) {
        exponent = BigInt(static_cast<unsigned long>(*options.test_exponent));
        index_bits = bits_for(*options.test_exponent + 1);
    } else {
        const std::size_t e = s.circuit.gates.size() + options.k_gap + 1;
        exponent = pow2(e);
        index_bits = e + 1;
    }
    SuccinctReward rw;
    rw.state_bits = t.n_fluents();
    rw.action_bits = 1;
    rw.index_bits = index_bits;
    rw.width = exponent + 1;
    auto& rc = rw.circuit;
    std::vector<std::size_t> in;
    for (std::size_t f = 0; f < t.n_fluents(); ++f)
        in.push_back(rc.add(GateKind::Const0, {}, "s." + t.fluents[f]));
    rc.add(GateKind::Const0, {}, "a");
    std::vector<std::size_t> idx;
    for (std::size_t b = 0; b < index_bits; ++b)
        idx.push_back(rc.add(GateKind::Const0, {}, "b" + std::to_string(b)));
    const auto t0 = in[lay.type_bits[0]], t1 = in[lay.type_bits[1]], t2 = in[lay.type_bits[2]];
    const auto input_gate = rc.add(GateKind::And, {t2, rc.add(GateKind::Not, {t1})});
    const auto pays = rc.add(GateKind::And, {input_gate, xor_gate(rc, t0, in[lay.parity])});
    std::vector<std::size_t> match{pays};
    for (std::size_t b = 0; b < index_bits; ++b)
        match.push_back(mpz_tstbit(exponent.get_mpz_t(), b) ? idx[b] : rc.add(GateKind::Not, {idx[b]}));
    rc.outputs = {and_all(rc, match)};
    t.reward = std::move(rw);
    validate_tbn(t);

    GadgetOutput g;
    g.recommended_horizon = l >= 62 ? std::numeric_limits<std::size_t>::max() : (std::size_t{2} << l) + 1;
    g.recommended_metric = FiniteTotal{g.recommended_horizon};
    g.claim.policy_class = PolicyClass::Stationary;
    g.claim.yes_bound = Bound::Equal;
    g.claim.no_bound = Bound::AtMost;
    const std::string e_text = exponent.get_str();
    g.claim.text = "stationary value = 2^" + e_text + " if yes, <= 2^" + e_text + " - " +
                   std::to_string(2 * options.k_gap) + " if no";
    if (exponent <= 1 << 16) {
        const Rat top(pow2(exponent.get_ui()));
        g.claim.yes_value = top;
        g.claim.no_value = top - Rat(static_cast<unsigned long>(2 * options.k_gap));
    }
    g.model = std::move(t);
    return g;
}

SuccinctCircuitInstance synthesize_succinct_instance(const Circuit& c)
{
    validate_circuit(c);
    if (c.outputs.size() != 1)
        throw DomainError("circuit must have exactly one output");
    const std::size_t n = c.gates.size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (std::size_t h = 0; h < n; ++h)
        for (const auto g : c.gates[h].inputs)
            succ[g].push_back(h);
    for (std::size_t g = 0; g < n; ++g)
        if (succ[g].size() > 2)
            throw DomainError("gate " + std::to_string(g) + " has out-degree " + std::to_string(succ[g].size()) +
                              "; normalize the circuit first");
    const std::size_t l = bits_for(n + 1);
    const auto word = [&](std::size_t i, std::size_t k) -> std::uint64_t {
        std::uint64_t j = 0;
        unsigned code = 0;
        if (i == 0) {
            if (k == 2) {
                j = c.outputs[0] + 1;
                code = code_of(c.gates[c.outputs[0]].kind);
            }
        } else if (i <= n) {
            const auto& gate = c.gates[i - 1];
            const auto& list = k < 2 ? gate.inputs : succ[i - 1];
            const std::size_t pos = k < 2 ? k : k - 2;
            if (pos < list.size()) {
                j = list[pos] + 1;
                code = code_of(c.gates[list[pos]].kind);
            }
        }
        return j | (static_cast<std::uint64_t>(code) << l);
    };

    SuccinctCircuitInstance out;
    out.index_bits = l;
    auto& s = out.circuit;
    std::vector<std::size_t> in, neg;
    for (std::size_t b = 0; b < l; ++b)
        in.push_back(s.add(GateKind::Const0, {}, "i" + std::to_string(b)));
    in.push_back(s.add(GateKind::Const0, {}, "k0"));
    in.push_back(s.add(GateKind::Const0, {}, "k1"));
    for (const auto x : in)
        neg.push_back(s.add(GateKind::Not, {x}));
    const std::size_t out_bits = l + kGateCodeBits;
    std::vector<std::vector<std::size_t>> terms(out_bits);
    for (std::size_t i = 0; i < (std::size_t{1} << l); ++i) {
        for (std::size_t k = 0; k < 4; ++k) {
            const auto w = word(i, k);
            if (w == 0)
                continue;
            const std::uint64_t row = i | (k << l);
            std::vector<std::size_t> lits;
            for (std::size_t b = 0; b < in.size(); ++b)
                lits.push_back(((row >> b) & 1u) ? in[b] : neg[b]);
            const auto minterm = and_all(s, lits);
            for (std::size_t b = 0; b < out_bits; ++b)
                if ((w >> b) & 1u)
                    terms[b].push_back(minterm);
        }
    }
    std::optional<std::size_t> zero;
    for (std::size_t b = 0; b < out_bits; ++b) {
        if (terms[b].empty()) {
            if (!zero)
                zero = s.add(GateKind::And, {in[0], neg[0]});
            s.outputs.push_back(*zero);
            continue;
        }
        std::size_t acc = terms[b][0];
        for (std::size_t i = 1; i < terms[b].size(); ++i)
            acc = s.add(GateKind::Or, {acc, terms[b][i]});
        s.outputs.push_back(acc);
    }
    return out;
}

Circuit normalize_out_degree(const Circuit& c)
{
    validate_circuit(c);
    Circuit out = c;
    const std::size_t n = c.gates.size();
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edges(n);
    for (std::size_t h = 0; h < n; ++h)
        for (std::size_t slot = 0; slot < c.gates[h].inputs.size(); ++slot)
            edges[c.gates[h].inputs[slot]].emplace_back(h, slot);
    for (std::size_t g = 0; g < n; ++g) {
        auto& e = edges[g];
        if (e.size() <= 2)
            continue;
        std::size_t cur = g, next = 0, buffers = 0;
        const std::string base = c.gates[g].id.empty() ? "g" + std::to_string(g) : c.gates[g].id;
        while (e.size() - next > 2) {
            out.gates[e[next].first].inputs[e[next].second] = cur;
            ++next;
            const auto inv = out.add(GateKind::Not, {cur}, base + ".n" + std::to_string(buffers));
            cur = out.add(GateKind::Not, {inv}, base + ".b" + std::to_string(buffers));
            ++buffers;
        }
        for (; next < e.size(); ++next)
            out.gates[e[next].first].inputs[e[next].second] = cur;
    }
    return out;
}

} // namespace hforge
