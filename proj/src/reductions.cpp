#include "hforge/reductions.hpp"

#include <algorithm>
#include <numeric>

namespace hforge {

std::string to_string(PolicyClass c)
{
    switch (c) {
    case PolicyClass::Stationary: return "stationary";
    case PolicyClass::TimeDependent: return "time-dependent";
    case PolicyClass::History: return "history-dependent";
    }
    return "?";
}

std::string to_string(Bound b)
{
    switch (b) {
    case Bound::Equal: return "=";
    case Bound::AtMost: return "<=";
    case Bound::AtLeast: return ">=";
    case Bound::Greater: return ">";
    case Bound::Less: return "<";
    }
    return "?";
}

bool satisfies_bound(const Rat& value, Bound b, const Rat& reference)
{
    switch (b) {
    case Bound::Equal: return value == reference;
    case Bound::AtMost: return value <= reference;
    case Bound::AtLeast: return value >= reference;
    case Bound::Greater: return value > reference;
    case Bound::Less: return value < reference;
    }
    return false;
}

bool ValueClaim::holds_for_yes(const Rat& value) const
{
    if (!yes_value)
        throw DomainError("claim value is not materialised: " + text);
    return satisfies_bound(value, yes_bound, *yes_value);
}

bool ValueClaim::holds_for_no(const Rat& value) const
{
    if (!no_value)
        throw DomainError("claim value is not materialised: " + text);
    return satisfies_bound(value, no_bound, *no_value);
}

const Pomdp& GadgetOutput::pomdp() const
{
    if (const auto* p = std::get_if<Pomdp>(&model))
        return *p;
    throw DomainError("gadget is a 2TBN, not a flat POMDP");
}

const Tbn& GadgetOutput::tbn() const
{
    if (const auto* t = std::get_if<Tbn>(&model))
        return *t;
    throw DomainError("gadget is a flat POMDP, not a 2TBN");
}

namespace {

ValueClaim make_claim(PolicyClass pc, Rat yes, Bound yb, Rat no, Bound nb)
{
    ValueClaim c{pc, yes, yb, no, nb, {}};
    c.text = to_string(pc) + " value " + to_string(yb) + " " + yes.str() + " if yes, " + to_string(nb) + " " +
             no.str() + " if no";
    return c;
}

void require_clauses(const Cnf& f)
{
    validate_cnf(f);
    if (f.clauses.empty())
        throw DomainError("formula has no clauses");
}

std::string var_name(std::size_t v) { return "x" + std::to_string(v + 1); }

// Clause walk with configurable rewards on entering T and F.
GadgetOutput clause_walk(const Cnf& f, const Rat& enter_t, const Rat& enter_f)
{
    require_clauses(f);
    std::vector<std::size_t> first(f.clauses.size());
    std::size_t n_lit = 0;
    for (std::size_t j = 0; j < f.clauses.size(); ++j) {
        first[j] = n_lit;
        n_lit += f.clauses[j].size();
    }
    const StateId sf = n_lit, st = n_lit + 1;
    const ObsId of = f.n_vars, ot = f.n_vars + 1;
    Pomdp m(n_lit + 2, 2, f.n_vars + 2, 0);
    m.state_labels.resize(n_lit + 2);
    m.obs_labels.resize(f.n_vars + 2);
    for (std::size_t v = 0; v < f.n_vars; ++v)
        m.obs_labels[v] = var_name(v);
    m.obs_labels[of] = "F";
    m.obs_labels[ot] = "T";
    m.action_labels = {"0", "1"};
    for (std::size_t j = 0; j < f.clauses.size(); ++j) {
        const auto& clause = f.clauses[j];
        for (std::size_t i = 0; i < clause.size(); ++i) {
            const StateId s = first[j] + i;
            const auto& lit = clause[i];
            m.set_obs(s, lit.var);
            m.state_labels[s] = "(" + var_name(lit.var) + ",C" + std::to_string(j + 1) + ")";
            const ActionId sat_action = lit.positive ? 1 : 0;
            const StateId on_sat = j + 1 < f.clauses.size() ? first[j + 1] : st;
            const StateId on_fail = i + 1 < clause.size() ? s + 1 : sf;
            m.set_transition(s, sat_action, on_sat, 1);
            m.set_transition(s, 1 - sat_action, on_fail, 1);
            if (on_sat == st)
                m.set_reward(s, sat_action, enter_t);
            if (on_fail == sf)
                m.set_reward(s, 1 - sat_action, enter_f);
        }
    }
    m.set_obs(sf, of);
    m.set_obs(st, ot);
    m.state_labels[sf] = "F";
    m.state_labels[st] = "T";
    for (ActionId a = 0; a < 2; ++a) {
        m.set_transition(sf, a, sf, 1);
        m.set_transition(st, a, st, 1);
    }
    GadgetOutput g;
    g.recommended_horizon = m.n_states();
    g.recommended_metric = FiniteTotal{m.n_states()};
    g.model = std::move(m);
    return g;
}

bool appears_with_signum(const Clause& c, std::size_t var, ActionId a)
{
    return std::any_of(c.begin(), c.end(), [&](const Literal& l) { return l.var == var && l.positive == (a == 1); });
}

} // namespace

GadgetOutput threesat_to_pomdp(const Cnf& f)
{
    auto g = clause_walk(f, Rat(1), Rat(0));
    g.claim = make_claim(PolicyClass::Stationary, Rat(1), Bound::Equal, Rat(0), Bound::Equal);
    return g;
}

GadgetOutput epsilon_gap_gadget(const Cnf& f, const Rat& eps)
{
    if (eps < Rat(0) || eps >= Rat(1))
        throw DomainError("epsilon must lie in [0,1), got " + eps.str());
    const Rat top(ceil(Rat(2) / (Rat(1) - eps)));
    auto g = clause_walk(f, top, Rat(1));
    g.claim = make_claim(PolicyClass::Stationary, top, Bound::Equal, Rat(1), Bound::Equal);
    return g;
}

GadgetOutput threesat_to_uomdp(const Cnf& f)
{
    require_clauses(f);
    const std::size_t n = f.n_vars, mc = f.clauses.size();
    if (n == 0)
        throw DomainError("formula has no variables");
    // s0 = 0, (i,j) = 1 + i*m + j, sat_i = 1 + n*m + i, T, F.
    const auto cell = [&](std::size_t i, std::size_t j) { return 1 + i * mc + j; };
    const auto sat = [&](std::size_t i) { return 1 + n * mc + i; };
    const StateId st = 1 + n * mc + n, sf = st + 1;
    Pomdp m(sf + 1, 2, 1, 0);
    m.obs_labels = {"*"};
    m.action_labels = {"0", "1"};
    m.state_labels.resize(sf + 1);
    m.state_labels[0] = "s0";
    m.state_labels[st] = "T";
    m.state_labels[sf] = "F";
    const Rat reward(static_cast<unsigned long>(mc));
    for (ActionId a = 0; a < 2; ++a) {
        for (std::size_t j = 0; j < mc; ++j)
            m.set_transition(0, a, cell(0, j), Rat(BigInt(1), BigInt(static_cast<unsigned long>(mc))));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < mc; ++j) {
                const StateId s = cell(i, j);
                const bool hit = appears_with_signum(f.clauses[j], i, a);
                if (i + 1 < n) {
                    m.set_transition(s, a, hit ? sat(i + 1) : cell(i + 1, j), 1);
                } else {
                    m.set_transition(s, a, hit ? st : sf, 1);
                    if (hit)
                        m.set_reward(s, a, reward);
                }
            }
            if (i + 1 < n) {
                m.set_transition(sat(i), a, sat(i + 1), 1);
            } else {
                m.set_transition(sat(i), a, st, 1);
                m.set_reward(sat(i), a, reward);
            }
        }
        m.set_transition(st, a, st, 1);
        m.set_transition(sf, a, sf, 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < mc; ++j)
            m.state_labels[cell(i, j)] = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
        m.state_labels[sat(i)] = "sat" + std::to_string(i + 1);
    }
    GadgetOutput g;
    g.recommended_horizon = n + 1;
    g.recommended_metric = FiniteTotal{n + 1};
    g.claim = make_claim(PolicyClass::TimeDependent, reward, Bound::Equal, reward - Rat(1), Bound::AtMost);
    g.claim.text += "; value equals the maximum number of simultaneously satisfiable clauses";
    g.model = std::move(m);
    return g;
}

GadgetOutput amplify_uomdp(const Cnf& f, const std::optional<Rat>& discount)
{
    require_clauses(f);
    const std::size_t n = f.n_vars, mc = f.clauses.size();
    if (n == 0)
        throw DomainError("formula has no variables");
    if (discount && (*discount <= Rat(0) || *discount >= Rat(1)))
        throw DomainError("discount must lie in (0,1), got " + discount->str());
    const std::size_t copies = mc * mc;
    const std::size_t per_copy = 1 + n * mc + n;
    // Copy c occupies [c*per_copy, (c+1)*per_copy): s0, (i,j), sat_i.
    const StateId final_t = copies * per_copy, sf = final_t + 1;
    const auto base = [&](std::size_t c) { return c * per_copy; };
    const auto cell = [&](std::size_t c, std::size_t i, std::size_t j) { return base(c) + 1 + i * mc + j; };
    const auto sat = [&](std::size_t c, std::size_t i) { return base(c) + 1 + n * mc + i; };
    const auto exit_t = [&](std::size_t c) { return c + 1 < copies ? base(c + 1) : final_t; };
    const std::size_t steps = copies * (n + 1);
    Pomdp m(sf + 1, 2, 1, 0);
    m.obs_labels = {"*"};
    m.action_labels = {"0", "1"};
    m.state_labels.resize(sf + 1);
    for (std::size_t c = 0; c < copies; ++c) {
        const std::string tag = "#" + std::to_string(c + 1);
        m.state_labels[base(c)] = "s0" + tag;
        for (std::size_t i = 0; i < n; ++i) {
            m.state_labels[sat(c, i)] = "sat" + std::to_string(i + 1) + tag;
            for (std::size_t j = 0; j < mc; ++j)
                m.state_labels[cell(c, i, j)] =
                    "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")" + tag;
        }
        for (ActionId a = 0; a < 2; ++a) {
            for (std::size_t j = 0; j < mc; ++j)
                m.set_transition(base(c), a, cell(c, 0, j), Rat(BigInt(1), BigInt(static_cast<unsigned long>(mc))));
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < mc; ++j) {
                    const bool hit = appears_with_signum(f.clauses[j], i, a);
                    const StateId to = i + 1 < n ? (hit ? sat(c, i + 1) : cell(c, i + 1, j)) : (hit ? exit_t(c) : sf);
                    m.set_transition(cell(c, i, j), a, to, 1);
                }
                m.set_transition(sat(c, i), a, i + 1 < n ? sat(c, i + 1) : exit_t(c), 1);
            }
        }
    }
    const Rat reward = discount ? pow(*discount, -static_cast<long>(steps)) : Rat(1);
    m.state_labels[final_t] = "T";
    m.state_labels[sf] = "F";
    for (ActionId a = 0; a < 2; ++a) {
        m.set_transition(final_t, a, sf, 1);
        m.set_reward(final_t, a, reward);
        m.set_transition(sf, a, sf, 1);
    }
    GadgetOutput g;
    g.recommended_horizon = steps + 1;
    if (discount)
        g.recommended_metric = FiniteDiscounted{*discount, steps + 1};
    else
        g.recommended_metric = FiniteTotal{steps + 1};
    const Rat miss = Rat(1) - Rat(BigInt(1), BigInt(static_cast<unsigned long>(mc)));
    g.claim = make_claim(PolicyClass::TimeDependent, Rat(1), Bound::Equal, pow(miss, static_cast<long>(copies)),
                         Bound::AtMost);
    g.model = std::move(m);
    return g;
}

namespace {

GadgetOutput build_ssat(const SsatFormula& f, unsigned c, std::size_t k)
{
    validate_ssat(f);
    if (k < 1)
        throw DomainError("number of copies must be at least 1");
    const auto& cnf = f.matrix;
    require_clauses(cnf);
    const std::size_t n = f.prefix.size();
    if (n == 0)
        throw DomainError("SSAT formula has no quantified variables");
    std::vector<std::size_t> position(cnf.n_vars, 0);
    for (std::size_t t = 0; t < n; ++t)
        position[f.prefix[t].var] = t;
    std::vector<std::size_t> first(cnf.clauses.size());
    std::size_t n_lit = 0;
    for (std::size_t j = 0; j < cnf.clauses.size(); ++j) {
        first[j] = n_lit;
        n_lit += cnf.clauses[j].size();
    }

    // Observations.
    const ObsId o_start = 0, o_stage1 = 1, o_bit0 = 2;
    const ObsId o_pos = 4, o_end = o_pos + n_lit, o_cheat = o_end + 1;

    // Per block (x, b): ask states for t = 1..n-1 with previous bit (2 each),
    // the storage state (ask t = 0), two tail states, n_lit literal states.
    const std::size_t ask_count = 1 + 2 * (n - 1);
    const std::size_t block = ask_count + 2 + n_lit;
    const std::size_t per_copy = 1 + 2 * n * block; // s0 plus blocks
    const StateId last_end = k * per_copy, cheat = last_end + 1;
    const auto s0 = [&](std::size_t q) { return q * per_copy; };
    const auto s_end = [&](std::size_t q) { return q + 1 < k ? s0(q + 1) : last_end; };
    const auto block_base = [&](std::size_t q, std::size_t x, std::size_t b) {
        return s0(q) + 1 + (2 * x + b) * block;
    };
    const auto ask = [&](std::size_t q, std::size_t x, std::size_t b, std::size_t t, std::size_t prev) {
        return t == 0 ? block_base(q, x, b) : block_base(q, x, b) + 1 + 2 * (t - 1) + prev;
    };
    const auto tail = [&](std::size_t q, std::size_t x, std::size_t b, std::size_t bit) {
        return block_base(q, x, b) + ask_count + bit;
    };
    const auto lit = [&](std::size_t q, std::size_t x, std::size_t b, std::size_t idx) {
        return block_base(q, x, b) + ask_count + 2 + idx;
    };

    Pomdp m(cheat + 1, 2, o_cheat + 1, 0);
    m.action_labels = {"0", "1"};
    m.obs_labels.resize(o_cheat + 1);
    m.obs_labels[o_start] = "start";
    m.obs_labels[o_stage1] = "stage1";
    m.obs_labels[o_bit0] = "bit0";
    m.obs_labels[o_bit0 + 1] = "bit1";
    for (std::size_t j = 0; j < cnf.clauses.size(); ++j)
        for (std::size_t i = 0; i < cnf.clauses[j].size(); ++i)
            m.obs_labels[o_pos + first[j] + i] = "pos" + std::to_string(j + 1) + "." + std::to_string(i + 1);
    m.obs_labels[o_end] = "end";
    m.obs_labels[o_cheat] = "cheat";
    m.state_labels.resize(cheat + 1);

    const Rat fan(BigInt(1), BigInt(static_cast<unsigned long>(2 * n)));
    const Rat half(BigInt(1), BigInt(2));
    for (std::size_t q = 0; q < k; ++q) {
        const std::string tag = "#" + std::to_string(q + 1);
        m.set_obs(s0(q), o_start);
        m.state_labels[s0(q)] = "s0" + tag;
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t b = 0; b < 2; ++b) {
                const std::string name = "x" + std::to_string(f.prefix[x].var + 1) + "=" + std::to_string(b);
                for (ActionId a = 0; a < 2; ++a)
                    m.set_transition(s0(q), a, ask(q, x, b, 0, 0), fan);
                // Stage 2.
                for (std::size_t t = 0; t < n; ++t) {
                    for (std::size_t prev = 0; prev < (t == 0 ? 1u : 2u); ++prev) {
                        const StateId s = ask(q, x, b, t, prev);
                        m.set_obs(s, t == 0 ? o_stage1 : o_bit0 + prev);
                        m.state_labels[s] = t == 0 ? name + tag
                                                   : "A[" + name + "]v" + std::to_string(t + 1) + "|" +
                                                         std::to_string(prev) + tag;
                        for (ActionId a = 0; a < 2; ++a) {
                            const bool random = f.prefix[t].quantifier == Quantifier::Random;
                            for (std::size_t val = 0; val < 2; ++val) {
                                if (!random && val != a)
                                    continue;
                                const Rat p = random ? half : Rat(1);
                                StateId to;
                                if (t == x && val != b)
                                    to = s_end(q);
                                else if (t + 1 < n)
                                    to = ask(q, x, b, t + 1, val);
                                else
                                    to = tail(q, x, b, val);
                                m.add_transition(s, a, to, p);
                            }
                        }
                    }
                }
                for (std::size_t bit = 0; bit < 2; ++bit) {
                    const StateId s = tail(q, x, b, bit);
                    m.set_obs(s, o_bit0 + bit);
                    m.state_labels[s] = "A[" + name + "]end|" + std::to_string(bit) + tag;
                    for (ActionId a = 0; a < 2; ++a)
                        m.set_transition(s, a, lit(q, x, b, 0), 1);
                }
                // Stage 3.
                for (std::size_t j = 0; j < cnf.clauses.size(); ++j) {
                    const auto& clause = cnf.clauses[j];
                    for (std::size_t i = 0; i < clause.size(); ++i) {
                        const StateId s = lit(q, x, b, first[j] + i);
                        const auto& l = clause[i];
                        m.set_obs(s, o_pos + first[j] + i);
                        m.state_labels[s] = "C[" + name + "](" + var_name(l.var) + ",C" + std::to_string(j + 1) +
                                            ")" + tag;
                        for (ActionId a = 0; a < 2; ++a) {
                            if (position[l.var] == x && a != b) {
                                m.set_transition(s, a, cheat, 1);
                                continue;
                            }
                            const bool ok = l.positive == (a == 1);
                            if (ok) {
                                if (j + 1 < cnf.clauses.size()) {
                                    m.set_transition(s, a, lit(q, x, b, first[j + 1]), 1);
                                } else {
                                    m.set_transition(s, a, s_end(q), 1);
                                    m.set_reward(s, a, 2);
                                }
                            } else {
                                m.set_transition(s, a, i + 1 < clause.size() ? s + 1 : s_end(q), 1);
                            }
                        }
                    }
                }
            }
        }
    }
    m.set_obs(last_end, o_end);
    m.set_obs(cheat, o_cheat);
    m.state_labels[last_end] = "s_end";
    m.state_labels[cheat] = "s_cheat";
    for (ActionId a = 0; a < 2; ++a) {
        m.set_transition(last_end, a, last_end, 1);
        m.set_transition(cheat, a, cheat, 1);
    }

    SsatLayout layout{f, c, k, n + 2 + n_lit, {}};
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t b = 0; b < 2; ++b)
            layout.stage3_entries.push_back(lit(0, x, b, 0));

    GadgetOutput g;
    g.recommended_horizon = k * layout.copy_horizon;
    g.recommended_metric = FiniteTotal{g.recommended_horizon};
    const Rat err = Rat(BigInt(1), pow2(c));
    const Rat kk(static_cast<unsigned long>(k));
    g.claim = make_claim(PolicyClass::History, kk * (Rat(1) - err), Bound::Greater,
                         kk * err + Rat(static_cast<unsigned long>(2 * n)), Bound::AtMost);
    g.claim.text += " (yes: ssat value > 1 - 2^-" + std::to_string(c) + ", no: ssat value < 2^-" + std::to_string(c) +
                    ")";
    g.ssat = std::move(layout);
    g.model = std::move(m);
    return g;
}

} // namespace

GadgetOutput ssat_to_pomdp(const SsatFormula& f, unsigned error_exponent)
{
    return build_ssat(f, error_exponent, 1);
}

GadgetOutput ssat_repeat(const GadgetOutput& g, std::size_t k)
{
    if (!g.ssat)
        throw DomainError("ssat_repeat needs the output of ssat_to_pomdp");
    if (k < 1)
        throw DomainError("number of copies must be at least 1");
    return build_ssat(g.ssat->source, g.ssat->error_exponent, k);
}

std::pair<unsigned, std::size_t> choose_ssat_constants(const Rat& eps, std::size_t n_vars)
{
    if (eps < Rat(0) || eps >= Rat(1))
        throw DomainError("epsilon must lie in [0,1), got " + eps.str());
    const Rat target = (Rat(2) - eps) / (Rat(1) - eps);
    unsigned c = 0;
    while (Rat(pow2(c)) <= target)
        ++c;
    const Rat err(BigInt(1), pow2(c));
    const Rat margin = (Rat(1) - eps) * (Rat(1) - err) - err;
    // margin > 0 follows from the choice of c.
    const Rat need = Rat(static_cast<unsigned long>(2 * n_vars)) / margin;
    BigInt k = floor(need) + 1;
    if (k < 1)
        k = 1;
    return {c, static_cast<std::size_t>(k.get_ui())};
}

GadgetOutput cvp_to_mdp(const Circuit& c, std::size_t k_gap)
{
    validate_circuit(c);
    if (c.outputs.size() != 1)
        throw DomainError("circuit must have exactly one output, has " + std::to_string(c.outputs.size()));
    const std::size_t n_gates = c.gates.size();
    const StateId sink = 2 * n_gates;
    const std::size_t out = c.outputs[0];
    Pomdp m(sink + 1, 2, sink + 1, 2 * out);
    m.action_labels = {"0", "1"};
    m.state_labels.resize(sink + 1);
    const Rat reward(pow2(n_gates + k_gap + 1));
    const Rat half(BigInt(1), BigInt(2));
    for (std::size_t g = 0; g < n_gates; ++g) {
        const auto& gate = c.gates[g];
        const std::string name = gate.id.empty() ? "g" + std::to_string(g) : gate.id;
        for (std::size_t p = 0; p < 2; ++p) {
            const StateId s = 2 * g + p;
            m.state_labels[s] = "(" + name + "," + std::to_string(p) + ")";
            const bool chooser = (gate.kind == GateKind::Or && p == 0) || (gate.kind == GateKind::And && p == 1);
            const bool random = (gate.kind == GateKind::Or && p == 1) || (gate.kind == GateKind::And && p == 0);
            for (ActionId a = 0; a < 2; ++a) {
                if (chooser) {
                    m.set_transition(s, a, 2 * gate.inputs[a] + p, 1);
                } else if (random) {
                    m.add_transition(s, a, 2 * gate.inputs[0] + p, half);
                    m.add_transition(s, a, 2 * gate.inputs[1] + p, half);
                } else if (gate.kind == GateKind::Not) {
                    m.set_transition(s, a, 2 * gate.inputs[0] + (1 - p), 1);
                } else {
                    m.set_transition(s, a, sink, 1);
                    const bool one = gate.kind == GateKind::Const1;
                    if ((one && p == 0) || (!one && p == 1))
                        m.set_reward(s, a, reward);
                }
            }
        }
    }
    m.state_labels[sink] = "sink";
    for (ActionId a = 0; a < 2; ++a)
        m.set_transition(sink, a, sink, 1);
    for (StateId s = 0; s <= sink; ++s)
        m.set_obs(s, s);
    GadgetOutput g;
    g.recommended_horizon = 2 * n_gates + 1;
    g.recommended_metric = FiniteTotal{g.recommended_horizon};
    g.claim = make_claim(PolicyClass::Stationary, reward, Bound::Equal,
                         reward - Rat(static_cast<unsigned long>(2 * k_gap)), Bound::AtMost);
    g.model = std::move(m);
    return g;
}

GadgetOutput infinite_horizon_sat_gadget(const Cnf& f)
{
    auto g = clause_walk(f, Rat(1), Rat(0));
    auto& m = std::get<Pomdp>(g.model);
    const StateId st = m.n_states() - 1;
    for (ActionId a = 0; a < 2; ++a)
        m.set_reward(st, a, 1);
    g.recommended_metric = Average{};
    g.claim = make_claim(PolicyClass::Stationary, Rat(1), Bound::Equal, Rat(0), Bound::Equal);
    g.claim.text = "stationary average value = 1 if yes, = 0 if no; discounted value > 0 iff yes";
    return g;
}

} // namespace hforge
