#include "support.hpp"

#include "hforge/oracles.hpp"

#include <algorithm>
#include <map>

namespace hforge::testing {

namespace {

struct Walker {
    const Pomdp& m;
    const Policy& policy;
    std::size_t h;
    Rat beta;
    std::vector<ObsId> history;
    std::vector<std::size_t> memory; // finite-memory state before each step
    Rat total;

    ActionId choose(std::size_t step)
    {
        const ObsId o = history.back();
        if (const auto* s = std::get_if<StationaryPolicy>(&policy))
            return s->act.at(o);
        if (const auto* td = std::get_if<TimeDependentPolicy>(&policy))
            return td->act.at(step).at(o);
        if (const auto* hp = std::get_if<HistoryPolicy>(&policy)) {
            const auto a = hp->lookup(history);
            if (!a)
                throw std::runtime_error("history policy undefined on a realised history");
            return *a;
        }
        const auto& fm = std::get<FiniteMemoryPolicy>(policy);
        const auto& st = fm.at(o, memory.back());
        memory.push_back(st.next_memory);
        return st.action;
    }

    void walk(StateId s, std::size_t step, const Rat& prob, const Rat& weight)
    {
        history.push_back(m.obs(s));
        const std::size_t mem_depth = memory.size();
        const ActionId a = choose(step);
        total += prob * weight * m.reward(s, a);
        if (step + 1 < h)
            for (const auto& t : m.row(s, a))
                walk(t.target, step + 1, prob * t.prob, weight * beta);
        memory.resize(mem_depth);
        history.pop_back();
    }
};

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

void all_strings(std::size_t n_obs, std::size_t len, std::vector<ObsId>& cur,
                 const std::function<void(const std::vector<ObsId>&)>& f)
{
    if (cur.size() == len) {
        f(cur);
        return;
    }
    for (ObsId o = 0; o < n_obs; ++o) {
        cur.push_back(o);
        all_strings(n_obs, len, cur, f);
        cur.pop_back();
    }
}

} // namespace

Rat trajectory_value(const Pomdp& m, const Policy& policy, std::size_t h, const Rat& beta)
{
    Walker w{m, policy, h, beta, {}, {}, Rat(0)};
    if (const auto* fm = std::get_if<FiniteMemoryPolicy>(&policy))
        w.memory.push_back(fm->initial_memory);
    if (h > 0)
        w.walk(m.initial(), 0, Rat(1), Rat(1));
    return w.total;
}

Pomdp random_pomdp(Rng& rng, std::size_t max_states, std::size_t max_actions, bool allow_dead_ends,
                   bool nonnegative)
{
    const std::size_t ns = pick(rng, 1, max_states), na = pick(rng, 1, max_actions), no = pick(rng, 1, ns);
    Pomdp m(ns, na, no, pick(rng, 0, ns - 1));
    for (StateId s = 0; s < ns; ++s)
        m.set_obs(s, s < no ? s : pick(rng, 0, no - 1));
    for (StateId s = 0; s < ns; ++s)
        for (ActionId a = 0; a < na; ++a) {
            const long den = static_cast<long>(pick(rng, 1, 3));
            const long num = static_cast<long>(pick(rng, 0, 6)) - (nonnegative ? 0 : 3);
            m.set_reward(s, a, frac(num, den));
            if (allow_dead_ends && pick(rng, 0, 9) == 0)
                continue;
            std::vector<long> w(ns);
            long sum = 0;
            for (auto& x : w) {
                x = pick(rng, 0, 2) == 0 ? 0 : static_cast<long>(pick(rng, 1, 4));
                sum += x;
            }
            if (sum == 0) {
                w[pick(rng, 0, ns - 1)] = 1;
                sum = 1;
            }
            for (StateId t = 0; t < ns; ++t)
                if (w[t])
                    m.set_transition(s, a, t, frac(w[t], sum));
        }
    return m;
}

StationaryPolicy random_stationary(Rng& rng, const Pomdp& m)
{
    StationaryPolicy p{std::vector<ActionId>(m.n_obs())};
    for (auto& a : p.act)
        a = pick(rng, 0, m.n_actions() - 1);
    return p;
}

TimeDependentPolicy random_time_dependent(Rng& rng, const Pomdp& m, std::size_t h)
{
    TimeDependentPolicy p{std::vector<std::vector<ActionId>>(h, std::vector<ActionId>(m.n_obs()))};
    for (auto& row : p.act)
        for (auto& a : row)
            a = pick(rng, 0, m.n_actions() - 1);
    return p;
}

HistoryPolicy random_history(Rng& rng, const Pomdp& m, std::size_t h)
{
    HistoryPolicy p;
    for (std::size_t len = 1; len <= h; ++len) {
        std::vector<ObsId> cur;
        all_strings(m.n_obs(), len, cur, [&](const std::vector<ObsId>& s) {
            p.set(s, pick(rng, 0, m.n_actions() - 1));
        });
    }
    return p;
}

FiniteMemoryPolicy random_finite_memory(Rng& rng, const Pomdp& m, std::size_t max_memory)
{
    FiniteMemoryPolicy p;
    p.n_obs = m.n_obs();
    p.n_memory = pick(rng, 1, max_memory);
    p.initial_memory = pick(rng, 0, p.n_memory - 1);
    for (std::size_t i = 0; i < p.n_obs * p.n_memory; ++i)
        p.steps.push_back({pick(rng, 0, m.n_actions() - 1), pick(rng, 0, p.n_memory - 1)});
    return p;
}

Cnf random_cnf(Rng& rng, std::size_t max_vars, std::size_t max_clauses)
{
    Cnf f;
    f.n_vars = pick(rng, 1, max_vars);
    const std::size_t m = pick(rng, 1, max_clauses);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<std::size_t> vars(f.n_vars);
        for (std::size_t v = 0; v < f.n_vars; ++v)
            vars[v] = v;
        std::shuffle(vars.begin(), vars.end(), rng);
        const std::size_t len = pick(rng, 1, std::min<std::size_t>(3, f.n_vars));
        Clause c;
        for (std::size_t i = 0; i < len; ++i)
            c.push_back({vars[i], pick(rng, 0, 1) == 1});
        f.clauses.push_back(c);
    }
    return f;
}

Cnf sample_formula()
{
    return Cnf{4, {{{0, false}, {2, true}, {3, true}}, {{0, true}, {1, false}, {3, true}}}};
}

Cnf contradiction()
{
    return Cnf{1, {{{0, true}}, {{0, false}}}};
}

std::vector<Cnf> cnf_corpus()
{
    Rng rng(20240611);
    std::vector<Cnf> out{sample_formula()};
    for (int i = 0; i < 50; ++i)
        out.push_back(random_cnf(rng));
    return out;
}

MaxSat count_max_sat(const Cnf& f)
{
    std::size_t best = 0;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << f.n_vars); ++x) {
        std::size_t sat = 0;
        for (const auto& c : f.clauses) {
            bool any = false;
            for (const auto& l : c)
                any = any || (((x >> l.var) & 1u) != 0) == l.positive;
            sat += any;
        }
        best = std::max(best, sat);
    }
    return {best == f.clauses.size(), best};
}

Circuit full_adder()
{
    Circuit c;
    const auto x = c.add(GateKind::Const0, {}, "x");
    const auto y = c.add(GateKind::Const0, {}, "y");
    const auto cin = c.add(GateKind::Const0, {}, "cin");
    const auto o1 = c.add(GateKind::Or, {x, y}, "o1");
    const auto a1 = c.add(GateKind::And, {x, y}, "a1");
    const auto n1 = c.add(GateKind::Not, {a1}, "n1");
    const auto s1 = c.add(GateKind::And, {o1, n1}, "s1");
    const auto o2 = c.add(GateKind::Or, {s1, cin}, "o2");
    const auto a2 = c.add(GateKind::And, {s1, cin}, "a2");
    const auto n2 = c.add(GateKind::Not, {a2}, "n2");
    const auto sum = c.add(GateKind::And, {o2, n2}, "sum");
    const auto carry = c.add(GateKind::Or, {a1, a2}, "carry");
    c.outputs = {carry, sum};
    return c;
}

bool tree_value(const Tree& t)
{
    switch (t.kind) {
    case Tree::Zero: return false;
    case Tree::One: return true;
    case Tree::Not: return !tree_value(t.kids[0]);
    case Tree::And: return tree_value(t.kids[0]) && tree_value(t.kids[1]);
    case Tree::Or: return tree_value(t.kids[0]) || tree_value(t.kids[1]);
    }
    return false;
}

std::size_t tree_size(const Tree& t)
{
    std::size_t n = 1;
    for (const auto& k : t.kids)
        n += tree_size(k);
    return n;
}

namespace {

std::size_t emit(Circuit& c, const Tree& t)
{
    switch (t.kind) {
    case Tree::Zero: return c.add(GateKind::Const0, {});
    case Tree::One: return c.add(GateKind::Const1, {});
    case Tree::Not: return c.add(GateKind::Not, {emit(c, t.kids[0])});
    case Tree::And:
    case Tree::Or: {
        const auto a = emit(c, t.kids[0]);
        const auto b = emit(c, t.kids[1]);
        return c.add(t.kind == Tree::And ? GateKind::And : GateKind::Or, {a, b});
    }
    }
    return 0;
}

} // namespace

Circuit tree_circuit(const Tree& t)
{
    Circuit c;
    c.outputs = {emit(c, t)};
    return c;
}

std::vector<Tree> enumerate_trees(std::size_t max_depth, std::size_t max_gates)
{
    std::vector<std::vector<Tree>> by_depth; // trees of depth <= d
    by_depth.push_back({Tree{Tree::Zero, {}}, Tree{Tree::One, {}}});
    for (std::size_t d = 1; d <= max_depth; ++d) {
        std::vector<Tree> next = by_depth[0];
        const auto& prev = by_depth[d - 1];
        for (const auto& a : prev)
            if (tree_size(a) + 1 <= max_gates)
                next.push_back(Tree{Tree::Not, {a}});
        for (const auto& a : prev)
            for (const auto& b : prev)
                if (tree_size(a) + tree_size(b) + 1 <= max_gates) {
                    next.push_back(Tree{Tree::And, {a, b}});
                    next.push_back(Tree{Tree::Or, {a, b}});
                }
        by_depth.push_back(std::move(next));
    }
    return by_depth.back();
}

SsatFormula ssat_exists_random()
{
    return SsatFormula{{{0, Quantifier::Exists}, {1, Quantifier::Random}}, Cnf{2, {{{0, true}, {1, true}}}}};
}

SsatFormula ssat_random_exists()
{
    return SsatFormula{{{0, Quantifier::Random}, {1, Quantifier::Exists}}, Cnf{2, {{{0, true}}}}};
}

SsatObs ssat_observations(const Pomdp& m)
{
    const auto find = [&](const std::string& label) {
        const auto it = std::find(m.obs_labels.begin(), m.obs_labels.end(), label);
        if (it == m.obs_labels.end())
            throw std::runtime_error("missing observation " + label);
        return static_cast<ObsId>(it - m.obs_labels.begin());
    };
    return {find("start"), find("stage1"), find("bit0"), find("bit1"), find("pos1.1")};
}

std::function<ActionId(std::span<const ObsId>)> consistent_chooser(const GadgetOutput& g,
                                                                   const SsatStrategy& strategy)
{
    const auto& f = g.ssat->source;
    const auto obs = ssat_observations(g.pomdp());
    std::vector<std::size_t> position(f.matrix.n_vars);
    for (std::size_t t = 0; t < f.prefix.size(); ++t)
        position[f.prefix[t].var] = t;
    std::vector<std::size_t> literal_var;
    for (const auto& c : f.matrix.clauses)
        for (const auto& l : c)
            literal_var.push_back(l.var);
    const std::size_t n = f.prefix.size();
    return [=](std::span<const ObsId> history) -> ActionId {
        std::size_t begin = history.size();
        while (begin > 0 && history[begin - 1] != obs.start)
            --begin;
        if (begin == 0)
            return 0;
        const auto seg = history.subspan(begin - 1); // starts at "start"
        std::vector<bool> bits;
        for (std::size_t i = 2; i < seg.size() && i <= n + 1; ++i)
            if (seg[i] == obs.bit0 || seg[i] == obs.bit1)
                bits.push_back(seg[i] == obs.bit1);
        const ObsId last = seg.back();
        if (last >= obs.first_pos && last < obs.first_pos + literal_var.size()) {
            const std::size_t t = position[literal_var[last - obs.first_pos]];
            return bits.at(t) ? 1 : 0;
        }
        if ((last == obs.stage1 || last == obs.bit0 || last == obs.bit1) && seg.size() <= n + 1) {
            const std::size_t step = seg.size() - 2;
            if (f.prefix[step].quantifier == Quantifier::Exists)
                return strategy(step, bits) ? 1 : 0;
        }
        return 0;
    };
}

Rat exp_upper(unsigned m)
{
    // sum_{i<=N} m^i/i! + m^(N+1)/(N+1)! * 1/(1 - m/(N+2))
    const unsigned n = 4 * m + 20;
    Rat term(1), sum(0);
    for (unsigned i = 0; i <= n; ++i) {
        sum += term;
        term *= Rat(m) / Rat(i + 1);
    }
    return sum + term / (Rat(1) - Rat(m) / Rat(n + 2));
}

} // namespace hforge::testing

namespace hforge::testing {

SuccinctCheck succinct_matches_cvp(const Circuit& c, std::size_t k_gap)
{
    SuccinctCheck out;
    const auto inst = synthesize_succinct_instance(c);
    SuccinctOptions opt;
    opt.k_gap = k_gap;
    opt.test_exponent = c.gates.size() + k_gap + 1;
    const auto g = succinct_cvp_to_2tbn(inst, opt);
    const auto ex = expand_2tbn_reachable(g.tbn());
    const auto cvp = cvp_to_mdp(c, k_gap);
    const auto& ref = cvp.pomdp();
    const auto lay = succinct_fluents(inst.index_bits);
    const StateId sink = 2 * c.gates.size();
    const auto project = [&](const FluentState& x) -> StateId {
        std::size_t gate = 0;
        for (std::size_t b = 0; b < lay.gate_bits.size(); ++b)
            gate |= std::size_t{x[lay.gate_bits[b]]} << b;
        if (gate == 0)
            return sink;
        if (gate > c.gates.size())
            throw std::runtime_error("projection reached a gate index beyond the circuit");
        return 2 * (gate - 1) + x[lay.parity];
    };
    out.expanded_states = ex.states.size();
    const auto& m = ex.model;
    if (project(ex.states[m.initial()]) != ref.initial()) {
        out.mismatch = "initial states differ";
        return out;
    }
    for (StateId s = 0; s < m.n_states(); ++s) {
        const StateId ps = project(ex.states[s]);
        for (ActionId a = 0; a < 2; ++a) {
            std::map<StateId, Rat> row;
            for (const auto& t : m.row(s, a))
                row[project(ex.states[t.target])] += t.prob;
            std::map<StateId, Rat> want;
            for (const auto& t : ref.row(ps, a))
                want[t.target] += t.prob;
            if (row != want) {
                out.mismatch = "row of " + ref.state_name(ps) + " under action " + std::to_string(a) + " differs";
                return out;
            }
            if (m.reward(s, a) != ref.reward(ps, a)) {
                out.mismatch = "reward of " + ref.state_name(ps) + " differs";
                return out;
            }
            if (a == 0 && m.reward(s, a).sign() > 0)
                ++out.paying_states;
        }
    }
    return out;
}

} // namespace hforge::testing
