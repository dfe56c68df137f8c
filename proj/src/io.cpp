#include "hforge/io.hpp"

#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

namespace hforge {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string> tokens;
};

// Splits into whitespace-separated tokens, dropping blank lines and lines
// whose first token starts with one of `comment`.
std::vector<Line> tokenize(std::string_view text, std::string_view comment)
{
    std::vector<Line> out;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        const auto raw = text.substr(pos, end - pos);
        ++number;
        std::istringstream in{std::string(raw)};
        Line line{number, {}};
        for (std::string tok; in >> tok;)
            line.tokens.push_back(tok);
        if (!line.tokens.empty() && comment.find(line.tokens[0][0]) == std::string_view::npos)
            out.push_back(std::move(line));
        if (end == text.size())
            break;
        pos = end + 1;
    }
    return out;
}

long long to_int(const Line& l, const std::string& tok)
{
    long long v = 0;
    const auto* b = tok.data();
    const auto [p, ec] = std::from_chars(b, b + tok.size(), v);
    if (ec != std::errc{} || p != b + tok.size())
        throw ParseError(l.number, "expected an integer, got '" + tok + "'");
    return v;
}

std::size_t to_index(const Line& l, const std::string& tok)
{
    const auto v = to_int(l, tok);
    if (v < 0)
        throw ParseError(l.number, "expected a non-negative integer, got '" + tok + "'");
    return static_cast<std::size_t>(v);
}

Rat to_rat(const Line& l, const std::string& tok)
{
    try {
        return Rat::parse(tok);
    } catch (const Error& e) {
        throw ParseError(l.number, "bad rational '" + tok + "'");
    }
}

void expect_arity(const Line& l, std::size_t n)
{
    if (l.tokens.size() != n)
        throw ParseError(l.number, "'" + l.tokens[0] + "' expects " + std::to_string(n - 1) + " arguments");
}

struct Dimacs {
    Cnf cnf;
    std::vector<std::pair<QuantifiedVar, std::size_t>> prefix; // with line numbers
    std::size_t last_line = 0;
};

Dimacs parse_dimacs(std::string_view text, bool quantifiers)
{
    Dimacs d;
    std::optional<std::size_t> declared;
    Clause current;
    std::size_t clause_line = 0;
    bool header = false;
    for (const auto& l : tokenize(text, "c%")) {
        d.last_line = l.number;
        const auto& t = l.tokens;
        if (t[0] == "p") {
            if (header)
                throw ParseError(l.number, "duplicate header");
            if (t.size() != 4 || t[1] != "cnf")
                throw ParseError(l.number, "header must read 'p cnf <vars> <clauses>'");
            d.cnf.n_vars = to_index(l, t[2]);
            declared = to_index(l, t[3]);
            header = true;
            continue;
        }
        if (!header)
            throw ParseError(l.number, "missing 'p cnf' header");
        if (t[0] == "e" || t[0] == "r") {
            if (!quantifiers)
                throw ParseError(l.number, "quantifier line in a plain CNF");
            if (!d.cnf.clauses.empty() || !current.empty())
                throw ParseError(l.number, "quantifier lines must precede the clauses");
            if (t.back() != "0")
                throw ParseError(l.number, "quantifier line must end with 0");
            for (std::size_t i = 1; i + 1 < t.size(); ++i) {
                const auto v = to_int(l, t[i]);
                if (v <= 0 || static_cast<std::size_t>(v) > d.cnf.n_vars)
                    throw ParseError(l.number, "quantified variable " + t[i] + " out of range");
                d.prefix.push_back({{static_cast<std::size_t>(v - 1),
                                     t[0] == "e" ? Quantifier::Exists : Quantifier::Random},
                                    l.number});
            }
            continue;
        }
        for (const auto& tok : t) {
            const auto v = to_int(l, tok);
            if (current.empty())
                clause_line = l.number;
            if (v == 0) {
                if (current.empty())
                    throw ParseError(l.number, "empty clause");
                d.cnf.clauses.push_back(std::move(current));
                current.clear();
                continue;
            }
            const auto var = static_cast<std::size_t>(v < 0 ? -v : v);
            if (var > d.cnf.n_vars)
                throw ParseError(l.number, "variable " + std::to_string(var) + " out of range");
            for (const auto& lit : current)
                if (lit.var == var - 1)
                    throw ParseError(l.number, "repeated variable " + std::to_string(var) + " in clause");
            current.push_back({var - 1, v > 0});
            if (current.size() > 3)
                throw ParseError(l.number, "clause has more than 3 literals");
        }
    }
    if (!header)
        throw ParseError(d.last_line, "missing 'p cnf' header");
    if (!current.empty())
        throw ParseError(clause_line, "clause not terminated by 0");
    if (*declared != d.cnf.clauses.size())
        throw ParseError(d.last_line, "header declares " + std::to_string(*declared) + " clauses, found " +
                                          std::to_string(d.cnf.clauses.size()));
    return d;
}

std::string dimacs_clause(const Clause& c)
{
    std::string s;
    for (const auto& l : c)
        s += (l.positive ? "" : "-") + std::to_string(l.var + 1) + " ";
    return s + "0\n";
}

GateKind kind_from(const Line& l, const std::string& name)
{
    if (name == "AND")
        return GateKind::And;
    if (name == "OR")
        return GateKind::Or;
    if (name == "NOT")
        return GateKind::Not;
    throw ParseError(l.number, "unknown gate type '" + name + "'");
}

// Reads netlist lines; other lines go to `extra` (returns false to reject).
template <class Extra>
Circuit parse_netlist(const std::vector<Line>& lines, Extra&& extra)
{
    Circuit c;
    std::map<std::string, std::size_t> index;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> refs; // line, names
    std::vector<std::pair<std::size_t, std::string>> outputs;
    for (const auto& l : lines) {
        const auto& t = l.tokens;
        if (t[0] == "gate") {
            if (t.size() < 3)
                throw ParseError(l.number, "gate line needs an id and a type");
            if (index.count(t[1]))
                throw ParseError(l.number, "duplicate gate id '" + t[1] + "'");
            Gate g{t[1], GateKind::And, {}};
            std::vector<std::string> names;
            if (t[2] == "CONST") {
                expect_arity(l, 4);
                if (t[3] != "0" && t[3] != "1")
                    throw ParseError(l.number, "CONST value must be 0 or 1");
                g.kind = t[3] == "1" ? GateKind::Const1 : GateKind::Const0;
            } else {
                g.kind = kind_from(l, t[2]);
                if (t.size() != 3 + arity(g.kind))
                    throw ParseError(l.number, to_string(g.kind) + " gate expects " + std::to_string(arity(g.kind)) +
                                                   " inputs, got " + std::to_string(t.size() - 3));
                names.assign(t.begin() + 3, t.end());
            }
            index.emplace(t[1], c.gates.size());
            refs.emplace_back(l.number, std::move(names));
            c.gates.push_back(std::move(g));
        } else if (t[0] == "output") {
            expect_arity(l, 2);
            outputs.emplace_back(l.number, t[1]);
        } else if (!extra(l)) {
            throw ParseError(l.number, "unexpected '" + t[0] + "'");
        }
    }
    for (std::size_t g = 0; g < c.gates.size(); ++g) {
        for (const auto& name : refs[g].second) {
            const auto it = index.find(name);
            if (it == index.end())
                throw ParseError(refs[g].first, "unknown gate reference '" + name + "'");
            c.gates[g].inputs.push_back(it->second);
        }
    }
    for (const auto& [line, name] : outputs) {
        const auto it = index.find(name);
        if (it == index.end())
            throw ParseError(line, "unknown output gate '" + name + "'");
        c.outputs.push_back(it->second);
    }
    try {
        validate_circuit(c);
    } catch (const DomainError& e) {
        throw ParseError(lines.empty() ? 0 : lines.back().number, e.what());
    }
    return c;
}

std::string netlist(const Circuit& c)
{
    std::ostringstream out;
    for (const auto& g : c.gates) {
        out << "gate " << g.id << " ";
        if (is_input(g.kind)) {
            out << "CONST " << (g.kind == GateKind::Const1 ? 1 : 0);
        } else {
            out << to_string(g.kind);
            for (const auto i : g.inputs)
                out << " " << c.gates[i].id;
        }
        out << "\n";
    }
    for (const auto o : c.outputs)
        out << "output " << c.gates[o].id << "\n";
    return out.str();
}

std::string bits_text(const FluentState& s)
{
    std::string out;
    for (const bool b : s)
        out += b ? '1' : '0';
    return out;
}

FluentState parse_bits(const Line& l, const std::string& tok, std::size_t width)
{
    if (tok == "-" && width == 0)
        return {};
    if (tok.size() != width || tok.find_first_not_of("01") != std::string::npos)
        throw ParseError(l.number, "expected " + std::to_string(width) + " bits, got '" + tok + "'");
    FluentState s;
    for (const char ch : tok)
        s.push_back(ch == '1');
    return s;
}

} // namespace

Cnf parse_cnf(std::string_view text)
{
    return parse_dimacs(text, false).cnf;
}

std::string serialize_cnf(const Cnf& f)
{
    std::string out = "p cnf " + std::to_string(f.n_vars) + " " + std::to_string(f.clauses.size()) + "\n";
    for (const auto& c : f.clauses)
        out += dimacs_clause(c);
    return out;
}

SsatFormula parse_ssat(std::string_view text)
{
    auto d = parse_dimacs(text, true);
    SsatFormula f;
    f.matrix = std::move(d.cnf);
    std::vector<bool> seen(f.matrix.n_vars, false);
    for (const auto& [q, line] : d.prefix) {
        if (seen[q.var])
            throw ParseError(line, "variable " + std::to_string(q.var + 1) + " quantified twice");
        seen[q.var] = true;
        f.prefix.push_back(q);
    }
    for (std::size_t v = 0; v < f.matrix.n_vars; ++v)
        if (!seen[v])
            throw ParseError(d.last_line, "variable " + std::to_string(v + 1) + " is not quantified");
    return f;
}

std::string serialize_ssat(const SsatFormula& f)
{
    std::string out = "p cnf " + std::to_string(f.matrix.n_vars) + " " + std::to_string(f.matrix.clauses.size()) + "\n";
    for (const auto& q : f.prefix)
        out += std::string(q.quantifier == Quantifier::Exists ? "e " : "r ") + std::to_string(q.var + 1) + " 0\n";
    for (const auto& c : f.matrix.clauses)
        out += dimacs_clause(c);
    return out;
}

Circuit parse_circuit(std::string_view text)
{
    return parse_netlist(tokenize(text, "#"), [](const Line&) { return false; });
}

std::string serialize_circuit(const Circuit& c)
{
    return netlist(c);
}

SuccinctCircuitInstance parse_succinct_instance(std::string_view text)
{
    SuccinctCircuitInstance s;
    std::optional<std::size_t> width_line;
    const auto lines = tokenize(text, "#");
    s.circuit = parse_netlist(lines, [&](const Line& l) {
        if (l.tokens[0] != "index-width")
            return false;
        expect_arity(l, 2);
        s.index_bits = to_index(l, l.tokens[1]);
        width_line = l.number;
        return true;
    });
    if (!width_line)
        throw ParseError(lines.empty() ? 0 : lines.back().number, "missing 'index-width' line");
    try {
        validate_succinct_instance(s);
    } catch (const DomainError& e) {
        throw ParseError(*width_line, e.what());
    }
    return s;
}

std::string serialize_succinct_instance(const SuccinctCircuitInstance& s)
{
    return netlist(s.circuit) + "index-width " + std::to_string(s.index_bits) + "\n";
}

Pomdp parse_pomdp(std::string_view text)
{
    const auto lines = tokenize(text, "#");
    if (lines.empty() || lines[0].tokens != std::vector<std::string>{"POMDP", "v1"})
        throw ParseError(lines.empty() ? 1 : lines[0].number, "expected header 'POMDP v1'");
    std::map<std::string, std::size_t> dims;
    std::size_t i = 1;
    for (const char* key : {"states", "actions", "observations", "initial"}) {
        if (i >= lines.size() || lines[i].tokens[0] != key)
            throw ParseError(i < lines.size() ? lines[i].number : lines.back().number,
                             std::string("expected '") + key + "'");
        expect_arity(lines[i], 2);
        dims[key] = to_index(lines[i], lines[i].tokens[1]);
        ++i;
    }
    const std::size_t ns = dims["states"], na = dims["actions"], no = dims["observations"];
    if (ns == 0 || na == 0 || no == 0)
        throw ParseError(lines[1].number, "states, actions and observations must be positive");
    if (dims["initial"] >= ns)
        throw ParseError(lines[4].number, "initial state out of range");
    Pomdp m(ns, na, no, dims["initial"]);
    std::vector<bool> has_obs(ns, false);
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen_t;
    std::set<std::pair<std::size_t, std::size_t>> seen_r;
    const auto state = [&](const Line& l, const std::string& tok) {
        const auto s = to_index(l, tok);
        if (s >= ns)
            throw ParseError(l.number, "state " + tok + " out of range");
        return s;
    };
    const auto action = [&](const Line& l, const std::string& tok) {
        const auto a = to_index(l, tok);
        if (a >= na)
            throw ParseError(l.number, "action " + tok + " out of range");
        return a;
    };
    for (; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const auto& t = l.tokens;
        if (t[0] == "obs") {
            expect_arity(l, 3);
            const auto s = state(l, t[1]);
            const auto o = to_index(l, t[2]);
            if (o >= no)
                throw ParseError(l.number, "observation " + t[2] + " out of range");
            if (has_obs[s])
                throw ParseError(l.number, "observation of state " + t[1] + " given twice");
            has_obs[s] = true;
            m.set_obs(s, o);
        } else if (t[0] == "T") {
            expect_arity(l, 5);
            const auto a = action(l, t[1]);
            const auto s = state(l, t[2]);
            const auto to = state(l, t[3]);
            if (!seen_t.insert({a, s, to}).second)
                throw ParseError(l.number, "duplicate transition");
            const Rat p = to_rat(l, t[4]);
            if (p < Rat(0) || p > Rat(1))
                throw ParseError(l.number, "probability " + p.str() + " outside [0,1]");
            m.set_transition(s, a, to, p);
        } else if (t[0] == "R") {
            expect_arity(l, 4);
            const auto s = state(l, t[1]);
            const auto a = action(l, t[2]);
            if (!seen_r.insert({s, a}).second)
                throw ParseError(l.number, "duplicate reward");
            m.set_reward(s, a, to_rat(l, t[3]));
        } else {
            throw ParseError(l.number, "unexpected '" + t[0] + "'");
        }
    }
    for (StateId s = 0; s < ns; ++s)
        if (!has_obs[s])
            throw ParseError(lines.back().number, "state " + std::to_string(s) + " has no observation");
    auto violations = validate_pomdp(m);
    if (!violations.empty())
        throw ValidationError(std::move(violations));
    return m;
}

std::string serialize_pomdp(const Pomdp& m)
{
    std::ostringstream out;
    out << "POMDP v1\n"
        << "states " << m.n_states() << "\n"
        << "actions " << m.n_actions() << "\n"
        << "observations " << m.n_obs() << "\n"
        << "initial " << m.initial() << "\n";
    for (StateId s = 0; s < m.n_states(); ++s)
        out << "obs " << s << " " << m.obs(s) << "\n";
    for (ActionId a = 0; a < m.n_actions(); ++a)
        for (StateId s = 0; s < m.n_states(); ++s)
            for (const auto& t : m.row(s, a))
                out << "T " << a << " " << s << " " << t.target << " " << t.prob.str() << "\n";
    for (StateId s = 0; s < m.n_states(); ++s)
        for (ActionId a = 0; a < m.n_actions(); ++a)
            if (!m.reward(s, a).is_zero())
                out << "R " << s << " " << a << " " << m.reward(s, a).compact() << "\n";
    return out.str();
}

Tbn parse_tbn(std::string_view text)
{
    const auto lines = tokenize(text, "#");
    if (lines.empty() || lines[0].tokens != std::vector<std::string>{"TBN", "v1"})
        throw ParseError(lines.empty() ? 1 : lines[0].number, "expected header 'TBN v1'");
    Tbn t;
    std::size_t i = 1;
    if (i >= lines.size() || lines[i].tokens[0] != "fluents")
        throw ParseError(i < lines.size() ? lines[i].number : lines.back().number, "expected 'fluents'");
    t.fluents.assign(lines[i].tokens.begin() + 1, lines[i].tokens.end());
    const std::size_t n = t.n_fluents();
    ++i;
    if (i >= lines.size() || lines[i].tokens[0] != "initial")
        throw ParseError(i < lines.size() ? lines[i].number : lines.back().number, "expected 'initial'");
    expect_arity(lines[i], n == 0 ? 1 : 2);
    t.initial = n == 0 ? FluentState{} : parse_bits(lines[i], lines[i].tokens[1], n);
    ++i;
    if (i >= lines.size() || lines[i].tokens[0] != "actions")
        throw ParseError(i < lines.size() ? lines[i].number : lines.back().number, "expected 'actions'");
    expect_arity(lines[i], 2);
    const std::size_t na = to_index(lines[i], lines[i].tokens[1]);
    if (na == 0)
        throw ParseError(lines[i].number, "a 2TBN needs at least one action");
    t.actions.assign(na, TbnAction{std::vector<FluentCpt>(n)});
    ++i;

    const auto fluent = [&](const Line& l, const std::string& tok) {
        const auto f = to_index(l, tok);
        if (f >= n)
            throw ParseError(l.number, "fluent " + tok + " out of range");
        return f;
    };
    std::optional<std::size_t> cur;
    std::vector<std::vector<bool>> has_dep(na, std::vector<bool>(n, false));
    std::vector<std::vector<std::vector<bool>>> has_row(na, std::vector<std::vector<bool>>(n));
    ExplicitReward explicit_reward;
    std::optional<SuccinctReward> succinct;
    std::size_t last = lines.back().number;
    for (; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const auto& tk = l.tokens;
        if (tk[0] == "action") {
            expect_arity(l, 2);
            const auto a = to_index(l, tk[1]);
            if (a >= na)
                throw ParseError(l.number, "action " + tk[1] + " out of range");
            cur = a;
        } else if (tk[0] == "dep") {
            if (!cur)
                throw ParseError(l.number, "'dep' outside an action block");
            if (tk.size() < 2)
                throw ParseError(l.number, "'dep' needs a fluent");
            const auto f = fluent(l, tk[1]);
            if (has_dep[*cur][f])
                throw ParseError(l.number, "duplicate 'dep' for fluent " + tk[1]);
            has_dep[*cur][f] = true;
            auto& cpt = t.actions[*cur].fluents[f];
            for (std::size_t k = 2; k < tk.size(); ++k) {
                std::string tok = tk[k];
                const bool sync = !tok.empty() && tok.back() == '\'';
                if (sync)
                    tok.pop_back();
                cpt.parents.push_back({fluent(l, tok), sync});
            }
            if (cpt.parents.size() > 20)
                throw ParseError(l.number, "too many parents");
            cpt.prob_one.assign(std::size_t{1} << cpt.parents.size(), Rat(0));
            has_row[*cur][f].assign(cpt.prob_one.size(), false);
        } else if (tk[0] == "cpt") {
            if (!cur)
                throw ParseError(l.number, "'cpt' outside an action block");
            expect_arity(l, 4);
            const auto f = fluent(l, tk[1]);
            if (!has_dep[*cur][f])
                throw ParseError(l.number, "'cpt' for fluent " + tk[1] + " before its 'dep' line");
            auto& cpt = t.actions[*cur].fluents[f];
            const auto bits = parse_bits(l, tk[2], cpt.parents.size());
            std::size_t row = 0;
            for (const bool b : bits)
                row = (row << 1) | (b ? 1u : 0u);
            if (has_row[*cur][f][row])
                throw ParseError(l.number, "duplicate CPT row");
            has_row[*cur][f][row] = true;
            const Rat p = to_rat(l, tk[3]);
            if (p < Rat(0) || p > Rat(1))
                throw ParseError(l.number, "CPT entry " + p.str() + " outside [0,1]");
            cpt.prob_one[row] = p;
        } else if (tk[0] == "reward") {
            if (succinct)
                throw ParseError(l.number, "explicit reward after a reward circuit");
            expect_arity(l, 4);
            const auto bits = parse_bits(l, tk[1], n);
            const auto a = to_index(l, tk[2]);
            if (a >= na)
                throw ParseError(l.number, "action " + tk[2] + " out of range");
            if (!explicit_reward.entries.emplace(std::make_pair(bits, a), to_rat(l, tk[3])).second)
                throw ParseError(l.number, "duplicate reward entry");
        } else if (tk[0] == "reward-circuit") {
            if (succinct || !explicit_reward.entries.empty())
                throw ParseError(l.number, "second reward specification");
            expect_arity(l, 5);
            SuccinctReward r;
            r.state_bits = to_index(l, tk[1]);
            r.action_bits = to_index(l, tk[2]);
            r.index_bits = to_index(l, tk[3]);
            try {
                r.width = parse_bigint(tk[4]);
            } catch (const Error&) {
                throw ParseError(l.number, "bad width '" + tk[4] + "'");
            }
            std::vector<Line> body;
            for (++i; i < lines.size() && lines[i].tokens[0] != "end"; ++i)
                body.push_back(lines[i]);
            if (i == lines.size())
                throw ParseError(last, "reward circuit not closed by 'end'");
            r.circuit = parse_netlist(body, [](const Line&) { return false; });
            succinct = std::move(r);
        } else {
            throw ParseError(l.number, "unexpected '" + tk[0] + "'");
        }
    }
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t f = 0; f < n; ++f) {
            if (!has_dep[a][f])
                throw ParseError(last, "action " + std::to_string(a) + " has no 'dep' line for fluent " +
                                           std::to_string(f));
            for (const bool b : has_row[a][f])
                if (!b)
                    throw ParseError(last, "action " + std::to_string(a) + " is missing CPT rows for fluent " +
                                               std::to_string(f));
        }
    if (succinct)
        t.reward = std::move(*succinct);
    else
        t.reward = std::move(explicit_reward);
    try {
        validate_tbn(t);
    } catch (const DomainError& e) {
        throw ParseError(last, e.what());
    }
    return t;
}

std::string serialize_tbn(const Tbn& t)
{
    std::ostringstream out;
    out << "TBN v1\nfluents";
    for (const auto& f : t.fluents)
        out << " " << f;
    out << "\ninitial " << (t.initial.empty() ? "" : bits_text(t.initial)) << "\n";
    out << "actions " << t.actions.size() << "\n";
    for (std::size_t a = 0; a < t.actions.size(); ++a) {
        out << "action " << a << "\n";
        for (std::size_t f = 0; f < t.n_fluents(); ++f) {
            const auto& cpt = t.actions[a].fluents[f];
            out << "dep " << f;
            for (const auto& p : cpt.parents)
                out << " " << p.fluent << (p.synchronous ? "'" : "");
            out << "\n";
            const std::size_t k = cpt.parents.size();
            for (std::size_t row = 0; row < cpt.prob_one.size(); ++row) {
                std::string bits;
                for (std::size_t b = k; b-- > 0;)
                    bits += ((row >> b) & 1u) ? '1' : '0';
                out << "cpt " << f << " " << (k == 0 ? "-" : bits) << " " << cpt.prob_one[row].str() << "\n";
            }
        }
    }
    if (const auto* e = std::get_if<ExplicitReward>(&t.reward)) {
        for (const auto& [key, value] : e->entries)
            out << "reward " << bits_text(key.first) << " " << key.second << " " << value.compact() << "\n";
    } else {
        const auto& r = std::get<SuccinctReward>(t.reward);
        out << "reward-circuit " << r.state_bits << " " << r.action_bits << " " << r.index_bits << " "
            << r.width.get_str() << "\n"
            << netlist(r.circuit) << "end\n";
    }
    return out.str();
}

Policy parse_policy(std::string_view text)
{
    const auto lines = tokenize(text, "#");
    if (lines.empty())
        throw ParseError(1, "empty policy file");
    const std::string kind = lines[0].tokens[0] == "FM-init" ? "FM" : lines[0].tokens[0];
    std::map<std::vector<std::size_t>, std::vector<std::size_t>> entries;
    std::optional<std::size_t> init;
    for (const auto& l : lines) {
        const auto& t = l.tokens;
        if (t[0] == "FM-init" && kind == "FM") {
            expect_arity(l, 2);
            if (init)
                throw ParseError(l.number, "duplicate FM-init");
            init = to_index(l, t[1]);
            continue;
        }
        if (t[0] != kind)
            throw ParseError(l.number, "mixed policy kinds: '" + t[0] + "' in a " + kind + " policy");
        std::size_t key_len, value_len;
        if (kind == "S") {
            key_len = 1, value_len = 1;
        } else if (kind == "TD") {
            key_len = 2, value_len = 1;
        } else if (kind == "FM") {
            key_len = 2, value_len = 2;
        } else {
            throw ParseError(l.number, "unknown policy line '" + t[0] + "'");
        }
        expect_arity(l, 1 + key_len + value_len);
        std::vector<std::size_t> key, value;
        for (std::size_t k = 0; k < key_len; ++k)
            key.push_back(to_index(l, t[1 + k]));
        for (std::size_t k = 0; k < value_len; ++k)
            value.push_back(to_index(l, t[1 + key_len + k]));
        if (!entries.emplace(key, value).second)
            throw ParseError(l.number, "duplicate policy entry");
    }
    const std::size_t last = lines.back().number;
    const auto max_of = [&](std::size_t pos) {
        std::size_t m = 0;
        for (const auto& [k, v] : entries)
            m = std::max(m, k[pos] + 1);
        return m;
    };
    const auto missing = [&](const std::vector<std::size_t>& key) {
        std::string s;
        for (const auto k : key)
            s += " " + std::to_string(k);
        throw ParseError(last, "policy has no entry for" + s);
    };
    if (kind == "S") {
        StationaryPolicy p{std::vector<ActionId>(max_of(0))};
        for (ObsId o = 0; o < p.act.size(); ++o) {
            const auto it = entries.find({o});
            if (it == entries.end())
                missing({o});
            p.act[o] = it->second[0];
        }
        return p;
    }
    if (kind == "TD") {
        const std::size_t h = max_of(0), no = max_of(1);
        TimeDependentPolicy p{std::vector<std::vector<ActionId>>(h, std::vector<ActionId>(no))};
        for (std::size_t step = 0; step < h; ++step)
            for (ObsId o = 0; o < no; ++o) {
                const auto it = entries.find({step, o});
                if (it == entries.end())
                    missing({step, o});
                p.act[step][o] = it->second[0];
            }
        return p;
    }
    FiniteMemoryPolicy p;
    p.n_obs = max_of(0);
    p.n_memory = max_of(1);
    for (const auto& [k, v] : entries)
        p.n_memory = std::max(p.n_memory, v[1] + 1);
    if (!init)
        throw ParseError(last, "finite-memory policy needs an 'FM-init' line");
    p.initial_memory = *init;
    p.n_memory = std::max(p.n_memory, *init + 1);
    for (ObsId o = 0; o < p.n_obs; ++o)
        for (std::size_t q = 0; q < p.n_memory; ++q) {
            const auto it = entries.find({o, q});
            if (it == entries.end())
                missing({o, q});
            p.steps.push_back({it->second[0], it->second[1]});
        }
    return p;
}

std::string serialize_policy(const Policy& policy)
{
    std::ostringstream out;
    if (const auto* s = std::get_if<StationaryPolicy>(&policy)) {
        for (ObsId o = 0; o < s->act.size(); ++o)
            out << "S " << o << " " << s->act[o] << "\n";
    } else if (const auto* td = std::get_if<TimeDependentPolicy>(&policy)) {
        for (std::size_t t = 0; t < td->horizon(); ++t)
            for (ObsId o = 0; o < td->act[t].size(); ++o)
                out << "TD " << t << " " << o << " " << td->act[t][o] << "\n";
    } else if (const auto* fm = std::get_if<FiniteMemoryPolicy>(&policy)) {
        out << "FM-init " << fm->initial_memory << "\n";
        for (ObsId o = 0; o < fm->n_obs; ++o)
            for (std::size_t q = 0; q < fm->n_memory; ++q) {
                const auto& st = fm->at(o, q);
                out << "FM " << o << " " << q << " " << st.action << " " << st.next_memory << "\n";
            }
    } else {
        throw DomainError("history-dependent policies have no text form");
    }
    return out.str();
}

} // namespace hforge
