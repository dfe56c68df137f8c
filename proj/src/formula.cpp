#include "hforge/formula.hpp"

#include "hforge/errors.hpp"

#include <algorithm>

namespace hforge {

void validate_cnf(const Cnf& f)
{
    for (std::size_t j = 0; j < f.clauses.size(); ++j) {
        const auto& c = f.clauses[j];
        if (c.empty() || c.size() > 3)
            throw DomainError("clause " + std::to_string(j + 1) + " has " + std::to_string(c.size()) +
                              " literals, expected 1 to 3");
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i].var >= f.n_vars)
                throw DomainError("clause " + std::to_string(j + 1) + " uses undeclared variable " +
                                  std::to_string(c[i].var + 1));
            for (std::size_t k = 0; k < i; ++k)
                if (c[k].var == c[i].var)
                    throw DomainError("clause " + std::to_string(j + 1) + " repeats variable " +
                                      std::to_string(c[i].var + 1));
        }
    }
}

bool satisfies(const Clause& c, const std::vector<bool>& assignment)
{
    return std::any_of(c.begin(), c.end(), [&](const Literal& l) { return assignment[l.var] == l.positive; });
}

std::size_t count_satisfied(const Cnf& f, const std::vector<bool>& assignment)
{
    return static_cast<std::size_t>(
        std::count_if(f.clauses.begin(), f.clauses.end(), [&](const Clause& c) { return satisfies(c, assignment); }));
}

void validate_ssat(const SsatFormula& f)
{
    validate_cnf(f.matrix);
    std::vector<int> seen(f.matrix.n_vars, 0);
    for (const auto& q : f.prefix) {
        if (q.var >= f.matrix.n_vars)
            throw DomainError("quantified variable " + std::to_string(q.var + 1) + " is not declared");
        if (seen[q.var]++)
            throw DomainError("variable " + std::to_string(q.var + 1) + " is quantified twice");
    }
    for (std::size_t v = 0; v < seen.size(); ++v)
        if (!seen[v])
            throw DomainError("variable " + std::to_string(v + 1) + " is not quantified");
}

std::string to_string(GateKind k)
{
    switch (k) {
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Not: return "NOT";
    case GateKind::Const0: return "CONST0";
    case GateKind::Const1: return "CONST1";
    }
    return "?";
}

std::size_t arity(GateKind k)
{
    switch (k) {
    case GateKind::And:
    case GateKind::Or: return 2;
    case GateKind::Not: return 1;
    default: return 0;
    }
}

std::vector<std::size_t> Circuit::input_gates() const
{
    std::vector<std::size_t> out;
    for (std::size_t g = 0; g < gates.size(); ++g)
        if (is_input(gates[g].kind))
            out.push_back(g);
    return out;
}

std::size_t Circuit::add(GateKind kind, std::vector<std::size_t> inputs, std::string id)
{
    if (id.empty())
        id = "g" + std::to_string(gates.size());
    gates.push_back(Gate{std::move(id), kind, std::move(inputs)});
    return gates.size() - 1;
}

std::vector<std::size_t> topological_order(const Circuit& c)
{
    // 0 = unvisited, 1 = on stack, 2 = done
    std::vector<int> mark(c.gates.size(), 0);
    std::vector<std::size_t> order;
    order.reserve(c.gates.size());
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t root = 0; root < c.gates.size(); ++root) {
        if (mark[root])
            continue;
        stack.emplace_back(root, 0);
        mark[root] = 1;
        while (!stack.empty()) {
            auto& [g, next] = stack.back();
            if (next < c.gates[g].inputs.size()) {
                const std::size_t in = c.gates[g].inputs[next++];
                if (in >= c.gates.size())
                    throw DomainError("gate " + c.gates[g].id + " references unknown gate");
                if (mark[in] == 1)
                    throw DomainError("circuit has a cycle through gate " + c.gates[in].id);
                if (mark[in] == 0) {
                    mark[in] = 1;
                    stack.emplace_back(in, 0);
                }
            } else {
                mark[g] = 2;
                order.push_back(g);
                stack.pop_back();
            }
        }
    }
    return order;
}

void validate_circuit(const Circuit& c)
{
    for (const auto& g : c.gates)
        if (g.inputs.size() != arity(g.kind))
            throw DomainError("gate " + g.id + " (" + to_string(g.kind) + ") has " + std::to_string(g.inputs.size()) +
                              " inputs, expected " + std::to_string(arity(g.kind)));
    for (const auto o : c.outputs)
        if (o >= c.gates.size())
            throw DomainError("output references unknown gate");
    topological_order(c);
}

} // namespace hforge
