#include "hforge/verify.hpp"

#include "hforge/evaluation.hpp"
#include "hforge/io.hpp"
#include "hforge/oracles.hpp"
#include "hforge/reductions.hpp"

#include <map>
#include <sstream>

namespace hforge {

std::string to_string(SourceKind k)
{
    switch (k) {
    case SourceKind::Cnf: return "cnf";
    case SourceKind::Ssat: return "ssat";
    case SourceKind::Circuit: return "circuit";
    case SourceKind::Succinct: return "succinct";
    }
    return "?";
}

SourceKind detect_source_kind(std::string_view text)
{
    bool gate = false, quantifier = false;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        std::istringstream words(line);
        std::string first;
        if (!(words >> first))
            continue;
        if (first == "index-width")
            return SourceKind::Succinct;
        if (first == "gate" || first == "output")
            gate = true;
        if (first == "e" || first == "r")
            quantifier = true;
    }
    if (gate)
        return SourceKind::Circuit;
    return quantifier ? SourceKind::Ssat : SourceKind::Cnf;
}

std::string VerifyReport::text() const
{
    std::ostringstream out;
    out << "path: " << path << "\n"
        << "source: " << (inside_gap ? "gap" : yes_instance ? "yes" : "no") << " (" << truth << ")\n"
        << "claim: " << claim << "\n";
    if (value)
        out << "value: " << value->str() << "\n";
    for (const auto& n : notes)
        out << "note: " << n << "\n";
    out << (pass ? "PASS" : "FAIL") << "\n";
    return out.str();
}

bool succinct_circuit_value(const SuccinctCircuitInstance& s, const Caps& caps)
{
    validate_succinct_instance(s);
    std::map<std::uint64_t, bool> memo;
    std::map<std::uint64_t, bool> open;
    const auto eval = [&](auto&& self, std::uint64_t g, GateCode type) -> bool {
        if (const auto it = memo.find(g); it != memo.end())
            return it->second;
        if (open[g])
            throw DomainError("succinct circuit has a cycle through gate " + std::to_string(g));
        if (memo.size() >= caps.states)
            throw CapExceeded("succinct circuit has more than " + std::to_string(caps.states) + " gates");
        open[g] = true;
        bool v = false;
        const auto pred = [&](unsigned k) {
            const auto q = query_neighbor(s, g, k);
            return self(self, q.gate, q.type);
        };
        switch (type) {
        case GateCode::And: v = pred(0) && pred(1); break;
        case GateCode::Or: v = pred(0) || pred(1); break;
        case GateCode::Not: v = !pred(0); break;
        case GateCode::Input0: v = false; break;
        case GateCode::Input1: v = true; break;
        default: throw DomainError("gate " + std::to_string(g) + " has an invalid type code");
        }
        open[g] = false;
        memo[g] = v;
        return v;
    };
    const auto out = query_neighbor(s, 0, 2);
    return eval(eval, out.gate, out.type);
}

namespace {

std::string sat_truth(const SatResult& r, const Cnf& f)
{
    return std::to_string(r.max_satisfied) + "/" + std::to_string(f.clauses.size()) + " clauses satisfiable";
}

void check_claim(VerifyReport& rep, const ValueClaim& claim, const Rat& value)
{
    rep.claim = claim.text;
    rep.value = value;
    rep.pass = rep.yes_instance ? claim.holds_for_yes(value) : claim.holds_for_no(value);
}

VerifyReport verify_cnf(const Cnf& f, const VerifyOptions& o)
{
    VerifyReport rep;
    rep.path = o.path.empty() ? "sat3" : o.path;
    const auto sat = sat_enumerate(f, o.caps);
    rep.yes_instance = sat.satisfiable;
    rep.truth = sat_truth(sat, f);
    if (rep.path == "sat3" || rep.path == "gap") {
        const auto g = rep.path == "sat3" ? threesat_to_pomdp(f) : epsilon_gap_gadget(f, o.eps);
        const auto best = brute_force_stationary_value(g.pomdp(), g.recommended_metric, o.caps);
        check_claim(rep, g.claim, best.value);
    } else if (rep.path == "uomdp") {
        const auto g = threesat_to_uomdp(f);
        const auto best = brute_force_time_dependent_value(g.pomdp(), g.recommended_metric, o.caps);
        check_claim(rep, g.claim, best.value);
        const bool maxsat = best.value == Rat(static_cast<unsigned long>(sat.max_satisfied));
        rep.notes.push_back(std::string("value ") + (maxsat ? "equals" : "differs from") +
                            " the maximum satisfied clause count " + std::to_string(sat.max_satisfied));
        rep.pass = rep.pass && maxsat;
    } else if (rep.path == "amplify") {
        const auto g = amplify_uomdp(f);
        const auto best = brute_force_time_dependent_value(g.pomdp(), g.recommended_metric, o.caps);
        check_claim(rep, g.claim, best.value);
    } else if (rep.path == "inf") {
        const auto g = infinite_horizon_sat_gadget(f);
        const auto avg = brute_force_stationary_value(g.pomdp(), Average{}, o.caps);
        check_claim(rep, g.claim, avg.value);
        const Rat half(BigInt(1), BigInt(2));
        const auto disc = brute_force_stationary_value(g.pomdp(), InfiniteDiscounted{half}, o.caps);
        const bool positive = disc.value.sign() > 0;
        rep.notes.push_back("discounted value (beta 1/2) " + disc.value.str());
        rep.pass = rep.pass && positive == rep.yes_instance;
    } else {
        throw DomainError("unknown verification path '" + rep.path + "' for a CNF source");
    }
    return rep;
}

VerifyReport verify_ssat(const SsatFormula& f, const VerifyOptions& o)
{
    VerifyReport rep;
    rep.path = "ssat";
    const unsigned c = o.c.value_or(1);
    const std::size_t k = o.k.value_or(1);
    const Rat sv = ssat_value(f, o.caps);
    const Rat err(BigInt(1), pow2(c));
    const auto g = ssat_repeat(ssat_to_pomdp(f, c), k);
    const Rat value = exact_history_value(g.pomdp(), g.recommended_metric, o.caps);
    rep.claim = g.claim.text;
    rep.value = value;
    rep.truth = "ssat value " + sv.str();
    const Rat kk(static_cast<unsigned long>(k));
    const bool floor_ok = value >= kk * sv;
    rep.notes.push_back("value " + std::string(floor_ok ? ">=" : "<") + " k * ssat value = " + (kk * sv).str());
    if (sv > Rat(1) - err) {
        rep.yes_instance = true;
        rep.pass = g.claim.holds_for_yes(value) && floor_ok;
    } else if (sv < err) {
        rep.yes_instance = false;
        rep.pass = g.claim.holds_for_no(value) && floor_ok;
    } else {
        rep.inside_gap = true;
        rep.notes.push_back("ssat value lies inside the promise gap; only the lower bound is checked");
        rep.pass = floor_ok;
    }
    return rep;
}

VerifyReport verify_tbn(const Circuit& c, const VerifyOptions& o)
{
    VerifyReport rep;
    rep.path = "tbn";
    const auto layout = circuit_to_2tbn_layout(c);
    const std::size_t n_in = layout.input_fluents.size();
    if (n_in > o.caps.sat_vars)
        throw CapExceeded("circuit has " + std::to_string(n_in) + " inputs, cap is " +
                          std::to_string(o.caps.sat_vars));
    rep.claim = "one step of the 2TBN computes every output with probability 1";
    rep.truth = std::to_string(std::size_t{1} << n_in) + " input vectors";
    rep.yes_instance = true;
    rep.pass = true;
    std::size_t mismatches = 0;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n_in); ++x) {
        std::vector<bool> in(n_in);
        FluentState st(layout.tbn.n_fluents(), false);
        for (std::size_t i = 0; i < n_in; ++i) {
            in[i] = ((x >> (n_in - 1 - i)) & 1u) != 0;
            st[layout.input_fluents[i]] = in[i];
        }
        const auto expect = circuit_eval(c, in);
        const auto next = tbn_successors(layout.tbn, st, 0);
        bool ok = next.size() == 1 && next[0].second == Rat(1);
        for (std::size_t i = 0; ok && i < expect.size(); ++i)
            ok = next[0].first[layout.output_fluents[i]] == expect[i];
        if (!ok)
            ++mismatches;
    }
    rep.notes.push_back(std::to_string(layout.tbn.n_fluents()) + " fluents for " + std::to_string(c.gates.size()) +
                        " gates");
    rep.pass = mismatches == 0;
    if (mismatches)
        rep.notes.push_back(std::to_string(mismatches) + " input vectors disagree");
    return rep;
}

VerifyReport verify_succinct(const SuccinctCircuitInstance& s, const VerifyOptions& o)
{
    VerifyReport rep;
    rep.path = "succinct";
    rep.yes_instance = succinct_circuit_value(s, o.caps);
    rep.truth = "decoded circuit evaluates to " + std::string(rep.yes_instance ? "1" : "0");
    const std::size_t gates = std::size_t{1} << s.index_bits;
    SuccinctOptions so;
    so.k_gap = o.gap;
    so.test_exponent = gates + o.gap + 1;
    const auto g = succinct_cvp_to_2tbn(s, so);
    const auto ex = expand_2tbn_reachable(g.tbn(), o.caps);
    const auto best = brute_force_stationary_value(ex.model, g.recommended_metric, o.caps);
    rep.notes.push_back("reduced reward exponent " + std::to_string(*so.test_exponent) + ", " +
                        std::to_string(ex.states.size()) + " reachable states");
    check_claim(rep, g.claim, best.value);
    return rep;
}

VerifyReport verify_circuit(const Circuit& c, const VerifyOptions& o)
{
    const std::string path = o.path.empty() ? "cvp" : o.path;
    if (path == "tbn")
        return verify_tbn(c, o);
    if (c.outputs.size() != 1)
        throw DomainError("circuit must have exactly one output");
    if (path == "succinct")
        return verify_succinct(synthesize_succinct_instance(normalize_out_degree(c)), o);
    if (path != "cvp")
        throw DomainError("unknown verification path '" + path + "' for a circuit source");
    VerifyReport rep;
    rep.path = path;
    rep.yes_instance = circuit_eval(c)[0];
    rep.truth = "circuit evaluates to " + std::string(rep.yes_instance ? "1" : "0");
    const auto g = cvp_to_mdp(c, o.gap);
    const auto best = brute_force_stationary_value(g.pomdp(), g.recommended_metric, o.caps);
    check_claim(rep, g.claim, best.value);
    return rep;
}

} // namespace

VerifyReport verify_source(std::string_view text, const VerifyOptions& options)
{
    switch (detect_source_kind(text)) {
    case SourceKind::Cnf: return verify_cnf(parse_cnf(text), options);
    case SourceKind::Ssat: return verify_ssat(parse_ssat(text), options);
    case SourceKind::Circuit: return verify_circuit(parse_circuit(text), options);
    case SourceKind::Succinct: {
        if (!options.path.empty() && options.path != "succinct")
            throw DomainError("succinct instances only support the succinct path");
        return verify_succinct(parse_succinct_instance(text), options);
    }
    }
    throw DomainError("unknown source kind");
}

} // namespace hforge
