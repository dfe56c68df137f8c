#include "hforge/io.hpp"
#include "hforge/oracles.hpp"
#include "hforge/reductions.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace hforge;
using namespace hforge::testing;

namespace {

std::size_t error_line(const std::function<void()>& f)
{
    try {
        f();
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST_CASE("DIMACS parsing")
{
    const auto one = parse_cnf("p cnf 1 1\n1 0");
    CHECK(one == Cnf{1, {{{0, true}}}});
    CHECK(parse_cnf("c sample\np cnf 4 2\n-1 3 4 0\n1 -2 4 0\n") == sample_formula());
    CHECK(parse_cnf("p cnf 4 2\n-1 3\n4 0 1 -2 4 0\n") == sample_formula());
    CHECK_THROWS_AS(parse_cnf("p cnf 2 1\n1 -1 0"), ParseError);
    CHECK(error_line([] { parse_cnf("p cnf 2 1\n1 -1 0"); }) == 2);
    CHECK(error_line([] { parse_cnf("p cnf 4 1\nc\n1 2 3 4 0"); }) == 3);
    CHECK_THROWS_AS(parse_cnf("p cnf 2 1\n1 3 0"), ParseError);
    CHECK_THROWS_AS(parse_cnf("p cnf 2 2\n1 2 0"), ParseError);
    CHECK_THROWS_AS(parse_cnf("1 2 0"), ParseError);
    CHECK_THROWS_AS(parse_cnf("p cnf 2 1\n1 x 0"), ParseError);
    CHECK_THROWS_AS(parse_cnf("p cnf 2 1\n1 2"), ParseError);
}

TEST_CASE("CNF round trip")
{
    for (const auto& f : cnf_corpus())
        CHECK(parse_cnf(serialize_cnf(f)) == f);
}

TEST_CASE("SSAT parsing")
{
    CHECK(parse_ssat("p cnf 2 1\ne 1 0\nr 2 0\n1 2 0") == ssat_exists_random());
    CHECK_THROWS_AS(parse_ssat("p cnf 2 1\ne 1 0\n1 2 0"), ParseError);
    CHECK_THROWS_AS(parse_ssat("p cnf 2 1\ne 1 0\nr 1 0\n1 2 0"), ParseError);
    CHECK_THROWS_AS(parse_ssat("p cnf 2 1\ne 1 0\n1 2 0\nr 2 0"), ParseError);
    for (const auto& f : {ssat_exists_random(), ssat_random_exists()})
        CHECK(parse_ssat(serialize_ssat(f)) == f);
    const auto multi = parse_ssat("p cnf 3 1\ne 1 3 0\nr 2 0\n1 2 3 0\n");
    CHECK(multi.prefix.size() == 3);
    CHECK(multi.prefix[1].var == 2);
}

TEST_CASE("netlist parsing")
{
    const auto c = parse_circuit("gate a CONST 1\ngate b CONST 0\ngate o OR a b\noutput o\n");
    CHECK(circuit_eval(c) == std::vector<bool>{true});
    const auto fwd = parse_circuit("output o\ngate o NOT a\ngate a CONST 0\n");
    CHECK(circuit_eval(fwd) == std::vector<bool>{true});
    CHECK_THROWS_AS(parse_circuit("gate a AND a a\noutput a\n"), ParseError);
    CHECK_THROWS_AS(parse_circuit("gate a NOT b\n"), ParseError);
    CHECK_THROWS_AS(parse_circuit("gate a CONST 1\ngate b NOT a a\n"), ParseError);
    CHECK_THROWS_AS(parse_circuit("gate a CONST 1\ngate a CONST 0\n"), ParseError);
    CHECK_THROWS_AS(parse_circuit("gate a XOR b c\n"), ParseError);
    CHECK_THROWS_AS(parse_circuit("gate a CONST 2\n"), ParseError);
    CHECK(error_line([] { parse_circuit("# c\ngate a CONST 1\noutput zz\n"); }) == 3);
}

TEST_CASE("full adder netlist")
{
    const auto fa = full_adder();
    const auto text = serialize_circuit(fa);
    const auto parsed = parse_circuit(text);
    CHECK(parsed == fa);
    for (unsigned x = 0; x < 8; ++x) {
        const bool a = x & 4, b = x & 2, c = x & 1;
        const unsigned total = a + b + c;
        CHECK(circuit_eval(parsed, {a, b, c}) == std::vector<bool>{total >= 2, (total & 1) != 0});
    }
}

TEST_CASE("succinct instance round trip")
{
    Circuit c;
    c.outputs = {c.add(GateKind::Or, {c.add(GateKind::Const1, {}), c.add(GateKind::Const0, {})})};
    const auto s = synthesize_succinct_instance(c);
    const auto back = parse_succinct_instance(serialize_succinct_instance(s));
    CHECK(back == s);
    CHECK_THROWS_AS(parse_succinct_instance(serialize_circuit(s.circuit)), ParseError);
    CHECK_THROWS_AS(parse_succinct_instance(serialize_circuit(s.circuit) + "index-width 9\n"), ParseError);
}

TEST_CASE("POMDP round trip")
{
    Pomdp loop(1, 1, 1);
    loop.set_transition(0, 0, 0, 1);
    const auto text = serialize_pomdp(loop);
    CHECK(text == "POMDP v1\nstates 1\nactions 1\nobservations 1\ninitial 0\nobs 0 0\nT 0 0 0 1/1\n");
    CHECK(serialize_pomdp(parse_pomdp(text)) == text);

    Rng rng(77);
    for (int i = 0; i < 50; ++i) {
        const auto m = random_pomdp(rng);
        CHECK(parse_pomdp(serialize_pomdp(m)) == m);
    }
    const auto g = threesat_to_pomdp(sample_formula());
    const auto back = parse_pomdp(serialize_pomdp(g.pomdp()));
    CHECK(back == g.pomdp());
    CHECK(brute_force_stationary_value(back, g.recommended_metric).value ==
          brute_force_stationary_value(g.pomdp(), g.recommended_metric).value);
    const auto amp = amplify_uomdp(sample_formula(), frac(1, 2));
    CHECK(parse_pomdp(serialize_pomdp(amp.pomdp())) == amp.pomdp());
}

TEST_CASE("POMDP format errors")
{
    const std::string head = "POMDP v1\nstates 2\nactions 1\nobservations 1\ninitial 0\nobs 0 0\nobs 1 0\n";
    try {
        parse_pomdp(head + "T 0 0 1 1/3\n");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].kind == Violation::Kind::RowSum);
    }
    CHECK_THROWS_AS(parse_pomdp(head + "T 0 0 1 1\nT 0 0 1 1\n"), ParseError);
    CHECK_THROWS_AS(parse_pomdp(head + "T 0 0 1 3/2\n"), ParseError);
    CHECK_THROWS_AS(parse_pomdp(head + "T 0 0 5 1\n"), ParseError);
    CHECK_THROWS_AS(parse_pomdp(head + "R 0 0 0.5\n"), ParseError);
    CHECK_THROWS_AS(parse_pomdp("POMDP v2\n"), ParseError);
    CHECK_THROWS_AS(parse_pomdp("POMDP v1\nstates 1\nactions 1\nobservations 1\ninitial 0\n"), ParseError);
    CHECK(error_line([&] { parse_pomdp(head + "# note\nX 1\n"); }) == 9);
    const auto ok = parse_pomdp(head + "# comment\nT 0 0 1 1\nR 1 0 -7/3\n");
    CHECK(ok.reward(1, 0) == frac(-7, 3));
}

TEST_CASE("2TBN round trip")
{
    const auto t = circuit_to_2tbn(full_adder());
    const auto back = parse_tbn(serialize_tbn(t));
    CHECK(back == t);
    CHECK(expand_2tbn(back) == expand_2tbn(t));

    Circuit c;
    c.outputs = {c.add(GateKind::And, {c.add(GateKind::Const1, {}), c.add(GateKind::Const1, {})})};
    SuccinctOptions o;
    o.test_exponent = 5;
    const auto g = succinct_cvp_to_2tbn(synthesize_succinct_instance(c), o);
    const auto sb = parse_tbn(serialize_tbn(g.tbn()));
    CHECK(sb == g.tbn());

    Tbn e;
    e.fluents = {"a"};
    e.initial = {true};
    e.actions = {TbnAction{{FluentCpt{{{0, false}}, {frac(1, 3), Rat(1)}}}}};
    ExplicitReward r;
    r.entries[{FluentState{true}, 0}] = frac(5, 2);
    e.reward = r;
    CHECK(parse_tbn(serialize_tbn(e)) == e);
}

TEST_CASE("2TBN format errors")
{
    const std::string head = "TBN v1\nfluents a b\ninitial 00\nactions 1\naction 0\n";
    const std::string body = "dep 0\ncpt 0 - 1/2\ndep 1 0'\ncpt 1 0 0\ncpt 1 1 1\n";
    CHECK_NOTHROW(parse_tbn(head + body));
    CHECK_THROWS_AS(parse_tbn(head + "dep 0\ncpt 0 - 3/2\ndep 1 0'\ncpt 1 0 0\ncpt 1 1 1\n"), ParseError);
    CHECK_THROWS_AS(parse_tbn(head + "dep 0\ncpt 0 - 1/2\ncpt 1 - 1\n"), ParseError);
    CHECK_THROWS_AS(parse_tbn(head + "dep 0\ncpt 0 - 1/2\n"), ParseError);
    CHECK_THROWS_AS(parse_tbn(head + "dep 0 1'\ncpt 0 0 0\ncpt 0 1 0\ndep 1 0'\ncpt 1 0 0\ncpt 1 1 1\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_tbn(head + "dep 0\ncpt 0 - 1/2\ndep 1 0'\ncpt 1 0 0\n"), ParseError);
}

TEST_CASE("policy round trip")
{
    Rng rng(31);
    for (int i = 0; i < 30; ++i) {
        const auto m = random_pomdp(rng);
        const auto s = random_stationary(rng, m);
        CHECK(std::get<StationaryPolicy>(parse_policy(serialize_policy(s))) == s);
        const auto td = random_time_dependent(rng, m, 3);
        CHECK(std::get<TimeDependentPolicy>(parse_policy(serialize_policy(td))) == td);
        const auto fm = random_finite_memory(rng, m);
        CHECK(std::get<FiniteMemoryPolicy>(parse_policy(serialize_policy(fm))) == fm);
    }
    CHECK_THROWS_AS(serialize_policy(HistoryPolicy{}), DomainError);
    CHECK_THROWS_AS(parse_policy("S 0 1\nTD 0 0 1\n"), ParseError);
    CHECK_THROWS_AS(parse_policy("S 0 1\nS 0 0\n"), ParseError);
    CHECK_THROWS_AS(parse_policy("S 1 1\n"), ParseError);
    CHECK_THROWS_AS(parse_policy("FM 0 0 1 0\n"), ParseError);
    CHECK_THROWS_AS(parse_policy("H 0 1\n"), ParseError);
}
