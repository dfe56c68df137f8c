#include "hforge/evaluation.hpp"
#include "hforge/oracles.hpp"
#include "hforge/reductions.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace hforge;
using namespace hforge::testing;

namespace {

const Cnf single_clause{3, {{{0, true}, {1, true}, {2, true}}}};

Rat stationary(const GadgetOutput& g)
{
    return brute_force_stationary_value(g.pomdp(), g.recommended_metric).value;
}

Rat time_dependent(const GadgetOutput& g)
{
    return brute_force_time_dependent_value(g.pomdp(), g.recommended_metric).value;
}

// All deterministic strategies for the existential variables, each given as
// a truth table over the bits seen before it.
std::vector<SsatStrategy> all_strategies(const SsatFormula& f)
{
    std::vector<std::size_t> sizes;
    std::size_t total = 0;
    for (std::size_t t = 0; t < f.prefix.size(); ++t) {
        sizes.push_back(f.prefix[t].quantifier == Quantifier::Exists ? std::size_t{1} << t : 0);
        total += sizes.back();
    }
    std::vector<SsatStrategy> out;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << total); ++code) {
        out.push_back([code, sizes](std::size_t step, const std::vector<bool>& prev) {
            std::size_t offset = 0;
            for (std::size_t t = 0; t < step; ++t)
                offset += sizes[t];
            std::size_t idx = 0;
            for (const bool b : prev)
                idx = idx * 2 + b;
            return ((code >> (offset + idx)) & 1u) != 0;
        });
    }
    return out;
}

Rat best_consistent(const GadgetOutput& g)
{
    Rat best(0);
    for (const auto& s : all_strategies(g.ssat->source)) {
        const auto p = history_policy_from(g.pomdp(), g.recommended_horizon, consistent_chooser(g, s));
        best = std::max(best, finite_horizon_performance(g.pomdp(), p, g.recommended_metric));
    }
    return best;
}

} // namespace

TEST_CASE("clause walk gadget")
{
    const auto g = threesat_to_pomdp(sample_formula());
    CHECK(g.pomdp().n_states() == 8);
    CHECK(stationary(g) == Rat(1));
    CHECK(g.claim.holds_for_yes(Rat(1)));
    const auto one = threesat_to_pomdp(single_clause);
    StationaryPolicy p{std::vector<ActionId>(one.pomdp().n_obs(), 0)};
    p.act[0] = 1;
    CHECK(finite_horizon_performance(one.pomdp(), p, one.recommended_metric) == Rat(1));
    CHECK(stationary(threesat_to_pomdp(contradiction())) == Rat(0));
    CHECK_THROWS_AS(threesat_to_pomdp(Cnf{2, {}}), DomainError);
}

TEST_CASE("gap gadget")
{
    CHECK(stationary(epsilon_gap_gadget(single_clause, frac(1, 2))) == Rat(4));
    CHECK(stationary(epsilon_gap_gadget(sample_formula(), Rat(0))) == Rat(2));
    CHECK(stationary(epsilon_gap_gadget(contradiction(), frac(1, 2))) == Rat(1));
    CHECK(stationary(epsilon_gap_gadget(sample_formula(), frac(3, 4))) == Rat(8));
    CHECK_THROWS_AS(epsilon_gap_gadget(single_clause, Rat(1)), DomainError);
}

TEST_CASE("unobservable gadget")
{
    CHECK(time_dependent(threesat_to_uomdp(contradiction())) == Rat(1));
    CHECK(time_dependent(threesat_to_uomdp(single_clause)) == Rat(1));
    CHECK(time_dependent(threesat_to_uomdp(sample_formula())) == Rat(2));
    const auto g = threesat_to_uomdp(sample_formula());
    CHECK(classify_observability(g.pomdp()) == ObservabilityClass::Unobservable);
    CHECK(g.recommended_horizon == 5);
}

TEST_CASE("amplified chain")
{
    const auto g = amplify_uomdp(sample_formula());
    CHECK(time_dependent(g) == Rat(1));
    const auto u = amplify_uomdp(contradiction());
    CHECK(time_dependent(u) == frac(1, 16));
    CHECK(*u.claim.no_value == frac(1, 16));
    const auto d = amplify_uomdp(sample_formula(), frac(1, 2));
    CHECK(d.recommended_metric.index() == Metric(FiniteDiscounted{frac(1, 2), 1}).index());
    CHECK(time_dependent(d) == Rat(1));
    CHECK_THROWS_AS(amplify_uomdp(sample_formula(), Rat(1)), DomainError);
}

TEST_CASE("SSAT gadget structure")
{
    const auto g = ssat_to_pomdp(ssat_exists_random());
    const auto& m = g.pomdp();
    CHECK(validate_pomdp(m).empty());
    const auto row = m.row(m.initial(), 0);
    CHECK(row.size() == 4);
    for (const auto& t : row)
        CHECK(t.prob == frac(1, 4));
    CHECK(g.ssat->stage3_entries.size() == 4);
}

TEST_CASE("SSAT gadget values")
{
    const auto a = ssat_to_pomdp(ssat_exists_random());
    CHECK(exact_history_value(a.pomdp(), a.recommended_metric) >= Rat(1));
    CHECK(best_consistent(a) == Rat(1));
    const auto b = ssat_to_pomdp(ssat_random_exists());
    CHECK(best_consistent(b) == frac(1, 2));
    CHECK(exact_history_value(b.pomdp(), b.recommended_metric) >= frac(1, 2));
}

TEST_CASE("SSAT repetition")
{
    const auto a = ssat_to_pomdp(ssat_exists_random());
    const auto a1 = ssat_repeat(a, 1);
    CHECK(a1.pomdp() == a.pomdp());
    CHECK(exact_history_value(a1.pomdp(), a1.recommended_metric) ==
          exact_history_value(a.pomdp(), a.recommended_metric));
    const auto a3 = ssat_repeat(a, 3);
    CHECK(exact_history_value(a3.pomdp(), a3.recommended_metric) == Rat(3));
    for (const auto& f : {ssat_exists_random(), ssat_random_exists()}) {
        for (unsigned c : {1u, 2u}) {
            const auto g = ssat_repeat(ssat_to_pomdp(f, c), 2);
            const Rat bound = Rat(2) * Rat(BigInt(1), pow2(c)) + Rat(4);
            CHECK(exact_history_value(g.pomdp(), g.recommended_metric) <= bound);
        }
    }
    CHECK_THROWS_AS(ssat_repeat(threesat_to_pomdp(sample_formula()), 2), DomainError);
}

TEST_CASE("SSAT constants")
{
    CHECK(choose_ssat_constants(frac(1, 2), 4) == std::pair<unsigned, std::size_t>{2, 65});
    CHECK(choose_ssat_constants(Rat(0), 1) == std::pair<unsigned, std::size_t>{2, 5});
    CHECK_THROWS_AS(choose_ssat_constants(Rat(1), 1), DomainError);
    // independent check of the defining inequalities
    for (const Rat eps : {Rat(0), frac(1, 3), frac(1, 2), frac(3, 4)})
        for (std::size_t n = 1; n <= 6; ++n) {
            const auto [c, k] = choose_ssat_constants(eps, n);
            const auto ok = [&](unsigned cc, std::size_t kk) {
                const Rat err(BigInt(1), pow2(cc));
                return Rat(pow2(cc)) > (Rat(2) - eps) / (Rat(1) - eps) &&
                       Rat(2 * n) < Rat(kk) * ((Rat(1) - eps) * (Rat(1) - err) - err);
            };
            CHECK(ok(c, k));
            CHECK(!(Rat(pow2(c - 1)) > (Rat(2) - eps) / (Rat(1) - eps)));
            CHECK(!ok(c, k - 1));
        }
}

TEST_CASE("circuit value MDP")
{
    Circuit orc;
    orc.outputs = {orc.add(GateKind::Or, {orc.add(GateKind::Const1, {}), orc.add(GateKind::Const0, {})})};
    CHECK(stationary(cvp_to_mdp(orc, 1)) == Rat(32));
    Circuit andc;
    andc.outputs = {andc.add(GateKind::And, {andc.add(GateKind::Const1, {}), andc.add(GateKind::Const0, {})})};
    const auto g = cvp_to_mdp(andc, 1);
    CHECK(stationary(g) == Rat(16));
    CHECK(g.claim.holds_for_no(Rat(16)));
    Circuit notc;
    notc.outputs = {notc.add(GateKind::Not, {notc.add(GateKind::Const0, {})})};
    CHECK(stationary(cvp_to_mdp(notc, 1)) == Rat(16));
    Circuit two = orc;
    two.outputs.push_back(0);
    CHECK_THROWS_AS(cvp_to_mdp(two, 1), DomainError);
}

TEST_CASE("circuit as a 2TBN")
{
    Circuit notc;
    const auto in = notc.add(GateKind::Const0, {});
    notc.outputs = {notc.add(GateKind::Not, {in})};
    const auto layout = circuit_to_2tbn_layout(notc);
    FluentState st(layout.tbn.n_fluents(), false);
    st[layout.input_fluents[0]] = true;
    const auto next = tbn_successors(layout.tbn, st, 0);
    REQUIRE(next.size() == 1);
    CHECK(next[0].second == Rat(1));
    CHECK(next[0].first[layout.output_fluents[0]] == false);

    const auto fa = full_adder();
    const auto l = circuit_to_2tbn_layout(fa);
    CHECK(l.tbn.n_fluents() <= 2 * fa.gates.size());
    for (unsigned x = 0; x < 8; ++x) {
        FluentState s(l.tbn.n_fluents(), false);
        std::vector<bool> bits{(x & 4) != 0, (x & 2) != 0, (x & 1) != 0};
        for (std::size_t i = 0; i < 3; ++i)
            s[l.input_fluents[i]] = bits[i];
        const auto succ = tbn_successors(l.tbn, s, 0);
        REQUIRE(succ.size() == 1);
        const unsigned total = bits[0] + bits[1] + bits[2];
        CHECK(succ[0].first[l.output_fluents[0]] == (total >= 2));
        CHECK(succ[0].first[l.output_fluents[1]] == ((total & 1) != 0));
    }
}

TEST_CASE("infinite-horizon gadget")
{
    const auto g = infinite_horizon_sat_gadget(sample_formula());
    CHECK(brute_force_stationary_value(g.pomdp(), Average{}).value == Rat(1));
    const auto u = infinite_horizon_sat_gadget(contradiction());
    CHECK(brute_force_stationary_value(u.pomdp(), Average{}).value == Rat(0));
    const auto s = infinite_horizon_sat_gadget(single_clause);
    const auto best = brute_force_stationary_value(s.pomdp(), InfiniteDiscounted{frac(1, 2)});
    CHECK(best.value.sign() > 0);
    CHECK(discounted_performance_stationary(s.pomdp(), best.witness, frac(1, 2)) == best.value);
}

TEST_CASE("claims and bounds")
{
    CHECK(satisfies_bound(Rat(1), Bound::AtMost, Rat(1)));
    CHECK(!satisfies_bound(Rat(1), Bound::Less, Rat(1)));
    CHECK(satisfies_bound(Rat(2), Bound::Greater, Rat(1)));
    ValueClaim c;
    c.text = "symbolic";
    CHECK_THROWS_AS(c.holds_for_yes(Rat(0)), DomainError);
}
