#include "hforge/model.hpp"
#include "hforge/reductions.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace hforge;
using namespace hforge::testing;

TEST_CASE("a well-formed chain has no violations")
{
    Pomdp m(2, 1, 1);
    m.set_transition(0, 0, 1, 1);
    m.set_transition(1, 0, 0, 1);
    CHECK(validate_pomdp(m).empty());
}

TEST_CASE("row summing to one half is a row-sum violation")
{
    Pomdp m(2, 1, 1);
    m.set_transition(0, 0, 1, frac(1, 2));
    const auto v = validate_pomdp(m);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == Violation::Kind::RowSum);
    CHECK(v[0].message.find("(0,0)") != std::string::npos);
}

TEST_CASE("an all-zero row is valid")
{
    Pomdp m(1, 1, 1);
    CHECK(validate_pomdp(m).empty());
}

TEST_CASE("setters reject out-of-range indices")
{
    Pomdp m(2, 2, 1);
    CHECK_THROWS_AS(m.set_transition(2, 0, 0, 1), DomainError);
    CHECK_THROWS_AS(m.set_transition(0, 2, 0, 1), DomainError);
    CHECK_THROWS_AS(m.set_obs(0, 1), DomainError);
    CHECK_THROWS_AS(m.set_reward(0, 5, 1), DomainError);
}

TEST_CASE("transitions accumulate and vanish at zero")
{
    Pomdp m(2, 1, 1);
    m.add_transition(0, 0, 1, frac(1, 3));
    m.add_transition(0, 0, 1, frac(1, 3));
    CHECK(m.prob(0, 0, 1) == frac(2, 3));
    m.set_transition(0, 0, 1, 0);
    CHECK(m.row(0, 0).empty());
}

TEST_CASE("observability classes")
{
    Pomdp full(3, 1, 3);
    for (StateId s = 0; s < 3; ++s)
        full.set_obs(s, s);
    CHECK(classify_observability(full) == ObservabilityClass::FullyObservable);
    Pomdp blind(3, 1, 1);
    CHECK(classify_observability(blind) == ObservabilityClass::Unobservable);
    CHECK(classify_observability(threesat_to_pomdp(sample_formula()).pomdp()) == ObservabilityClass::General);
}

TEST_CASE("compiled gadgets validate")
{
    for (const auto& f : cnf_corpus()) {
        CHECK(validate_pomdp(threesat_to_pomdp(f).pomdp()).empty());
        CHECK(validate_pomdp(threesat_to_uomdp(f).pomdp()).empty());
        CHECK(validate_pomdp(infinite_horizon_sat_gadget(f).pomdp()).empty());
    }
}

TEST_CASE("metrics validate their discount")
{
    CHECK_NOTHROW(validate_metric(InfiniteDiscounted{frac(1, 2)}));
    CHECK_THROWS_AS(validate_metric(InfiniteDiscounted{Rat(1)}), DomainError);
    CHECK_THROWS_AS(validate_metric(FiniteDiscounted{Rat(0), 3}), DomainError);
    CHECK(is_finite(FiniteTotal{2}));
    CHECK(!is_finite(Average{}));
    CHECK(discount_of(FiniteTotal{2}) == Rat(1));
}

TEST_CASE("history policy lookup")
{
    HistoryPolicy p;
    const std::vector<ObsId> a{0}, b{0, 1};
    p.set(a, 1);
    p.set(b, 0);
    CHECK(p.lookup(a) == 1);
    CHECK(p.lookup(b) == 0);
    CHECK(!p.lookup(std::vector<ObsId>{1}));
    CHECK(p.horizon() == 2);
}
