#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qdd/decompose.hpp"
#include "qdd/orders.hpp"
#include "qdd/validation.hpp"

#include <stdexcept>

using namespace qdd;

TEST_CASE("relation names are stable") {
    CHECK(std::string(order_relation_name(OrderRelation::stochastic)) ==
          "stochastic");
    CHECK(std::string(order_relation_name(OrderRelation::weak_stochastic)) ==
          "weak_stochastic");
    CHECK(std::string(order_relation_name(OrderRelation::relaxed_stochastic)) ==
          "relaxed_stochastic");
    CHECK(std::string(order_relation_name(OrderRelation::strong_stochastic)) ==
          "strong_stochastic");
    CHECK(std::string(order_relation_name(OrderRelation::dispersive)) ==
          "dispersive");
    CHECK(std::string(order_relation_name(OrderRelation::weak_dispersive)) ==
          "weak_dispersive");
}

TEST_CASE("equal distributions satisfy every order non-strictly") {
    Distribution u{Uniform{-1.0, 3.0}};
    for (auto* check : {&check_stochastic, &check_relaxed_stochastic,
                        &check_dispersive, &check_weak_dispersive}) {
        auto v = (*check)(u, u, 1024, std::nullopt);
        CHECK(v.holds);
        CHECK_FALSE(v.strict_holds);
        CHECK_FALSE(v.assumption_violated);
    }
    auto ws = check_weak_stochastic(u, u);
    CHECK(ws.holds);
    CHECK_FALSE(ws.strict_holds);
    // Strong needs a strictly positive coverage, which equality denies.
    auto ss = check_strong_stochastic(u, u);
    CHECK_FALSE(ss.holds);
    CHECK(ss.strict_holds == ss.holds);
}

TEST_CASE("a pure shift of a normal is stochastically larger") {
    Distribution f{Normal{1.0, 1.0}};
    Distribution g{Normal{0.0, 1.0}};
    for (auto v : {check_stochastic(f, g), check_weak_stochastic(f, g),
                   check_relaxed_stochastic(f, g), check_strong_stochastic(f, g)}) {
        CHECK(v.holds);
        CHECK(v.strict_holds);
        CHECK_FALSE(v.assumption_violated);
    }
    // The shifted copy has the same spread, so the dispersive comparison
    // holds in both directions and is never strict.
    auto d1 = check_dispersive(f, g);
    auto d2 = check_dispersive(g, f);
    CHECK(d1.holds);
    CHECK(d2.holds);
    CHECK_FALSE(d1.strict_holds);
    // The reverse stochastic comparison fails and reports a witness level.
    auto back = check_stochastic(g, f);
    CHECK_FALSE(back.holds);
    CHECK(back.witness.has_value());
}

TEST_CASE("half-width pair: stochastic but not strongly") {
    auto [f, g] = fixtures::half_width_pair();
    CHECK(check_stochastic(f, g).holds);
    CHECK_FALSE(check_stochastic(g, f).holds);
    CHECK(check_stochastic(f, g).strict_holds);
    CHECK(check_relaxed_stochastic(f, g).holds);
    // The lower interval ends coincide on half the coverage range, so no
    // level has both folded differences strictly positive.
    CHECK_FALSE(check_strong_stochastic(f, g).holds);
}

TEST_CASE("doubled scale family is dispersively ordered") {
    auto [f, g] = fixtures::double_scale_pair();
    auto fwd = check_dispersive(g, f);
    CHECK(fwd.holds);
    CHECK(fwd.strict_holds);
    CHECK_FALSE(check_dispersive(f, g).holds);
    CHECK(check_weak_dispersive(g, f).holds);
}

TEST_CASE("equal-spread pair separates strict from plain weak dispersive") {
    // The interval-width difference of this pair is zero at the default
    // even grid but strictly positive at odd resolutions that place a node
    // on the interior plateau.
    auto [f, g] = fixtures::equal_spread_pair();
    auto even = check_weak_dispersive(f, g, 1024);
    CHECK(even.holds);
    CHECK_FALSE(even.strict_holds);
    auto odd = check_weak_dispersive(f, g, 1025);
    CHECK(odd.holds);
    CHECK(odd.strict_holds);
    CHECK(odd.witness.has_value());
    CHECK(*odd.witness == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(check_weak_dispersive(g, f, 1024).holds);
    CHECK_FALSE(check_weak_dispersive(g, f, 1025).holds);
}

TEST_CASE("coverage-trade trio orders weakly stochastically but intransitively") {
    auto [f, g, h] = fixtures::coverage_trade_trio();
    CHECK(check_weak_stochastic(f, g).holds);
    CHECK(check_weak_stochastic(f, g).strict_holds);
    CHECK(check_weak_stochastic(g, h).holds);
    // The chain does not close: F fails against H in both directions'
    // sense of a transitive order.
    CHECK_FALSE(check_weak_stochastic(f, h).holds);
    CHECK_FALSE(check_weak_stochastic(h, f).holds);
    auto fail = check_weak_stochastic(f, h);
    CHECK(fail.witness.has_value());
    CHECK(fail.witness2.has_value());
}

TEST_CASE("mirrored-tail trio orders relaxedly but intransitively") {
    auto [f, g, h] = fixtures::mirrored_tail_trio();
    CHECK(check_relaxed_stochastic(f, g).strict_holds);
    CHECK(check_relaxed_stochastic(g, h).strict_holds);
    CHECK_FALSE(check_relaxed_stochastic(f, h).holds);
    CHECK_FALSE(check_relaxed_stochastic(h, f).holds);
    // This trio is built to defeat the pairwise-coverage comparison in
    // every direction.
    CHECK_FALSE(check_weak_stochastic(f, g).holds);
    CHECK_FALSE(check_weak_stochastic(g, h).holds);
    CHECK_FALSE(check_weak_stochastic(f, h).holds);
}

TEST_CASE("support gaps set the advisory flag") {
    auto [f, g] = fixtures::two_atom_pair();
    auto v = check_stochastic(f, g);
    CHECK(v.assumption_violated);
    Distribution u{Uniform{0.0, 1.0}};
    CHECK(check_stochastic(g, u).assumption_violated);
    CHECK_FALSE(check_stochastic(u, u).assumption_violated);
}

TEST_CASE("grid and tolerance arguments are validated") {
    Distribution u{Uniform{0.0, 1.0}};
    CHECK_THROWS_AS(check_stochastic(u, u, 1), std::domain_error);
    CHECK_THROWS_AS(check_weak_stochastic(u, u, 0), std::domain_error);
    CHECK_THROWS_AS(check_dispersive(u, u, 1024, -1e-9), std::domain_error);
}

TEST_CASE("order/component bridge on ordered pairs") {
    auto [f, g] = fixtures::half_width_pair();
    auto report = order_component_bridge(f, g);
    CHECK(report.all_consistent);
    CHECK_FALSE(report.assumption_violated);
    for (const auto& e : report.entries) {
        CHECK(e.consistent);
        CHECK(e.component_zero == e.order_holds);
    }
    // Expected pairings, in the report's fixed order.
    CHECK(report.entries[0].relation == OrderRelation::weak_dispersive);
    CHECK(report.entries[0].divergence == DivergenceKind::avm);
    CHECK(report.entries[1].relation == OrderRelation::weak_stochastic);
    CHECK(report.entries[1].divergence == DivergenceKind::cd);
    CHECK(report.entries[2].relation == OrderRelation::relaxed_stochastic);
    CHECK(report.entries[2].divergence == DivergenceKind::wdp);
}

TEST_CASE("order/component bridge when quantiles cross") {
    // F and its reflection have equal spreads but shift mass on both sides,
    // so the stochastic-side components are positive while the dispersive
    // row stays zero. Consistency must survive that mix.
    auto [f, g, h] = fixtures::coverage_trade_trio();
    auto report = order_component_bridge(f, h);
    CHECK_FALSE(report.assumption_violated);
    CHECK(report.all_consistent);
    CHECK(report.entries[0].component_zero);  // equal spreads
    CHECK_FALSE(report.entries[1].component_zero);
    CHECK_FALSE(report.entries[1].order_holds);
}

TEST_CASE("bridge flags the advisory on gapped supports") {
    auto [f, g] = fixtures::equal_spread_pair();
    auto report = order_component_bridge(f, g);
    CHECK(report.assumption_violated);
}
