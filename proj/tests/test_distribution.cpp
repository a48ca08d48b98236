#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qdd/distribution.hpp"
#include "qdd/normal.hpp"
#include "qdd/validation.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace qdd;

TEST_CASE("standard normal quantile matches reference values") {
    // Reference values from tests/oracles/divergence_oracle.py battery K
    // (scipy.stats.norm.ppf at double precision).
    const std::vector<std::pair<double, double>> table = {
        {1e-12, -7.034483825301131},
        {1e-6, -4.753424308822899},
        {0.01, -2.3263478740408408},
        {0.3, -0.5244005127080409},
        {0.5, 0.0},
        {0.7, 0.5244005127080407},
        {0.99, 2.3263478740408408},
        {1.0 - 1e-6, 4.753424308817087},
        {1.0 - 1e-12, 7.0344869100478356},
    };
    for (const auto& [p, want] : table) {
        CAPTURE(p);
        CHECK(normal_quantile(p) == doctest::Approx(want).epsilon(1e-13));
    }
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(-0.5), std::domain_error);
}

TEST_CASE("normal cdf and quantile invert each other") {
    // The positive far tail is excluded: representing 1 - p as a double
    // already costs more than the 1e-12 this asserts.
    for (double x : {-6.0, -2.5, -0.3, 0.0, 0.7, 3.1}) {
        CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-12));
    }
    // Survival function keeps relative accuracy deep in the tail.
    CHECK(normal_sf(10.0) == doctest::Approx(7.61985302416053e-24).epsilon(1e-12));
    CHECK(normal_cdf(-10.0) == doctest::Approx(7.61985302416053e-24).epsilon(1e-12));
}

TEST_CASE("polyline validates and canonicalizes its point list") {
    SUBCASE("valid construction") {
        Polyline p({0.0, 0.5, 1.0}, {-1.0, 0.0, 2.0});
        CHECK(p.levels().size() == 3);
        CHECK(p.min_value() == -1.0);
        CHECK(p.max_value() == 2.0);
        CHECK_FALSE(p.has_jump());
    }
    SUBCASE("exact duplicate points are dropped") {
        Polyline p({0.0, 0.5, 0.5, 1.0}, {-1.0, 0.0, 0.0, 2.0});
        CHECK(p.levels().size() == 3);
    }
    SUBCASE("repeated level with distinct values is a jump") {
        Polyline p({0.0, 0.5, 0.5, 1.0}, {-1.0, 0.0, 1.0, 2.0});
        CHECK(p.has_jump());
        // Left-continuous evaluation returns the lower branch at the jump.
        CHECK(p(0.5) == 0.0);
        CHECK(p.upper_inverse(0.5) == 1.0);
    }
    SUBCASE("rejects levels outside [0, 1]") {
        CHECK_THROWS_AS(Polyline({-0.1, 1.0}, {0.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(Polyline({0.0, 1.1}, {0.0, 1.0}), std::invalid_argument);
    }
    SUBCASE("rejects endpoints that do not span [0, 1]") {
        CHECK_THROWS_AS(Polyline({0.2, 1.0}, {0.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(Polyline({0.0, 0.9}, {0.0, 1.0}), std::invalid_argument);
    }
    SUBCASE("rejects decreasing sequences") {
        CHECK_THROWS_AS(Polyline({0.0, 0.6, 0.4, 1.0}, {0.0, 1.0, 2.0, 3.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(Polyline({0.0, 0.5, 1.0}, {0.0, 2.0, 1.0}),
                        std::invalid_argument);
    }
    SUBCASE("rejects mismatched or empty input") {
        CHECK_THROWS_AS(Polyline({0.0, 1.0}, {0.0}), std::invalid_argument);
        CHECK_THROWS_AS(Polyline({}, {}), std::invalid_argument);
    }
    SUBCASE("rejects non-finite values") {
        const double inf = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(Polyline({0.0, 1.0}, {0.0, inf}), std::invalid_argument);
    }
}

TEST_CASE("polyline quantile and cdf are mutual inverses") {
    Polyline p({0.0, 0.25, 0.25, 0.75, 1.0}, {-2.0, -1.0, 0.0, 1.0, 3.0});
    SUBCASE("quantile evaluation") {
        CHECK(p(0.125) == doctest::Approx(-1.5));
        CHECK(p(0.25) == -1.0);      // lower branch of the jump
        CHECK(p.upper_inverse(0.25) == 0.0);
        CHECK(p(0.5) == doctest::Approx(0.5));
        CHECK(p(1.0) == 3.0);
        CHECK_THROWS_AS(p(0.0), std::domain_error);
        CHECK_THROWS_AS(p(1.5), std::domain_error);
    }
    SUBCASE("cdf round trip away from jumps") {
        for (double tau : {0.1, 0.2, 0.3, 0.5, 0.7, 0.9}) {
            CHECK(p.cdf(p(tau)) == doctest::Approx(tau).epsilon(1e-12));
        }
    }
    SUBCASE("cdf across the support gap") {
        // No mass on (-1, 0): the cdf is flat at 0.25 there.
        CHECK(p.cdf(-1.0) == doctest::Approx(0.25));
        CHECK(p.cdf(-0.5) == doctest::Approx(0.25));
        CHECK(p.cdf(0.0) == doctest::Approx(0.25));
        CHECK(p.cdf(-3.0) == 0.0);
        CHECK(p.cdf(4.0) == 1.0);
    }
    SUBCASE("cdf_left differs from cdf exactly at an atom") {
        Polyline atom({0.0, 1.0}, {2.0, 2.0});
        CHECK(atom.cdf(2.0) == doctest::Approx(1.0));
        CHECK(atom.cdf_left(2.0) == doctest::Approx(0.0));
        CHECK(atom.cdf(1.9) == 0.0);
        CHECK(atom.cdf(2.1) == 1.0);
    }
    SUBCASE("reflection negates the support") {
        Polyline r = p.reflected();
        CHECK(r.min_value() == -3.0);
        CHECK(r.max_value() == 2.0);
        for (double tau : {0.1, 0.4, 0.6, 0.9}) {
            CHECK(r(tau) == doctest::Approx(-p.upper_inverse(1.0 - tau)).epsilon(1e-12));
        }
        CHECK(r.reflected() == p);
    }
}

TEST_CASE("piecewise_quantile handles linear and step modes") {
    SUBCASE("linear mode requires full level span") {
        CHECK_THROWS_AS(Distribution::piecewise_quantile({0.5, 1.0}, {0.0, 1.0},
                                                         Distribution::Interp::linear),
                        std::invalid_argument);
        auto d = Distribution::piecewise_quantile({0.0, 1.0}, {0.0, 1.0},
                                                  Distribution::Interp::linear);
        CHECK(quantile(d, 0.5) == doctest::Approx(0.5));
    }
    SUBCASE("step mode builds a left-continuous staircase") {
        auto d = Distribution::piecewise_quantile({0.25, 1.0}, {-1.0, 0.0},
                                                  Distribution::Interp::step);
        CHECK(quantile(d, 0.1) == -1.0);
        CHECK(quantile(d, 0.25) == -1.0);
        CHECK(quantile(d, 0.26) == 0.0);
        CHECK(quantile(d, 0.999) == 0.0);
        CHECK(cdf(d, -1.0) == doctest::Approx(0.25));
        CHECK(cdf(d, -0.5) == doctest::Approx(0.25));
        CHECK(cdf(d, 0.0) == doctest::Approx(1.0));
    }
    SUBCASE("step mode requires the final level to be 1") {
        CHECK_THROWS_AS(Distribution::piecewise_quantile({0.25, 0.9}, {-1.0, 0.0},
                                                         Distribution::Interp::step),
                        std::invalid_argument);
    }
}

TEST_CASE("empirical distribution sorts samples and places uniform atoms") {
    auto d = Distribution::empirical({3.0, -1.0, 2.0, -1.0});
    // Four samples, mass 1/4 each; duplicates stack.
    CHECK(quantile(d, 0.10) == -1.0);
    CHECK(quantile(d, 0.50) == -1.0);
    CHECK(quantile(d, 0.51) == 2.0);
    CHECK(quantile(d, 0.80) == 3.0);
    CHECK(cdf(d, -1.0) == doctest::Approx(0.5));
    CHECK(cdf(d, 2.0) == doctest::Approx(0.75));
    CHECK(cdf(d, 2.5) == doctest::Approx(0.75));
    CHECK_THROWS_AS(Distribution::empirical({}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::empirical({1.0, std::nan("")}),
                    std::invalid_argument);
}

TEST_CASE("closed histogram spreads mass uniformly per bin") {
    auto d = Distribution::histogram({0.0, 1.0, 3.0}, {0.5, 0.5});
    CHECK(quantile(d, 0.25) == doctest::Approx(0.5));
    CHECK(quantile(d, 0.5) == doctest::Approx(1.0));
    CHECK(quantile(d, 0.75) == doctest::Approx(2.0));
    CHECK(cdf(d, 2.0) == doctest::Approx(0.75));
    auto hull = bounded_support(d);
    REQUIRE(hull.has_value());
    CHECK(hull->first == 0.0);
    CHECK(hull->second == 3.0);
    CHECK_THROWS_AS(Distribution::histogram({0.0, 1.0}, {0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Distribution::histogram({1.0, 0.0}, {1.0}),
                    std::invalid_argument);
}

TEST_CASE("mixture weights must sum to one") {
    Distribution n{Normal{0.0, 1.0}};
    CHECK_THROWS_AS(Distribution(Mixture{{{0.5, n}, {0.4, n}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Distribution(Mixture{{{-0.5, n}, {1.5, n}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Distribution(Mixture{{}}), std::invalid_argument);
    CHECK_NOTHROW(Distribution(Mixture{{{0.5, n}, {0.5, n}}}));
}

TEST_CASE("all-piecewise mixtures compose into a single polyline") {
    Distribution u1{Uniform{0.0, 1.0}};
    Distribution u2{Uniform{2.0, 4.0}};
    Distribution m{Mixture{{{0.5, u1}, {0.5, u2}}}};
    // The composed form must be piecewise linear, not a Mixture node.
    CHECK(std::holds_alternative<Polyline>(m.value()));
    REQUIRE(to_polyline(m).has_value());
    CHECK(quantile(m, 0.25) == doctest::Approx(0.5));
    CHECK(quantile(m, 0.75) == doctest::Approx(3.0));

    // A normal component keeps the mixture symbolic.
    Distribution n{Normal{0.0, 1.0}};
    Distribution mn{Mixture{{{0.5, u1}, {0.5, n}}}};
    CHECK(std::holds_alternative<Mixture>(mn.value()));
    CHECK_FALSE(to_polyline(mn).has_value());
    // Its quantile still inverts the weighted cdf.
    double q = quantile(mn, 0.5);
    CHECK(cdf(mn, q) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("central interval and median") {
    SUBCASE("alpha 0 collapses to the median") {
        Distribution n{Normal{2.0, 3.0}};
        auto ci = central_interval(n, 0.0);
        CHECK(ci.lo == doctest::Approx(2.0));
        CHECK(ci.hi == doctest::Approx(2.0));
        CHECK(central_median(n) == 2.0);
    }
    SUBCASE("alpha 1 returns the support hull when bounded") {
        Distribution u{Uniform{-1.0, 5.0}};
        auto ci = central_interval(u, 1.0);
        CHECK(ci.lo == -1.0);
        CHECK(ci.hi == 5.0);
        CHECK(central_median(u) == 2.0);
    }
    SUBCASE("alpha 1 on an unbounded support throws") {
        Distribution n{Normal{0.0, 1.0}};
        CHECK_THROWS_AS(central_interval(n, 1.0), std::domain_error);
        CHECK_THROWS_AS(central_interval(n, -0.1), std::domain_error);
        CHECK_THROWS_AS(central_interval(n, 1.5), std::domain_error);
    }
    SUBCASE("median of a support gap is the gap midpoint") {
        // Atoms at -1 and 1, mass 1/2 each: no mass near the median level.
        auto d = Distribution::piecewise_quantile({0.5, 1.0}, {-1.0, 1.0},
                                                  Distribution::Interp::step);
        CHECK(central_median(d) == doctest::Approx(0.0));
    }
}

TEST_CASE("symmetry detection") {
    CHECK(is_symmetric(Distribution{Normal{1.5, 0.7}}));
    CHECK(is_symmetric(Distribution{Uniform{-3.0, 9.0}}));
    CHECK(is_symmetric(Distribution::empirical({-2.0, 0.0, 2.0})));
    CHECK_FALSE(is_symmetric(Distribution::empirical({-1.0, 0.0, 5.0})));
    // Skewed two-piece density.
    Distribution skew{Mixture{
        {{0.8, Distribution{Uniform{0.0, 1.0}}},
         {0.2, Distribution{Uniform{1.0, 5.0}}}}}};
    CHECK_FALSE(is_symmetric(skew));
    // Generator used by the validation battery must always produce
    // symmetric distributions.
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        CHECK(is_symmetric(testgen::random_symmetric(rng)));
    }
}

TEST_CASE("bounded support detection") {
    CHECK_FALSE(bounded_support(Distribution{Normal{0.0, 1.0}}).has_value());
    auto hull = bounded_support(Distribution{Uniform{2.0, 3.0}});
    REQUIRE(hull.has_value());
    CHECK(hull->first == 2.0);
    CHECK(hull->second == 3.0);
    // A mixture is bounded only when every component is.
    Distribution mixed{Mixture{
        {{0.5, Distribution{Uniform{0.0, 1.0}}},
         {0.5, Distribution{Normal{0.0, 1.0}}}}}};
    CHECK_FALSE(bounded_support(mixed).has_value());
}

TEST_CASE("quantile jump detection") {
    // Two atoms with distinct positions leave a gap in the support, so the
    // quantile function jumps.
    auto [f, g] = fixtures::two_atom_pair();
    CHECK(has_quantile_jump(f));
    CHECK(has_quantile_jump(g));
    // A single atom has a constant quantile: no jump.
    auto one = Distribution::piecewise_quantile({1.0}, {3.0},
                                                Distribution::Interp::step);
    CHECK_FALSE(has_quantile_jump(one));
    CHECK_FALSE(has_quantile_jump(Distribution{Uniform{0.0, 1.0}}));
    CHECK_FALSE(has_quantile_jump(Distribution{Normal{0.0, 1.0}}));
    // Contiguous uniform mixtures are continuous by construction.
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        CHECK_FALSE(has_quantile_jump(testgen::random_uniform_mixture(rng)));
    }
}

TEST_CASE("uniform and normal validate their parameters") {
    CHECK_THROWS_AS((Distribution{Normal{0.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS((Distribution{Normal{0.0, -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS((Distribution{Uniform{1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS((Distribution{Uniform{2.0, 1.0}}), std::invalid_argument);
    const double nan = std::nan("");
    CHECK_THROWS_AS((Distribution{Normal{nan, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS((Distribution{Uniform{0.0, nan}}), std::invalid_argument);
}

TEST_CASE("free quantile rejects out-of-range levels") {
    Distribution u{Uniform{0.0, 1.0}};
    CHECK_THROWS_AS(quantile(u, 0.0), std::domain_error);
    CHECK_THROWS_AS(quantile(u, 1.0), std::domain_error);
    CHECK_THROWS_AS(quantile(u, -0.3), std::domain_error);
    CHECK(quantile(u, 0.5) == doctest::Approx(0.5));
}
