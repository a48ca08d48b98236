#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qdd/decompose.hpp"
#include "qdd/distribution.hpp"
#include "qdd/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

using namespace qdd;
namespace fs = std::filesystem;

namespace {

Distribution round_trip(const Distribution& d) {
    return parse_distribution(serialize_distribution(d));
}

// Scratch directory for batch-manifest tests; recreated per process.
struct TempDir {
    fs::path root;
    TempDir() {
        root = fs::temp_directory_path() / "qdd_io_test";
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~TempDir() { fs::remove_all(root); }
    fs::path write(const std::string& name, const std::string& text) const {
        const fs::path p = root / name;
        std::ofstream out(p);
        out << text;
        return p;
    }
};

} // namespace

TEST_CASE("serialize and parse are mutual inverses") {
    CHECK(round_trip(Distribution{Normal{0.25, 1.75}}) ==
          Distribution{Normal{0.25, 1.75}});
    CHECK(round_trip(Distribution{Uniform{-2.0, 3.0}}) ==
          Distribution{Uniform{-2.0, 3.0}});

    auto pw = Distribution::piecewise_quantile(
        {0.0, 0.3, 0.3, 1.0}, {-1.0, 0.0, 0.5, 2.0},
        Distribution::Interp::linear);
    CHECK(round_trip(pw) == pw);

    auto stepd = Distribution::piecewise_quantile({0.5, 1.0}, {-1.0, 1.0},
                                                  Distribution::Interp::step);
    CHECK(round_trip(stepd) == stepd);

    auto emp = Distribution::empirical({3.0, 1.0, 2.0, 2.0});
    CHECK(round_trip(emp) == emp);

    auto hist = Distribution::histogram({0.0, 1.0, 4.0}, {0.25, 0.75});
    CHECK(round_trip(hist) == hist);

    // A mixture containing a normal survives with its structure intact.
    Distribution mix{Mixture{
        {{0.4, Distribution{Normal{0.0, 1.0}}},
         {0.6, Distribution{Uniform{-1.0, 1.0}}}}}};
    CHECK(round_trip(mix) == mix);
}

TEST_CASE("parse_distribution reads every documented spec form") {
    auto n = parse_distribution(R"({"type":"normal","mu":1.5,"sigma":0.5})");
    CHECK(n == Distribution{Normal{1.5, 0.5}});

    auto u = parse_distribution(R"({"type":"uniform","a":-1,"b":4})");
    CHECK(u == Distribution{Uniform{-1.0, 4.0}});

    auto pw = parse_distribution(
        R"({"type":"piecewise_quantile","levels":[0,1],"values":[0,2]})");
    CHECK(quantile(pw, 0.5) == doctest::Approx(1.0));

    auto st = parse_distribution(
        R"({"type":"piecewise_quantile","levels":[0.5,1],"values":[-1,1],"mode":"step"})");
    CHECK(quantile(st, 0.25) == -1.0);

    auto emp = parse_distribution(R"({"type":"empirical","samples":[3,1,2]})");
    CHECK(quantile(emp, 0.5) == 2.0);

    auto hist = parse_distribution(
        R"({"type":"histogram","edges":[0,1,3],"probs":[0.5,0.5]})");
    CHECK(quantile(hist, 0.75) == doctest::Approx(2.0));

    auto mix = parse_distribution(
        R"({"type":"mixture","components":[[0.5,{"type":"normal","mu":0,"sigma":1}],
             [0.5,{"type":"uniform","a":0,"b":1}]]})");
    CHECK(std::holds_alternative<Mixture>(mix.value()));
}

TEST_CASE("parse_distribution pinpoints the offending element") {
    auto path_of = [](const std::string& text) {
        try {
            parse_distribution(text);
        } catch (const ParseError& e) {
            return e.path();
        }
        return std::string("(no error)");
    };
    CHECK(path_of("{") == "$");
    CHECK(path_of("[1,2]") == "$");
    CHECK(path_of(R"({"type":42})") == "$.type");
    CHECK(path_of(R"({"type":"gaussian"})") == "$.type");
    CHECK(path_of(R"({"type":"normal","sigma":1})") == "$");
    CHECK(path_of(R"({"type":"normal","mu":"x","sigma":1})") == "$.mu");
    CHECK(path_of(R"({"type":"mixture","components":[[0.5]]})") ==
          "$.components[0]");
    CHECK(path_of(
              R"({"type":"mixture","components":[[1.0,{"type":"normal","mu":0}]]})") ==
          "$.components[0][1]");
    // Structurally valid but semantically bad specs also map to ParseError.
    CHECK_THROWS_AS(parse_distribution(R"({"type":"normal","mu":0,"sigma":-1})"),
                    ParseError);
    CHECK_THROWS_AS(parse_distribution(R"({"type":"uniform","a":2,"b":1})"),
                    ParseError);
    // what() prepends the path.
    try {
        parse_distribution(R"({"type":"normal","sigma":1})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()) == "$: missing field \"mu\"");
    }
}

TEST_CASE("sample files parse line by line") {
    auto d = parse_samples_csv("1.0\n# a comment\n\n2.5\n-0.5\n");
    CHECK(d == Distribution::empirical({1.0, 2.5, -0.5}));
    try {
        parse_samples_csv("1.0\nnot-a-number\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.path() == "line 2");
    }
    CHECK_THROWS_AS(parse_samples_csv("# only comments\n"), ParseError);
}

TEST_CASE("histogram pair specs parse with all truncation forms") {
    const std::string base =
        R"({"f":{"edges":[0,1,null],"probs":[0.5,0.5]},
            "g":{"edges":[0,2],"probs":[1.0]}})";
    auto spec = parse_histogram_pair(base);
    CHECK(spec.f.edges.size() == 3);
    CHECK_FALSE(spec.f.edges[2].has_value());
    CHECK_FALSE(spec.lower_bound.has_value());
    CHECK_FALSE(spec.upper_bound.has_value());

    auto with_mode = parse_histogram_pair(
        R"({"f":{"edges":[0,1],"probs":[1]},"g":{"edges":[0,1],"probs":[1]},
            "truncation":"conservative"})");
    CHECK_FALSE(with_mode.upper_bound.has_value());

    // Legacy alias for the same default policy.
    CHECK_NOTHROW(parse_histogram_pair(
        R"({"f":{"edges":[0,1],"probs":[1]},"g":{"edges":[0,1],"probs":[1]},
            "truncation":"paper_conservative"})"));

    auto with_bounds = parse_histogram_pair(
        R"({"f":{"edges":[null,1],"probs":[1]},"g":{"edges":[0,1],"probs":[1]},
            "truncation":{"lower":-4}})");
    REQUIRE(with_bounds.lower_bound.has_value());
    CHECK(*with_bounds.lower_bound == -4.0);

    try {
        parse_histogram_pair(
            R"({"f":{"edges":[0,1],"probs":[1]},"g":{"edges":[0,1],"probs":[1]},
                "truncation":"aggressive"})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.path() == "$.truncation");
    }
}

TEST_CASE("open-bin resolution follows the pairwise conservative rule") {
    // Values cross-checked against tests/oracles/histogram_oracle.py.
    SUBCASE("both upper bins open: cap at the larger finite bound") {
        HistogramPairSpec spec;
        spec.f.edges = {0.0, 4.0, 8.0, std::nullopt};
        spec.f.probs = {0.25, 0.5, 0.25};
        spec.g.edges = {0.0, 6.0, 12.0, std::nullopt};
        spec.g.probs = {0.5, 0.3, 0.2};
        auto [f, g] = histogram_pair_to_distributions(spec);
        // Cap T = 12; g's open mass becomes an atom at 12, f's spreads
        // over [8, 12].
        auto fh = bounded_support(f);
        auto gh = bounded_support(g);
        REQUIRE(fh.has_value());
        REQUIRE(gh.has_value());
        CHECK(fh->second == 12.0);
        CHECK(gh->second == 12.0);
        CHECK(cdf(g, 11.99) == doctest::Approx(0.7995));
        CHECK(cdf(g, 12.0) == doctest::Approx(1.0));
        CHECK(cdf(f, 10.0) == doctest::Approx(0.875));
        auto d = avm_decompose(f, g);
        CHECK(std::fabs(d.total - 1.1) < 1e-9);
        CHECK(std::fabs(d.disp_minus - 1.1) < 1e-9);
        CHECK(std::fabs(cd_via_cdf(f, g) - 137.0 / 900.0) < 1e-9);
    }
    SUBCASE("one upper bin open: collapses to an atom at its own edge") {
        HistogramPairSpec spec;
        spec.f.edges = {0.0, 2.0, std::nullopt};
        spec.f.probs = {0.7, 0.3};
        spec.g.edges = {0.0, 1.0, 3.0};
        spec.g.probs = {0.4, 0.6};
        auto [f, g] = histogram_pair_to_distributions(spec);
        CHECK(bounded_support(f)->second == 2.0);
        CHECK(bounded_support(g)->second == 3.0);
        // The open 0.3 mass sits as an atom at 2.
        CHECK(cdf(f, 1.999) == doctest::Approx(0.7).epsilon(1e-3));
        CHECK(cdf(f, 2.0) == doctest::Approx(1.0));
        auto d = avm_decompose(f, g);
        CHECK(std::fabs(d.total - 0.2) < 1e-9);
        CHECK(std::fabs(d.shift_plus - 2.0 / 105.0) < 1e-9);
        CHECK(std::fabs(d.disp_minus - 19.0 / 105.0) < 1e-9);
        CHECK(std::fabs(cd_via_cdf(f, g) - 19.0 / 600.0) < 1e-9);
    }
    SUBCASE("open lower bins mirror with the smaller bound") {
        HistogramPairSpec spec;
        spec.f.edges = {std::nullopt, -2.0, 0.0};
        spec.f.probs = {0.3, 0.7};
        spec.g.edges = {std::nullopt, -5.0, 0.0};
        spec.g.probs = {0.2, 0.8};
        auto [f, g] = histogram_pair_to_distributions(spec);
        CHECK(bounded_support(f)->first == -5.0);
        CHECK(bounded_support(g)->first == -5.0);
        // g's bound is the cap, so its open mass is an atom at -5.
        CHECK(cdf(g, -5.0) == doctest::Approx(0.2));
        CHECK(cdf(f, -5.0) == doctest::Approx(0.0));
        auto d = avm_decompose(f, g);
        CHECK(std::fabs(d.total - 1.25) < 1e-9);
        CHECK(std::fabs(d.shift_plus - 95.0 / 112.0) < 1e-9);
        CHECK(std::fabs(d.disp_minus - 45.0 / 112.0) < 1e-9);
        CHECK(std::fabs(cd_via_cdf(f, g) - 107.0 / 300.0) < 1e-9);
    }
    SUBCASE("resulting cdfs are monotone") {
        HistogramPairSpec spec;
        spec.f.edges = {0.0, 4.0, 8.0, std::nullopt};
        spec.f.probs = {0.25, 0.5, 0.25};
        spec.g.edges = {0.0, 6.0, 12.0, std::nullopt};
        spec.g.probs = {0.5, 0.3, 0.2};
        auto [f, g] = histogram_pair_to_distributions(spec);
        for (const auto& d : {f, g}) {
            double prev = -1.0;
            for (int i = 0; i <= 200; ++i) {
                const double x = -1.0 + 14.0 * i / 200.0;
                const double c = cdf(d, x);
                CHECK(c >= prev);
                prev = c;
            }
            CHECK(prev == 1.0);
        }
    }
}

TEST_CASE("histogram pair validation") {
    SUBCASE("explicit bound must not invert an open bin") {
        HistogramPairSpec spec;
        spec.f.edges = {0.0, 2.0, std::nullopt};
        spec.f.probs = {0.7, 0.3};
        spec.g.edges = {0.0, 3.0};
        spec.g.probs = {1.0};
        spec.upper_bound = 1.5; // below f's open-bin edge at 2
        CHECK_THROWS_WITH_AS(histogram_pair_to_distributions(spec),
                             "truncation: upper bound below f's open-bin edge",
                             std::invalid_argument);
    }
    SUBCASE("at least one closed bin is required") {
        HistogramPairSpec spec;
        spec.f.edges = {std::nullopt, 5.0, std::nullopt};
        spec.f.probs = {0.5, 0.5};
        spec.g.edges = {0.0, 1.0};
        spec.g.probs = {1.0};
        CHECK_THROWS_WITH_AS(histogram_pair_to_distributions(spec),
                             "histogram: needs at least one closed bin",
                             std::invalid_argument);
    }
    SUBCASE("probabilities must sum to one") {
        HistogramPairSpec spec;
        spec.f.edges = {0.0, 1.0};
        spec.f.probs = {0.9};
        spec.g.edges = {0.0, 1.0};
        spec.g.probs = {1.0};
        CHECK_THROWS_AS(histogram_pair_to_distributions(spec),
                        std::invalid_argument);
    }
    SUBCASE("identical closed-bin histograms compare as equal") {
        HistogramPairSpec spec;
        spec.f.edges = {0.0, 1.0, 2.0};
        spec.f.probs = {0.5, 0.5};
        spec.g = spec.f;
        auto [f, g] = histogram_pair_to_distributions(spec);
        CHECK(f == g);
        CHECK(avm_decompose(f, g).total == 0.0);
    }
    SUBCASE("single closed bins of different width") {
        HistogramPairSpec spec;
        spec.f.edges = {0.0, 1.0};
        spec.f.probs = {1.0};
        spec.g.edges = {0.0, 2.0};
        spec.g.probs = {1.0};
        auto [f, g] = histogram_pair_to_distributions(spec);
        // The wider bin is both right-shifted (median 1 vs 0.5) and more
        // spread, so the distance splits evenly across the two minus sides.
        auto d = avm_decompose(f, g);
        CHECK(std::fabs(d.total - 0.5) < 1e-12);
        CHECK(std::fabs(d.shift_minus - 0.25) < 1e-12);
        CHECK(std::fabs(d.disp_minus - 0.25) < 1e-12);
    }
}

TEST_CASE("batch manifests expand rows by divergence and exponent") {
    TempDir dir;
    dir.write("f.json", R"({"type":"normal","mu":1,"sigma":1})");
    dir.write("g.json", R"({"type":"normal","mu":0,"sigma":1})");

    SUBCASE("empty manifests produce empty tables") {
        CHECK(run_batch("[]", dir.root.string()).empty());
        CHECK(run_batch(R"({"rows":[]})", dir.root.string()).empty());
    }

    SUBCASE("defaults: all three divergences, wd at p = 2") {
        const std::string manifest =
            R"([{"id":"r1","f":"f.json","g":"g.json"}])";
        auto rows = run_batch(manifest, dir.root.string());
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].kind == DivergenceKind::avm);
        CHECK(rows[1].kind == DivergenceKind::wdp);
        CHECK(rows[1].p == 2);
        CHECK(rows[2].kind == DivergenceKind::cd);
        for (const auto& r : rows) {
            CHECK(r.ok);
            CHECK(r.id == "r1");
            CHECK(r.error.empty());
        }
        // Unit shift of a unit normal: every distance is the pure shift.
        CHECK(rows[0].result.total == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(rows[1].result.total == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(rows[2].result.total ==
              doctest::Approx(0.270903289653).epsilon(1e-3));
    }

    SUBCASE("explicit divergence and exponent lists") {
        const std::string manifest =
            R"([{"id":"a","f":"f.json","g":"g.json",
                 "divergences":["wd"],"p":[1,3]}])";
        auto rows = run_batch(manifest, dir.root.string());
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].p == 1);
        CHECK(rows[1].p == 3);
    }

    SUBCASE("identical rows give identical results") {
        const std::string manifest =
            R"([{"id":"x","f":"f.json","g":"g.json","divergences":["avm"]},
                {"id":"y","f":"f.json","g":"g.json","divergences":["avm"]}])";
        auto rows = run_batch(manifest, dir.root.string());
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].result.total == rows[1].result.total);
        CHECK(rows[0].result.shift_plus == rows[1].result.shift_plus);
    }

    SUBCASE("histogram pair rows") {
        dir.write("pair.json",
                  R"({"f":{"edges":[0,1],"probs":[1]},
                      "g":{"edges":[0,2],"probs":[1]}})");
        const std::string manifest =
            R"([{"id":"h","pair":"pair.json","divergences":["avm"]}])";
        auto rows = run_batch(manifest, dir.root.string());
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].ok);
        CHECK(rows[0].result.total == doctest::Approx(0.5).epsilon(1e-9));
    }

    SUBCASE("row failures are captured, not fatal") {
        const std::string manifest =
            R"([{"id":"bad","f":"nosuch.json","g":"g.json","divergences":["avm"]},
                {"id":"good","f":"f.json","g":"g.json","divergences":["avm"]}])";
        auto rows = run_batch(manifest, dir.root.string());
        REQUIRE(rows.size() == 2);
        CHECK_FALSE(rows[0].ok);
        CHECK(rows[0].error.find("cannot open file") != std::string::npos);
        // The path appears exactly once in the message.
        const auto first = rows[0].error.find("nosuch.json");
        CHECK(first != std::string::npos);
        CHECK(rows[0].error.find("nosuch.json", first + 1) == std::string::npos);
        CHECK(rows[1].ok);
    }

    SUBCASE("malformed manifests raise ParseError") {
        CHECK_THROWS_AS(run_batch("{", dir.root.string()), ParseError);
        CHECK_THROWS_AS(run_batch(R"({"rows":5})", dir.root.string()),
                        ParseError);
    }

    SUBCASE("a row without inputs becomes an error row") {
        auto rows = run_batch(R"([{"id":"a"}])", dir.root.string());
        REQUIRE(rows.size() == 1);
        CHECK_FALSE(rows[0].ok);
        CHECK(rows[0].id == "a");
        CHECK(rows[0].error.find("missing field") != std::string::npos);
    }
}

TEST_CASE("batch rows resolve absolute paths as-is") {
    TempDir dir;
    const auto f = dir.write("f.json", R"({"type":"uniform","a":0,"b":1})");
    const auto g = dir.write("g.json", R"({"type":"uniform","a":0,"b":2})");
    const std::string manifest = std::string(R"([{"id":"abs","f":")") +
                                 f.string() + R"(","g":")" + g.string() +
                                 R"(","divergences":["avm"]}])";
    // Deliberately wrong base_dir: absolute paths must ignore it.
    auto rows = run_batch(manifest, "/nonexistent");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].ok);
    CHECK(rows[0].result.total == doctest::Approx(0.5).epsilon(1e-9));
}
