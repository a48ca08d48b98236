#include "qdd/validation.hpp"

#include "qdd/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <iterator>
#include <stdexcept>
#include <string>
#include <variant>

namespace qdd {

namespace {

Distribution uni(double a, double b) { return Distribution(Uniform{a, b}); }

Distribution atom(double x) {
    return Distribution::piecewise_quantile({1.0}, {x},
                                            Distribution::Interp::step);
}

Distribution mix(std::vector<std::pair<double, Distribution>> parts) {
    return Distribution(Mixture{std::move(parts)});
}

Distribution reflected(const Distribution& d) {
    return Distribution(to_polyline(d).value().reflected());
}

} // namespace

namespace fixtures {

std::pair<Distribution, Distribution> nested_shift_pair() {
    return {mix({{0.5, uni(0.0, 4.0)}, {0.5, uni(4.0, 6.0)}}),
            mix({{0.5, uni(1.0, 3.0)}, {0.5, uni(3.0, 7.0)}})};
}

std::pair<Distribution, Distribution> half_width_pair() {
    return {uni(-2.0, 2.0),
            mix({{0.5, uni(-2.0, 0.0)}, {0.5, uni(0.0, 1.0)}})};
}

std::pair<Distribution, Distribution> double_scale_pair() {
    const double third = 1.0 / 3.0;
    const double sixth = 1.0 / 6.0;
    return {mix({{0.5, uni(-5.0, 0.0)},
                 {third, uni(0.0, 1.0)},
                 {sixth, uni(1.0, 5.0)}}),
            mix({{0.5, uni(-10.0, 0.0)},
                 {third, uni(0.0, 2.0)},
                 {sixth, uni(2.0, 10.0)}})};
}

std::pair<Distribution, Distribution> two_atom_pair() {
    return {Distribution::piecewise_quantile({0.25, 1.0}, {-1.0, 0.0},
                                             Distribution::Interp::step),
            Distribution::piecewise_quantile({0.25, 1.0}, {-1.3, 0.5},
                                             Distribution::Interp::step)};
}

std::pair<Distribution, Distribution> overlap_shift_pair() {
    return {mix({{0.5, uni(-1.0, 1.0)}, {0.5, uni(1.0, 2.0)}}),
            mix({{0.5, uni(-0.5, 0.0)}, {0.5, uni(0.0, 2.0)}})};
}

std::pair<Distribution, Distribution> atom_endpoint_pair() {
    return {mix({{0.3, atom(-1.0)},
                 {0.2, uni(-1.0, 0.1)},
                 {0.2, uni(0.1, 1.2)},
                 {0.3, atom(1.2)}}),
            mix({{0.3, atom(-1.0)},
                 {0.2, uni(-1.0, 0.0)},
                 {0.2, uni(0.0, 1.0)},
                 {0.3, atom(1.0)}})};
}

std::pair<Distribution, Distribution> equal_spread_pair() {
    return {mix({{0.25, uni(-3.0, -2.0)}, {0.75, uni(-1.0, 2.0)}}),
            mix({{0.75, uni(-2.0, 1.0)}, {0.25, uni(2.0, 3.0)}})};
}

std::pair<Distribution, Distribution> uniform_vs_normal_pair() {
    return {uni(-1.6, 1.6), Distribution(Normal{0.0, 1.0})};
}

std::array<Distribution, 3> coverage_trade_trio() {
    Distribution f = mix({{0.25, uni(-5.0, -1.0)},
                          {0.025, uni(-1.0, -0.1)},
                          {0.225, uni(-0.1, 0.0)},
                          {0.5, uni(0.0, 4.0)}});
    Distribution g = uni(-2.0, 2.0);
    Distribution h = reflected(f);
    return {std::move(f), std::move(g), std::move(h)};
}

std::array<Distribution, 3> mirrored_tail_trio() {
    Distribution f = mix({{0.2, uni(-4.0, -1.8)},
                          {0.3, uni(-1.8, 0.0)},
                          {0.25, uni(0.0, 0.5)},
                          {0.05, uni(0.5, 3.0)},
                          {0.2, uni(3.0, 4.0)}});
    Distribution g = uni(-4.0, 4.0);
    Distribution h = reflected(f);
    return {std::move(f), std::move(g), std::move(h)};
}

} // namespace fixtures

namespace testgen {

Distribution random_uniform_mixture(std::mt19937_64& rng, int max_pieces) {
    if (max_pieces < 2) throw std::domain_error("max_pieces must be >= 2");
    std::uniform_int_distribution<int> pieces(2, max_pieces);
    std::uniform_real_distribution<double> start(-5.0, 5.0);
    std::uniform_real_distribution<double> width(0.1, 3.0);
    std::uniform_real_distribution<double> raw_weight(0.2, 1.0);

    const int k = pieces(rng);
    std::vector<double> w(static_cast<std::size_t>(k));
    double wsum = 0.0;
    for (double& wi : w) {
        wi = raw_weight(rng);
        wsum += wi;
    }
    Mixture m;
    double x = start(rng);
    for (int j = 0; j < k; ++j) {
        const double nx = x + width(rng);
        m.components.emplace_back(w[static_cast<std::size_t>(j)] / wsum,
                                  uni(x, nx));
        x = nx;
    }
    return Distribution(std::move(m));
}

Distribution random_normal(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mu(-3.0, 3.0);
    std::uniform_real_distribution<double> sigma(0.3, 3.0);
    return Distribution(Normal{mu(rng), sigma(rng)});
}

Distribution random_symmetric(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pieces(1, 3);
    std::uniform_real_distribution<double> center(-3.0, 3.0);
    std::uniform_real_distribution<double> width(0.1, 2.0);
    std::uniform_real_distribution<double> raw_weight(0.2, 1.0);

    const int k = pieces(rng);
    const double c = center(rng);
    std::vector<double> w(static_cast<std::size_t>(k));
    std::vector<double> q(static_cast<std::size_t>(k));
    double qsum = 0.0;
    for (int j = 0; j < k; ++j) {
        w[static_cast<std::size_t>(j)] = width(rng);
        q[static_cast<std::size_t>(j)] = raw_weight(rng);
        qsum += q[static_cast<std::size_t>(j)];
    }
    // Mirror the same pieces and half-weights on both sides of the center
    // so the composed quantile satisfies q(t) + q(1-t) = 2c exactly up to
    // fp rounding of the breakpoints.
    Mixture m;
    double off = 0.0;
    for (int j = 0; j < k; ++j) {
        const double lo = off;
        const double hi = off + w[static_cast<std::size_t>(j)];
        const double hw = 0.5 * q[static_cast<std::size_t>(j)] / qsum;
        m.components.emplace_back(hw, uni(c - hi, c - lo));
        m.components.emplace_back(hw, uni(c + lo, c + hi));
        off = hi;
    }
    return Distribution(std::move(m));
}

Distribution affine(const Distribution& d, double shift, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(shift))
        throw std::domain_error("affine: scale must be positive and finite");
    const Distribution::Value& v = d.value();
    if (const auto* n = std::get_if<Normal>(&v))
        return Distribution(Normal{shift + scale * n->mu, scale * n->sigma});
    if (const auto* u = std::get_if<Uniform>(&v))
        return Distribution(Uniform{shift + scale * u->a, shift + scale * u->b});
    if (const auto* p = std::get_if<Polyline>(&v)) {
        std::vector<double> vals = p->values();
        for (double& x : vals) x = shift + scale * x;
        return Distribution(Polyline(p->levels(), std::move(vals)));
    }
    const auto& m = std::get<Mixture>(v);
    Mixture out;
    out.components.reserve(m.components.size());
    for (const auto& [w, comp] : m.components)
        out.components.emplace_back(w, affine(comp, shift, scale));
    return Distribution(std::move(out));
}

} // namespace testgen

namespace validation {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string components_str(double sp, double sm, double dp, double dm) {
    return "(" + num(sp) + ", " + num(sm) + ", " + num(dp) + ", " + num(dm) +
           ")";
}

struct Expected {
    double sp;
    double sm;
    double dp;
    double dm;
};

CheckResult component_row(std::string name, const Decomposition& got,
                          const Expected& want, double tol) {
    double err = std::fabs(got.shift_plus - want.sp);
    err = std::max(err, std::fabs(got.shift_minus - want.sm));
    err = std::max(err, std::fabs(got.disp_plus - want.dp));
    err = std::max(err, std::fabs(got.disp_minus - want.dm));
    err = std::max(err, std::fabs(got.total -
                                  (want.sp + want.sm + want.dp + want.dm)));
    CheckResult r;
    r.name = std::move(name);
    r.pass = err <= tol;
    r.detail = "max error " + num(err) + " (tolerance " + num(tol) +
               "); got " +
               components_str(got.shift_plus, got.shift_minus, got.disp_plus,
                              got.disp_minus) +
               " want " + components_str(want.sp, want.sm, want.dp, want.dm);
    return r;
}

} // namespace

std::vector<CheckResult> fixture_checks(const QuadratureConfig& cfg) {
    // Reference values from tests/oracles/divergence_oracle.py batteries
    // A..I. Exact-path rows carry 1e-9 tolerances; quadrature rows carry
    // the method tolerance for the default grids.
    std::vector<CheckResult> out;

    {
        auto [f, g] = fixtures::uniform_vs_normal_pair();
        out.push_back(component_row("uniform vs normal, area metric",
                                    avm_decompose(f, g, cfg),
                                    {0.0, 0.0, 0.0651131, 0.0629976}, 1e-3));
    }
    {
        auto [f, g] = fixtures::nested_shift_pair();
        out.push_back(component_row("nested shifts, area metric",
                                    avm_decompose(f, g, cfg),
                                    {0.25, 0.25, 0.0, 0.0}, 1e-9));
    }
    {
        auto [f, g] = fixtures::double_scale_pair();
        out.push_back(component_row("scale family, area metric",
                                    avm_decompose(f, g, cfg),
                                    {0.0, 0.0, 0.0, 23.0 / 12.0}, 1e-9));
        out.push_back(component_row("scale family, Cramer",
                                    cd_decompose(f, g, cfg),
                                    {0.0331153, 0.0, 0.0, 0.2316416}, 2e-3));
    }
    {
        auto [f, g] = fixtures::half_width_pair();
        out.push_back(component_row("half-width pair, area metric",
                                    avm_decompose(f, g, cfg),
                                    {0.0, 0.0, 0.25, 0.0}, 1e-9));
        out.push_back(component_row("half-width pair, Cramer",
                                    cd_decompose(f, g, cfg),
                                    {1.0 / 48.0, 0.0, 1.0 / 48.0, 0.0}, 2e-4));
    }
    for (int p = 1; p <= 3; ++p) {
        auto [f, g] = fixtures::two_atom_pair();
        const Expected want{0.0, std::pow(0.5, p + 1), 0.0,
                            (std::pow(0.3, p) + std::pow(0.5, p)) / 4.0};
        out.push_back(component_row("two-atom pair, W" + std::to_string(p),
                                    wd_decompose(f, g, p, cfg), want, 1e-9));
    }
    for (int p = 1; p <= 3; ++p) {
        auto [f, g] = fixtures::overlap_shift_pair();
        const Expected want{2.0 / (3.0 * (p + 1)), 0.0,
                            (0.5 + std::pow(0.5, p + 1)) / (3.0 * (p + 1)),
                            0.0};
        out.push_back(component_row("overlap shift pair, W" +
                                        std::to_string(p),
                                    wd_decompose(f, g, p, cfg), want, 1e-9));
    }
    {
        auto [f, g] = fixtures::atom_endpoint_pair();
        out.push_back(component_row("atom endpoints, area metric",
                                    avm_decompose(f, g, cfg),
                                    {0.02, 0.0, 0.08, 0.0}, 1e-6));
        out.push_back(component_row("atom endpoints, Cramer",
                                    cd_decompose(f, g, cfg),
                                    {0.0018182, 0.0, 0.0193333, 0.0}, 5e-4));
    }
    {
        auto trio = fixtures::coverage_trade_trio();
        out.push_back(component_row("coverage trade F:G, Cramer",
                                    cd_decompose(trio[0], trio[1], cfg),
                                    {0.0363889, 0.0, 0.1071528, 0.0}, 2e-3));
        out.push_back(component_row("coverage trade G:H, Cramer",
                                    cd_decompose(trio[1], trio[2], cfg),
                                    {0.0363889, 0.0, 0.0, 0.1071528}, 2e-3));
        out.push_back(component_row("coverage trade F:H, Cramer",
                                    cd_decompose(trio[0], trio[2], cfg),
                                    {0.07625, 0.0052083, 0.0, 0.0}, 2e-3));
    }
    return out;
}

std::vector<CheckResult> exactness_checks(const QuadratureConfig& cfg,
                                          int pairs_per_divergence) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(20260816ULL);

    auto draw = [&rng](int scheme) -> std::pair<Distribution, Distribution> {
        switch (scheme) {
            case 0:
                return {testgen::random_uniform_mixture(rng),
                        testgen::random_uniform_mixture(rng)};
            case 1:
                return {testgen::random_uniform_mixture(rng),
                        testgen::random_normal(rng)};
            default:
                return {testgen::random_normal(rng),
                        testgen::random_normal(rng)};
        }
    };

    auto run = [&](const std::string& label, auto&& decompose_fn) {
        CheckResult r;
        r.name = "component sum, " + label + " (" +
                 std::to_string(pairs_per_divergence) + " pairs)";
        r.pass = true;
        double worst_ratio = 0.0;
        for (int i = 0; i < pairs_per_divergence; ++i) {
            auto [f, g] = draw(i % 3);
            const Decomposition d = decompose_fn(f, g, i);
            const double tol =
                d.exact_path ? 1e-9 : 1e-3 * (1.0 + d.total);
            const double err = std::fabs(d.component_sum() - d.total);
            const bool negative = d.shift_plus < 0.0 || d.shift_minus < 0.0 ||
                                  d.disp_plus < 0.0 || d.disp_minus < 0.0;
            const bool finite = std::isfinite(d.total) &&
                                std::isfinite(d.component_sum());
            worst_ratio = std::max(worst_ratio, err / tol);
            if (err > tol || negative || !finite) {
                r.pass = false;
                r.detail = "pair " + std::to_string(i) + ": |sum-total| = " +
                           num(err) + " (tolerance " + num(tol) + ")" +
                           (negative ? ", negative component" : "") +
                           (!finite ? ", non-finite value" : "");
                break;
            }
        }
        if (r.pass)
            r.detail =
                "worst |sum-total| at " + num(worst_ratio) + " of tolerance";
        out.push_back(std::move(r));
    };

    run("area metric", [&cfg](const Distribution& f, const Distribution& g,
                              int) { return avm_decompose(f, g, cfg); });
    run("Wasserstein", [&cfg](const Distribution& f, const Distribution& g,
                              int i) {
        return wd_decompose(f, g, 1 + i % 3, cfg);
    });
    QuadratureConfig cd_cfg = cfg;
    cd_cfg.n_double = std::min(cfg.n_double, 64);
    run("Cramer", [&cd_cfg](const Distribution& f, const Distribution& g,
                            int) { return cd_decompose(f, g, cd_cfg); });
    return out;
}

std::vector<CheckResult> gaussian_agreement_checks(const QuadratureConfig& cfg,
                                                   int pairs) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(97531ULL);
    std::uniform_real_distribution<double> mu(-3.0, 3.0);
    std::uniform_real_distribution<double> sigma(0.3, 3.0);

    auto as_dist = [](double m, double s) {
        return Distribution(Normal{m, s});
    };

    auto run = [&](const std::string& label, double tol, auto&& closed_fn,
                   auto&& quad_fn) {
        CheckResult r;
        r.name = "normal closed form vs quadrature, " + label + " (" +
                 std::to_string(pairs) + " pairs)";
        r.pass = true;
        double worst = 0.0;
        for (int i = 0; i < pairs; ++i) {
            const NormalPair np{mu(rng), sigma(rng), mu(rng), sigma(rng)};
            const Decomposition c = closed_fn(np);
            const Decomposition q =
                quad_fn(as_dist(np.mu_f, np.sigma_f),
                        as_dist(np.mu_g, np.sigma_g));
            double err = std::fabs(q.total - c.total);
            err = std::max(err, std::fabs(q.shift_plus - c.shift_plus));
            err = std::max(err, std::fabs(q.shift_minus - c.shift_minus));
            err = std::max(err, std::fabs(q.disp_plus - c.disp_plus));
            err = std::max(err, std::fabs(q.disp_minus - c.disp_minus));
            const double rel = err / (1.0 + c.total);
            worst = std::max(worst, rel);
            if (rel > tol) r.pass = false;
        }
        r.detail = "worst relative error " + num(worst) + " (tolerance " +
                   num(tol) + ")";
        out.push_back(std::move(r));
    };

    run("area metric", 1e-4,
        [](const NormalPair& np) { return normal_avm_decompose(np); },
        [&](const Distribution& f, const Distribution& g) {
            return avm_decompose(f, g, cfg);
        });
    for (int p = 1; p <= 3; ++p) {
        run("Wasserstein p=" + std::to_string(p), 1e-3,
            [p](const NormalPair& np) { return normal_wdp_decompose(np, p); },
            [&, p](const Distribution& f, const Distribution& g) {
                return wd_decompose(f, g, p, cfg);
            });
    }
    run("Cramer", 2e-3,
        [](const NormalPair& np) { return normal_cd_decompose(np); },
        [&](const Distribution& f, const Distribution& g) {
            return cd_decompose(f, g, cfg);
        });
    return out;
}

std::vector<CheckResult> run_selftest(const QuadratureConfig& cfg) {
    std::vector<CheckResult> out = fixture_checks(cfg);
    std::vector<CheckResult> ex = exactness_checks(cfg);
    out.insert(out.end(), std::make_move_iterator(ex.begin()),
               std::make_move_iterator(ex.end()));
    std::vector<CheckResult> ga = gaussian_agreement_checks(cfg);
    out.insert(out.end(), std::make_move_iterator(ga.begin()),
               std::make_move_iterator(ga.end()));
    return out;
}

} // namespace validation

} // namespace qdd
