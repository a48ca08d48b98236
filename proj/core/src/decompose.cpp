#include "qdd/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdd {

namespace {

constexpr double kOverflowLimit = 1e308;

void validate_cfg(const QuadratureConfig& cfg) {
    if (cfg.n_single < 8) {
        throw std::invalid_argument("quadrature config: n_single must be >= 8");
    }
    if (cfg.n_double < 8) {
        throw std::invalid_argument("quadrature config: n_double must be >= 8");
    }
}

// sign(z) * |z|^p by repeated multiplication; pow() on negative bases with
// fractional rounding is exactly the pitfall this avoids.
double signed_pow(double z, int p) {
    double m = 1.0;
    const double a = std::fabs(z);
    for (int k = 0; k < p; ++k) m *= a;
    return z < 0.0 ? -m : m;
}

double abs_pow(double z, int p) {
    double m = 1.0;
    const double a = std::fabs(z);
    for (int k = 0; k < p; ++k) m *= a;
    return m;
}

[[noreturn]] void throw_nonfinite(double alpha) {
    throw std::overflow_error(
        "non-finite quantile difference at coverage alpha = " +
        std::to_string(alpha));
}

[[noreturn]] void throw_partial_sum() {
    throw std::overflow_error(
        "midpoint-rule partial sum exceeded 1e308; the divergence is "
        "effectively infinite for these inputs");
}

// ---------------------------------------------------------------------------
// Exact path: piecewise-linear quantile pairs
// ---------------------------------------------------------------------------

// Every level t of either polyline folds to the coverage |2t - 1|, at which
// one of U or L can kink. Between consecutive folded levels both are linear.
std::vector<double> alpha_breakpoints(const Polyline& f, const Polyline& g) {
    std::vector<double> as;
    as.reserve(f.levels().size() + g.levels().size() + 2);
    as.push_back(0.0);
    as.push_back(1.0);
    auto add = [&as](const std::vector<double>& ts) {
        for (double t : ts) {
            const double a = std::fabs(2.0 * t - 1.0);
            if (a > 0.0 && a < 1.0) as.push_back(a);
        }
    };
    add(f.levels());
    add(g.levels());
    std::sort(as.begin(), as.end());
    as.erase(std::unique(as.begin(), as.end()), as.end());
    return as;
}

// Integral of the signed p-th power of a linear function over a width-w
// interval, given its endpoint values. Valid across sign changes. When the
// function is (near-)constant the antiderivative difference cancels, so a
// midpoint evaluation takes over; a linear integrand is exact either way.
double int_signed_pow(double y1, double y2, double w, int p) {
    if (p == 1) return 0.5 * (y1 + y2) * w;
    if (std::fabs(y2 - y1) <= 1e-9 * (std::fabs(y1) + std::fabs(y2))) {
        return signed_pow(0.5 * (y1 + y2), p) * w;
    }
    const double slope = (y2 - y1) / w;
    return (abs_pow(y2, p + 1) - abs_pow(y1, p + 1)) / ((p + 1) * slope);
}

Decomposition decompose_exact(const Polyline& fq, const Polyline& gq, int p,
                              DivergenceKind kind) {
    Decomposition out;
    out.kind = kind;
    out.p = p;
    out.exact_path = true;

    auto qdiff = [&fq, &gq](double tau) { return fq(tau) - gq(tau); };

    const auto alphas = alpha_breakpoints(fq, gq);
    for (std::size_t k = 0; k + 1 < alphas.size(); ++k) {
        const double a = alphas[k];
        const double b = alphas[k + 1];
        const double w = b - a;
        if (!(w > 0.0)) continue;

        // Both U and L are linear on (a, b); two interior samples recover
        // each line without touching the segment ends, where left-continuous
        // evaluation could pick a jump branch that belongs to the neighbor.
        const double m1 = a + w / 3.0;
        const double m2 = b - w / 3.0;
        // Breakpoints that fold to values one or two ulp apart (e.g. the
        // levels 1/3 and 2/3) leave a sliver whose interior points round to
        // the same double; its measure is below anything representable, so
        // skip it rather than divide by zero below.
        if (!(m2 > m1)) continue;
        const double um1 = qdiff(0.5 * (1.0 + m1));
        const double um2 = qdiff(0.5 * (1.0 + m2));
        const double lm1 = qdiff(0.5 * (1.0 - m1));
        const double lm2 = qdiff(0.5 * (1.0 - m2));
        const double su = (um2 - um1) / (m2 - m1);
        const double sl = (lm2 - lm1) / (m2 - m1);
        const double ua = um1 - su * (m1 - a);
        const double ub = um1 + su * (b - m1);
        const double la = lm1 - sl * (m1 - a);
        const double lb = lm1 + sl * (b - m1);

        // Subdivide at the roots of U, L, and U - L so that every piece has
        // constant signs; the integrals then assemble into components with
        // no further approximation.
        double cuts[5];
        int nc = 0;
        cuts[nc++] = a;
        auto add_root = [&](double y1, double y2) {
            if ((y1 > 0.0 && y2 < 0.0) || (y1 < 0.0 && y2 > 0.0)) {
                cuts[nc++] = a + w * (y1 / (y1 - y2));
            }
        };
        add_root(ua, ub);
        add_root(la, lb);
        add_root(ua - la, ub - lb);
        cuts[nc++] = b;
        std::sort(cuts, cuts + nc);

        for (int c = 0; c + 1 < nc; ++c) {
            const double x1 = cuts[c];
            const double x2 = cuts[c + 1];
            const double pw = x2 - x1;
            if (!(pw > 0.0)) continue;
            const double u1 = ua + su * (x1 - a);
            const double u2 = ua + su * (x2 - a);
            const double l1 = la + sl * (x1 - a);
            const double l2 = la + sl * (x2 - a);
            const double iu = int_signed_pow(u1, u2, pw, p);
            const double il = int_signed_pow(l1, l2, pw, p);
            const double um = 0.5 * (u1 + u2);
            const double lm = 0.5 * (l1 + l2);
            const double dm = um - lm;

            out.total += 0.5 * (std::fabs(iu) + std::fabs(il));
            if (dm > 0.0) {
                out.disp_plus += 0.5 * (iu - il);
            } else if (dm < 0.0) {
                out.disp_minus += 0.5 * (il - iu);
            }
            if (um > 0.0 && lm > 0.0) {
                out.shift_plus += (dm >= 0.0) ? il : iu;
            } else if (um < 0.0 && lm < 0.0) {
                out.shift_minus += -((dm >= 0.0) ? iu : il);
            }
        }
    }

    if (!(out.total <= kOverflowLimit)) throw_partial_sum();

    // Roundoff in the per-piece assembly can leave a component a few ulp
    // below zero; snap those without disturbing anything measurable.
    for (double* c : {&out.shift_plus, &out.shift_minus, &out.disp_plus,
                      &out.disp_minus}) {
        if (*c < 0.0 && *c > -1e-12 * (1.0 + out.total)) *c = 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quadrature path
// ---------------------------------------------------------------------------

Decomposition decompose_quadrature(const Distribution& F, const Distribution& G,
                                   int p, int n, DivergenceKind kind) {
    Decomposition out;
    out.kind = kind;
    out.p = p;
    out.exact_path = false;

    double tot = 0.0, sp = 0.0, sm = 0.0, dp = 0.0, dm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double alpha = (i + 0.5) / n;
        const double tau_hi = 0.5 * (1.0 + alpha);
        const double tau_lo = 0.5 * (1.0 - alpha);
        const double u = quantile(F, tau_hi) - quantile(G, tau_hi);
        const double l = quantile(F, tau_lo) - quantile(G, tau_lo);
        if (!std::isfinite(u) || !std::isfinite(l)) throw_nonfinite(alpha);
        const double a = signed_pow(u, p);
        const double b = signed_pow(l, p);
        tot += 0.5 * (std::fabs(a) + std::fabs(b));
        if (a > b) {
            dp += 0.5 * (a - b);
        } else {
            dm += 0.5 * (b - a);
        }
        if (u > 0.0 && l > 0.0) {
            sp += std::min(a, b);
        } else if (u < 0.0 && l < 0.0) {
            sm += -std::max(a, b);
        }
        if (!(tot <= kOverflowLimit)) throw_partial_sum();
    }
    const double h = 1.0 / n;
    out.total = tot * h;
    out.shift_plus = sp * h;
    out.shift_minus = sm * h;
    out.disp_plus = dp * h;
    out.disp_minus = dm * h;
    return out;
}

Decomposition decompose_dispatch(const Distribution& F, const Distribution& G,
                                 int p, const QuadratureConfig& cfg,
                                 DivergenceKind kind) {
    validate_cfg(cfg);
    if (p < 1) throw std::domain_error("divergence exponent p must be >= 1");
    if (cfg.prefer_exact) {
        const auto fp = to_polyline(F);
        const auto gp = to_polyline(G);
        if (fp && gp) return decompose_exact(*fp, *gp, p, kind);
    }
    return decompose_quadrature(F, G, p, cfg.n_single, kind);
}

} // namespace

double component_zero_threshold(const Decomposition& d) {
    return std::max(1e-9, 1e-6 * d.total);
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

double avm(const Distribution& F, const Distribution& G,
           const QuadratureConfig& cfg) {
    return decompose_dispatch(F, G, 1, cfg, DivergenceKind::avm).total;
}

Decomposition avm_decompose(const Distribution& F, const Distribution& G,
                            const QuadratureConfig& cfg) {
    return decompose_dispatch(F, G, 1, cfg, DivergenceKind::avm);
}

double wd_p(const Distribution& F, const Distribution& G, int p,
            const QuadratureConfig& cfg) {
    return decompose_dispatch(F, G, p, cfg, DivergenceKind::wdp).total;
}

Decomposition wd_decompose(const Distribution& F, const Distribution& G, int p,
                           const QuadratureConfig& cfg) {
    return decompose_dispatch(F, G, p, cfg, DivergenceKind::wdp);
}

AlphaComponents avm_alpha_components(const Distribution& F,
                                     const Distribution& G, double alpha) {
    const CentralInterval fi = central_interval(F, alpha);
    const CentralInterval gi = central_interval(G, alpha);
    const double u = fi.hi - gi.hi;
    const double l = fi.lo - gi.lo;

    AlphaComponents r;
    r.alpha = alpha;
    r.avm_alpha = std::fabs(u) + std::fabs(l);
    r.disp_plus = std::max(u - l, 0.0);
    r.disp_minus = std::max(l - u, 0.0);
    r.shift_plus = 2.0 * std::max(std::min(u, l), 0.0);
    // + 0.0 normalizes the -0.0 that "2 * max(-0.0, 0.0)" can produce.
    r.shift_minus = 2.0 * std::max(-std::max(u, l), 0.0) + 0.0;
    return r;
}

SpreadPlotData spread_plot_data(const Distribution& F, const Distribution& G,
                                int levels) {
    if (levels < 2) throw std::domain_error("spread_plot_data: levels must be >= 2");
    SpreadPlotData out;
    out.rows.reserve(static_cast<std::size_t>(levels));
    for (int j = 0; j < levels; ++j) {
        const double alpha = static_cast<double>(j) / levels;
        const CentralInterval fi = central_interval(F, alpha);
        const CentralInterval gi = central_interval(G, alpha);
        const AlphaComponents c = avm_alpha_components(F, G, alpha);
        SpreadPlotRow row;
        row.alpha = alpha;
        row.f_lo = fi.lo;
        row.f_hi = fi.hi;
        row.g_lo = gi.lo;
        row.g_hi = gi.hi;
        row.shift_plus = c.shift_plus;
        row.shift_minus = c.shift_minus;
        row.disp_plus = c.disp_plus;
        row.disp_minus = c.disp_minus;
        out.rows.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cramer distance
// ---------------------------------------------------------------------------

double cd_via_cdf(const Distribution& F, const Distribution& G,
                  const QuadratureConfig& cfg) {
    validate_cfg(cfg);
    const auto pf = to_polyline(F);
    const auto pg = to_polyline(G);
    if (pf && pg) {
        // Both CDFs are piecewise linear between the union of their support
        // breakpoints, so (F - G)^2 is piecewise quadratic and Simpson's
        // rule is exact on each open interval. Jumps sit exactly on the
        // cut points; sampling one-sided limits at the ends keeps each
        // segment's three samples on a single line.
        std::vector<double> xs;
        xs.reserve(pf->values().size() + pg->values().size());
        xs.insert(xs.end(), pf->values().begin(), pf->values().end());
        xs.insert(xs.end(), pg->values().begin(), pg->values().end());
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            const double x0 = xs[k];
            const double x1 = xs[k + 1];
            if (!(x1 > x0)) continue;
            const double d0 = pf->cdf(x0) - pg->cdf(x0);
            const double dm = pf->cdf(0.5 * (x0 + x1)) - pg->cdf(0.5 * (x0 + x1));
            const double d1 = pf->cdf_left(x1) - pg->cdf_left(x1);
            acc += (x1 - x0) / 6.0 * (d0 * d0 + 4.0 * dm * dm + d1 * d1);
            if (!(acc <= kOverflowLimit)) throw_partial_sum();
        }
        return acc;
    }
    const double eps = 1e-9;
    const double lo = std::min(quantile(F, eps), quantile(G, eps));
    const double hi = std::max(quantile(F, 1.0 - eps), quantile(G, 1.0 - eps));
    if (!(hi > lo)) return 0.0;
    const int n = cfg.n_single;
    const double h = (hi - lo) / n;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = lo + (k + 0.5) * h;
        const double d = cdf(F, x) - cdf(G, x);
        acc += d * d;
        if (!(acc <= kOverflowLimit)) throw_partial_sum();
    }
    return acc * h;
}

double cd_quantile_rep(const Distribution& F, const Distribution& G,
                       const QuadratureConfig& cfg) {
    validate_cfg(cfg);
    const int n = cfg.n_double;
    std::vector<double> qf(n), qg(n);
    for (int i = 0; i < n; ++i) {
        const double tau = (i + 0.5) / n;
        qf[i] = quantile(F, tau);
        qg[i] = quantile(G, tau);
    }
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // Level order is the index order; exact value ties have sign 0
            // and never contribute.
            if (i == j) continue;
            const double d = qf[i] - qg[j];
            const bool incompatible = (i > j) ? (d < 0.0) : (d > 0.0);
            if (incompatible) acc += std::fabs(d);
        }
        if (!(acc <= kOverflowLimit)) throw_partial_sum();
    }
    return 2.0 * acc / (static_cast<double>(n) * n);
}

namespace {

// One-sided Cramer shift mass: coverage-paired interval ends of A against
// B over the full (alpha, beta) square, including the disjoint-interval
// penalty term [A_lo(alpha) - B_hi(beta)]_+.
double cd_shift_term(const Distribution& A, const Distribution& B, int n) {
    std::vector<double> au(n), al(n), bu(n), bl(n);
    for (int i = 0; i < n; ++i) {
        const double c = (i + 0.5) / n;
        au[i] = quantile(A, 0.5 * (1.0 + c));
        al[i] = quantile(A, 0.5 * (1.0 - c));
        bu[i] = quantile(B, 0.5 * (1.0 + c));
        bl[i] = quantile(B, 0.5 * (1.0 - c));
    }
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        double row = 0.0;
        for (int i = 0; i < n; ++i) {
            const double mn = std::min(au[i] - bu[j], al[i] - bl[j]);
            if (mn > 0.0) row += mn;
            const double pen = al[i] - bu[j];
            if (pen > 0.0) row += pen;
        }
        acc += row;
    }
    return 0.5 * acc / (static_cast<double>(n) * n);
}

// One-sided Cramer dispersion mass: the inner coverage runs only up to the
// outer one, so each beta row integrates over a fresh midpoint grid on
// (0, beta) with weight beta / n.
double cd_disp_term(const Distribution& A, const Distribution& B, int n) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double beta = (j + 0.5) / n;
        const double buj = quantile(B, 0.5 * (1.0 + beta));
        const double blj = quantile(B, 0.5 * (1.0 - beta));
        double row = 0.0;
        for (int i = 0; i < n; ++i) {
            const double a = beta * (i + 0.5) / n;
            const double d = (quantile(A, 0.5 * (1.0 + a)) - buj) -
                             (quantile(A, 0.5 * (1.0 - a)) - blj);
            if (d > 0.0) row += d;
        }
        acc += row * (beta / n);
    }
    return 0.5 * acc / n;
}

} // namespace

Decomposition cd_decompose(const Distribution& F, const Distribution& G,
                           const QuadratureConfig& cfg) {
    validate_cfg(cfg);
    const int n = cfg.n_double;
    Decomposition out;
    out.kind = DivergenceKind::cd;
    out.p = 1;
    out.exact_path = false;
    out.shift_plus = cd_shift_term(F, G, n);
    out.shift_minus = cd_shift_term(G, F, n);
    out.disp_plus = cd_disp_term(F, G, n);
    out.disp_minus = cd_disp_term(G, F, n);
    out.total = out.component_sum();
    return out;
}

} // namespace qdd
