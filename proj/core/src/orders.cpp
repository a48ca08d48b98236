#include "qdd/orders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qdd {

namespace {

void validate_grid(int grid_n) {
    if (grid_n < 2) {
        throw std::domain_error("order check: grid_n must be >= 2");
    }
}

// Default tolerance scales with the coarser of the two interquartile
// ranges so that "zero" means the same thing for data in meters and data
// in millimeters.
double effective_tol(const Distribution& F, const Distribution& G,
                     std::optional<double> tol) {
    if (tol) {
        if (!(*tol >= 0.0)) {
            throw std::domain_error("order check: tol must be >= 0");
        }
        return *tol;
    }
    const double iqr_f = quantile(F, 0.75) - quantile(F, 0.25);
    const double iqr_g = quantile(G, 0.75) - quantile(G, 0.25);
    return 1e-9 * (1.0 + std::max(iqr_f, iqr_g));
}

bool jump_assumption(const Distribution& F, const Distribution& G) {
    return has_quantile_jump(F) || has_quantile_jump(G);
}

// Folded quantile-difference samples shared by the one-dimensional checks:
// coverage grid c_i = (i + 0.5)/n, upper difference at (1+c)/2, lower at
// (1-c)/2.
struct FoldedGrid {
    std::vector<double> cov;
    std::vector<double> up;
    std::vector<double> lo;
};

FoldedGrid folded_grid(const Distribution& F, const Distribution& G, int n) {
    FoldedGrid g;
    g.cov.resize(n);
    g.up.resize(n);
    g.lo.resize(n);
    for (int i = 0; i < n; ++i) {
        const double c = (i + 0.5) / n;
        const double hi = 0.5 * (1.0 + c);
        const double lo = 0.5 * (1.0 - c);
        g.cov[i] = c;
        g.up[i] = quantile(F, hi) - quantile(G, hi);
        g.lo[i] = quantile(F, lo) - quantile(G, lo);
    }
    return g;
}

// Pointwise check "value_i >= -tol for all i". Returns true when it holds;
// otherwise reports the level of the worst violation.
template <typename ValueAt>
bool pointwise_holds(int n, double tol, ValueAt value_at, double* worst_level) {
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = value_at(i);
        if (v < -tol && v < worst) {
            worst = v;
            *worst_level = i;
            ok = false;
        }
    }
    return ok;
}

} // namespace

const char* order_relation_name(OrderRelation r) {
    switch (r) {
        case OrderRelation::dispersive: return "dispersive";
        case OrderRelation::weak_dispersive: return "weak_dispersive";
        case OrderRelation::stochastic: return "stochastic";
        case OrderRelation::weak_stochastic: return "weak_stochastic";
        case OrderRelation::relaxed_stochastic: return "relaxed_stochastic";
        case OrderRelation::strong_stochastic: return "strong_stochastic";
    }
    return "unknown";
}

OrderVerdict check_dispersive(const Distribution& F, const Distribution& G,
                              int grid_n, std::optional<double> tol) {
    validate_grid(grid_n);
    const double eps = effective_tol(F, G, tol);

    OrderVerdict v;
    v.relation = OrderRelation::dispersive;
    v.assumption_violated = jump_assumption(F, G);

    auto nondecreasing = [&](const Distribution& A, const Distribution& B,
                             std::optional<double>& fail_level) {
        double run_max = -std::numeric_limits<double>::infinity();
        double worst = 0.0;
        bool ok = true;
        for (int i = 0; i < grid_n; ++i) {
            const double t = (i + 0.5) / grid_n;
            const double d = quantile(A, t) - quantile(B, t);
            const double drop = run_max - d;
            if (drop > eps && drop > worst) {
                worst = drop;
                fail_level = t;
                ok = false;
            }
            run_max = std::max(run_max, d);
        }
        return ok;
    };

    std::optional<double> fwd_fail, rev_fail;
    v.holds = nondecreasing(F, G, fwd_fail);
    if (!v.holds) {
        v.witness = fwd_fail;
        return v;
    }
    const bool rev = nondecreasing(G, F, rev_fail);
    v.strict_holds = !rev;
    if (v.strict_holds) v.witness = rev_fail;
    return v;
}

OrderVerdict check_weak_dispersive(const Distribution& F,
                                   const Distribution& G, int grid_n,
                                   std::optional<double> tol) {
    validate_grid(grid_n);
    const double eps = effective_tol(F, G, tol);

    OrderVerdict v;
    v.relation = OrderRelation::weak_dispersive;
    v.assumption_violated = jump_assumption(F, G);

    const FoldedGrid g = folded_grid(F, G, grid_n);
    // Spread difference at coverage c is U(c) - L(c): interval-width excess
    // of F over G.
    double fail_idx = 0.0;
    auto spread_diff = [&g](int i) { return g.up[i] - g.lo[i]; };
    v.holds = pointwise_holds(grid_n, eps, spread_diff, &fail_idx);
    if (!v.holds) {
        v.witness = g.cov[static_cast<int>(fail_idx)];
        return v;
    }
    auto rev_diff = [&g](int i) { return g.lo[i] - g.up[i]; };
    const bool rev = pointwise_holds(grid_n, eps, rev_diff, &fail_idx);
    v.strict_holds = !rev;
    if (v.strict_holds) v.witness = g.cov[static_cast<int>(fail_idx)];
    return v;
}

OrderVerdict check_stochastic(const Distribution& F, const Distribution& G,
                              int grid_n, std::optional<double> tol) {
    validate_grid(grid_n);
    const double eps = effective_tol(F, G, tol);

    OrderVerdict v;
    v.relation = OrderRelation::stochastic;
    v.assumption_violated = jump_assumption(F, G);

    const FoldedGrid g = folded_grid(F, G, grid_n);
    double fail_idx = 0.0;
    auto min_form = [&g](int i) { return std::min(g.up[i], g.lo[i]); };
    v.holds = pointwise_holds(grid_n, eps, min_form, &fail_idx);
    if (!v.holds) {
        v.witness = g.cov[static_cast<int>(fail_idx)];
        return v;
    }
    auto rev_form = [&g](int i) { return std::min(-g.up[i], -g.lo[i]); };
    const bool rev = pointwise_holds(grid_n, eps, rev_form, &fail_idx);
    v.strict_holds = !rev;
    if (v.strict_holds) v.witness = g.cov[static_cast<int>(fail_idx)];
    return v;
}

OrderVerdict check_strong_stochastic(const Distribution& F,
                                     const Distribution& G, int grid_n,
                                     std::optional<double> tol) {
    validate_grid(grid_n);
    const double eps = effective_tol(F, G, tol);

    OrderVerdict v;
    v.relation = OrderRelation::strong_stochastic;
    v.assumption_violated = jump_assumption(F, G);

    const FoldedGrid g = folded_grid(F, G, grid_n);
    double fail_idx = 0.0;
    auto min_form = [&g](int i) { return std::min(g.up[i], g.lo[i]); };
    const bool weak_part = pointwise_holds(grid_n, eps, min_form, &fail_idx);
    if (!weak_part) {
        v.witness = g.cov[static_cast<int>(fail_idx)];
        return v;
    }
    // Strictness certificate: some coverage where both folded differences
    // clear the tolerance.
    double best = -std::numeric_limits<double>::infinity();
    int best_i = -1;
    for (int i = 0; i < grid_n; ++i) {
        const double m = std::min(g.up[i], g.lo[i]);
        if (m > best) {
            best = m;
            best_i = i;
        }
    }
    v.holds = best > eps;
    v.strict_holds = v.holds;
    if (v.holds) v.witness = g.cov[best_i];
    return v;
}

OrderVerdict check_relaxed_stochastic(const Distribution& F,
                                      const Distribution& G, int grid_n,
                                      std::optional<double> tol) {
    validate_grid(grid_n);
    const double eps = effective_tol(F, G, tol);

    OrderVerdict v;
    v.relation = OrderRelation::relaxed_stochastic;
    v.assumption_violated = jump_assumption(F, G);

    const FoldedGrid g = folded_grid(F, G, grid_n);
    double fail_idx = 0.0;
    auto max_form = [&g](int i) { return std::max(g.up[i], g.lo[i]); };
    v.holds = pointwise_holds(grid_n, eps, max_form, &fail_idx);
    if (!v.holds) {
        v.witness = g.cov[static_cast<int>(fail_idx)];
        return v;
    }
    auto rev_form = [&g](int i) { return std::max(-g.up[i], -g.lo[i]); };
    const bool rev = pointwise_holds(grid_n, eps, rev_form, &fail_idx);
    v.strict_holds = !rev;
    if (v.strict_holds) v.witness = g.cov[static_cast<int>(fail_idx)];
    return v;
}

OrderVerdict check_weak_stochastic(const Distribution& F,
                                   const Distribution& G, int grid_n,
                                   std::optional<double> tol) {
    validate_grid(grid_n);
    const double eps = effective_tol(F, G, tol);

    OrderVerdict v;
    v.relation = OrderRelation::weak_stochastic;
    v.assumption_violated = jump_assumption(F, G);

    const int n = grid_n;
    std::vector<double> fu(n), fl(n), gu(n), gl(n), cov(n);
    for (int i = 0; i < n; ++i) {
        const double c = (i + 0.5) / n;
        const double hi = 0.5 * (1.0 + c);
        const double lo = 0.5 * (1.0 - c);
        cov[i] = c;
        fu[i] = quantile(F, hi);
        fl[i] = quantile(F, lo);
        gu[i] = quantile(G, hi);
        gl[i] = quantile(G, lo);
    }

    // Worst coverage pair for "F covers G": minimize over (tau, xi) the
    // better of the two end differences. The reverse direction reuses the
    // same samples with the roles swapped.
    auto square_min = [n](const std::vector<double>& au,
                          const std::vector<double>& al,
                          const std::vector<double>& bu,
                          const std::vector<double>& bl, int* ti, int* xi) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double m = std::max(au[i] - bu[j], al[i] - bl[j]);
                if (m < best) {
                    best = m;
                    *ti = i;
                    *xi = j;
                }
            }
        }
        return best;
    };

    int ti = 0, xi = 0;
    const double fwd = square_min(fu, fl, gu, gl, &ti, &xi);
    v.holds = fwd >= -eps;
    if (!v.holds) {
        v.witness = cov[ti];
        v.witness2 = cov[xi];
        return v;
    }
    const double rev = square_min(gu, gl, fu, fl, &ti, &xi);
    v.strict_holds = rev < -eps;
    if (v.strict_holds) {
        v.witness = cov[ti];
        v.witness2 = cov[xi];
    }
    return v;
}

BridgeReport order_component_bridge(const Distribution& F,
                                    const Distribution& G,
                                    const QuadratureConfig& cfg) {
    BridgeReport rep;
    rep.assumption_violated = jump_assumption(F, G);

    const Decomposition davm = avm_decompose(F, G, cfg);
    const Decomposition dcd = cd_decompose(F, G, cfg);
    const Decomposition dwd2 = wd_decompose(F, G, 2, cfg);

    const OrderVerdict owd = check_weak_dispersive(F, G);
    const OrderVerdict ows = check_weak_stochastic(F, G);
    const OrderVerdict ors = check_relaxed_stochastic(F, G);

    auto fill = [](BridgeEntry& e, OrderRelation rel, DivergenceKind kind,
                   const Decomposition& d, double value, bool order_holds) {
        e.relation = rel;
        e.divergence = kind;
        e.component_value = value;
        e.component_tol = component_zero_threshold(d);
        e.component_zero = value <= e.component_tol;
        e.order_holds = order_holds;
        e.consistent = e.component_zero == e.order_holds;
    };

    fill(rep.entries[0], OrderRelation::weak_dispersive, DivergenceKind::avm,
         davm, davm.disp_minus, owd.holds);
    fill(rep.entries[1], OrderRelation::weak_stochastic, DivergenceKind::cd,
         dcd, dcd.shift_minus, ows.holds);
    fill(rep.entries[2], OrderRelation::relaxed_stochastic,
         DivergenceKind::wdp, dwd2, dwd2.shift_minus, ors.holds);

    rep.all_consistent = rep.entries[0].consistent &&
                         rep.entries[1].consistent &&
                         rep.entries[2].consistent;
    return rep;
}

} // namespace qdd
