// Divergence totals and their exact four-part decompositions.
//
// Three divergences are supported, all defined through quantile functions:
//   avm   integral of |F^-1 - G^-1| over (0,1), equal to the L1 distance
//         between the CDFs;
//   wd_p  integral of |F^-1 - G^-1|^p (the p-th power of the p-Wasserstein
//         metric, reported as the power, never the root);
//   cd    integral of (F - G)^2 over the real line.
//
// Each splits into four non-negative components (upward shift, downward
// shift, increased dispersion, decreased dispersion) that sum back to the
// total. The split lives naturally in folded coordinates: for coverage
// alpha, compare the upper interval-end difference
//     U(alpha) = F^-1((1+alpha)/2) - G^-1((1+alpha)/2)
// with the lower one
//     L(alpha) = F^-1((1-alpha)/2) - G^-1((1-alpha)/2).
// Where both are positive, F sits above G at that coverage (shift up);
// where U exceeds L, F is wider (more dispersed); and so on. Integrating
// the classified pieces over alpha produces the components.
//
// Piecewise-linear quantile pairs (uniforms, mixtures of them, empirical
// data, histograms) take an exact path: U and L are piecewise linear with
// known breakpoints, so every piece integrates in closed form and the
// component sum matches the total to machine precision. Everything else
// (anything involving a Normal) uses composite midpoint quadrature. The
// Cramer distance decomposition is a double integral over coverage pairs
// and always uses quadrature.

#pragma once

#include "qdd/distribution.hpp"

#include <vector>

namespace qdd {

/// Grid sizes for the quadrature paths. n_single drives one-dimensional
/// level-space and x-space integrals, n_double each axis of double
/// integrals. Both must be at least 8. prefer_exact = false forces the
/// quadrature path even for piecewise-linear pairs (useful for testing).
struct QuadratureConfig {
    int n_single = 4096;
    int n_double = 512;
    bool prefer_exact = true;
};

enum class DivergenceKind { avm, wdp, cd };

/// A divergence total with its four-component split. The components are
/// each >= 0 and sum to total (exactly on the exact path, within the
/// integrator's error otherwise; cd builds total as the sum).
struct Decomposition {
    DivergenceKind kind = DivergenceKind::avm;
    int p = 1; // exponent, meaningful when kind == wdp
    double total = 0.0;
    double shift_plus = 0.0;
    double shift_minus = 0.0;
    double disp_plus = 0.0;
    double disp_minus = 0.0;
    bool exact_path = false;

    double component_sum() const {
        // Grouped so the value is unchanged when the four components are
        // mirrored (plus/minus swapped), which keeps totals built from this
        // sum bitwise equal under argument swap.
        return (shift_plus + shift_minus) + (disp_plus + disp_minus);
    }
};

/// Classification threshold below which a component counts as zero:
/// max(1e-9, 1e-6 * total). Shared by the order bridge and the CLI.
double component_zero_threshold(const Decomposition& d);

/// Single-coverage attribution at one alpha. These are the raw alpha-wise
/// integrands, not yet halved or integrated: avm_alpha = |U| + |L| and the
/// four components sum to it, with at most one shift and one dispersion
/// term positive at any fixed alpha.
struct AlphaComponents {
    double alpha = 0.0;
    double avm_alpha = 0.0;
    double shift_plus = 0.0;
    double shift_minus = 0.0;
    double disp_plus = 0.0;
    double disp_minus = 0.0;
};

/// Per-level rows for an external quantile-spread plot: the two central
/// intervals plus the alpha-wise component attribution.
struct SpreadPlotRow {
    double alpha = 0.0;
    double f_lo = 0.0, f_hi = 0.0;
    double g_lo = 0.0, g_hi = 0.0;
    double shift_plus = 0.0, shift_minus = 0.0;
    double disp_plus = 0.0, disp_minus = 0.0;
};

struct SpreadPlotData {
    std::vector<SpreadPlotRow> rows;
};

/// Mean absolute quantile difference, integral of |F^-1 - G^-1| on (0,1).
double avm(const Distribution& F, const Distribution& G,
           const QuadratureConfig& cfg = {});

/// Alpha-wise attribution at a single coverage level (see AlphaComponents).
/// alpha = 1 is allowed only for bounded supports.
AlphaComponents avm_alpha_components(const Distribution& F,
                                     const Distribution& G, double alpha);

/// Four-component split of avm; components = one half the integral of the
/// alpha-wise terms over (0,1).
Decomposition avm_decompose(const Distribution& F, const Distribution& G,
                            const QuadratureConfig& cfg = {});

/// Integral of |F^-1 - G^-1|^p on (0,1), integer p >= 1. Note this is the
/// p-th power of the Wasserstein metric, not the metric itself.
double wd_p(const Distribution& F, const Distribution& G, int p,
            const QuadratureConfig& cfg = {});

/// Four-component split of wd_p via signed p-th powers of U and L; p = 1
/// reproduces avm_decompose through the same code path.
Decomposition wd_decompose(const Distribution& F, const Distribution& G, int p,
                           const QuadratureConfig& cfg = {});

/// Integral of (F(x) - G(x))^2 in x-space. Exact piecewise integration
/// when both quantiles are piecewise linear; otherwise midpoint rule with
/// n_single nodes over the joint quantile hull at levels 1e-9 and
/// 1 - 1e-9. Throws std::overflow_error when a partial sum leaves the
/// finite range.
double cd_via_cdf(const Distribution& F, const Distribution& G,
                  const QuadratureConfig& cfg = {});

/// The same quantity through its quantile-pair representation
/// 2 * double-integral of |F^-1(tau) - G^-1(xi)| over the incompatibility
/// set (level order contradicting value order; exact ties contribute
/// nothing). Serves as a cross-representation consistency check; midpoint
/// grid of n_double x n_double.
double cd_quantile_rep(const Distribution& F, const Distribution& G,
                       const QuadratureConfig& cfg = {});

/// Four-component split of the squared-CDF distance via central-interval
/// pair comparisons at coverage pairs (alpha, beta). total is the component
/// sum. Always a quadrature result (exact_path = false).
Decomposition cd_decompose(const Distribution& F, const Distribution& G,
                           const QuadratureConfig& cfg = {});

/// Rows at levels alpha = j / levels, j = 0 .. levels-1, ready to plot.
/// The first row sits at alpha = 0 where both intervals degenerate to the
/// medians.
SpreadPlotData spread_plot_data(const Distribution& F, const Distribution& G,
                                int levels);

} // namespace qdd
