#pragma once

#include "qdd/decompose.hpp"
#include "qdd/distribution.hpp"

#include <array>
#include <optional>

namespace qdd {

enum class OrderRelation {
    dispersive,
    weak_dispersive,
    stochastic,
    weak_stochastic,
    relaxed_stochastic,
    strong_stochastic,
};

const char* order_relation_name(OrderRelation r);

/// Outcome of a grid check of "F >= G" in one of the order relations.
///
/// strict_holds means the relation holds (F, G) and fails (G, F); the one
/// exception is the strong stochastic relation, which is strict by
/// definition, so there strict_holds always equals holds.
///
/// witness carries the most informative grid level available: the worst
/// violating level when the check fails, or the level certifying
/// strictness when it holds strictly. The weak stochastic check compares
/// coverage pairs, so its witness is a (tau, xi) pair with the second
/// coordinate in witness2.
///
/// assumption_violated flags quantile jumps in either input (support gaps).
/// The checks still run, but the underlying equivalences between orders
/// and component signs are only guaranteed for jump-free quantiles, so a
/// flagged verdict should be read as advisory.
struct OrderVerdict {
    OrderRelation relation = OrderRelation::stochastic;
    bool holds = false;
    bool strict_holds = false;
    bool assumption_violated = false;
    std::optional<double> witness;
    std::optional<double> witness2;
};

/// F >= G in the dispersive sense: the quantile difference is nondecreasing.
/// Scanned against the running maximum so slow cumulative declines are
/// caught, not just single-step drops.
OrderVerdict check_dispersive(const Distribution& F, const Distribution& G,
                              int grid_n = 1024,
                              std::optional<double> tol = std::nullopt);

/// F >= G in the weak dispersive sense: every central interval of F is at
/// least as wide as the same-coverage interval of G.
OrderVerdict check_weak_dispersive(const Distribution& F,
                                   const Distribution& G, int grid_n = 1024,
                                   std::optional<double> tol = std::nullopt);

/// F >= G stochastically: the quantile difference is nonnegative
/// everywhere, checked in folded form as min(U, L) >= 0 per coverage.
OrderVerdict check_stochastic(const Distribution& F, const Distribution& G,
                              int grid_n = 1024,
                              std::optional<double> tol = std::nullopt);

/// Strong variant: stochastic order plus a coverage where both folded
/// differences are strictly positive.
OrderVerdict check_strong_stochastic(const Distribution& F,
                                     const Distribution& G, int grid_n = 1024,
                                     std::optional<double> tol = std::nullopt);

/// F >= G in the weak stochastic sense: for every coverage pair (tau, xi)
/// at least one of the upper-end and lower-end differences is nonnegative.
/// grid_n is the per-axis resolution of the coverage square.
OrderVerdict check_weak_stochastic(const Distribution& F,
                                   const Distribution& G, int grid_n = 256,
                                   std::optional<double> tol = std::nullopt);

/// F >= G in the relaxed stochastic sense: at every coverage at least one
/// of the folded differences is nonnegative, max(U, L) >= 0.
OrderVerdict check_relaxed_stochastic(const Distribution& F,
                                      const Distribution& G, int grid_n = 1024,
                                      std::optional<double> tol = std::nullopt);

/// One row of the order/component correspondence: a minus-side component
/// that is zero exactly when the matching order relation holds.
struct BridgeEntry {
    OrderRelation relation = OrderRelation::weak_dispersive;
    DivergenceKind divergence = DivergenceKind::avm;
    double component_value = 0.0;
    double component_tol = 0.0;
    bool component_zero = false;
    bool order_holds = false;
    bool consistent = false;
};

struct BridgeReport {
    std::array<BridgeEntry, 3> entries;
    bool all_consistent = false;
    bool assumption_violated = false;
};

/// Cross-checks the three component/order equivalences on one pair:
///   area-validation disp_minus == 0   vs  F >= G weak dispersive
///   Cramer shift_minus == 0           vs  F >= G weak stochastic
///   Wasserstein-2 shift_minus == 0    vs  F >= G relaxed stochastic
/// "Zero" uses component_zero_threshold of the respective decomposition.
BridgeReport order_component_bridge(const Distribution& F,
                                    const Distribution& G,
                                    const QuadratureConfig& cfg = {});

} // namespace qdd
