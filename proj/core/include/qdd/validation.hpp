#pragma once

#include "qdd/decompose.hpp"
#include "qdd/distribution.hpp"

#include <array>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace qdd {

/// One line of a self-check report.
struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Reference pairs with independently computed decomposition values; the
/// numbers asserted against them come from tests/oracles. Shared between
/// the self-test and the test suite.
namespace fixtures {

/// Two nested two-piece mixtures whose halves are shifted in opposite
/// directions; pure two-sided shift under the area metric.
std::pair<Distribution, Distribution> nested_shift_pair();

/// Uniform(-2,2) against a staircase whose upper half is squeezed to half
/// width; identical lower halves.
std::pair<Distribution, Distribution> half_width_pair();

/// Three-piece distribution against its doubled copy (G = 2F), a pure
/// scale family with an asymmetric base.
std::pair<Distribution, Distribution> double_scale_pair();

/// Two two-atom distributions at shifted locations.
std::pair<Distribution, Distribution> two_atom_pair();

/// Overlapping piecewise pair with mass pushed across the overlap.
std::pair<Distribution, Distribution> overlap_shift_pair();

/// Mixtures with 30% atoms at both support endpoints and a small interior
/// perturbation.
std::pair<Distribution, Distribution> atom_endpoint_pair();

/// Equal spreads at every coverage except a single wider central interval;
/// the classic strict-order-with-zero-mass example.
std::pair<Distribution, Distribution> equal_spread_pair();

/// Uniform(-1.6, 1.6) against the standard normal.
std::pair<Distribution, Distribution> uniform_vs_normal_pair();

/// (F, G, H) with H the reflection of F: covering relations hold pairwise
/// along the chain but fail across it (weak stochastic intransitivity).
std::array<Distribution, 3> coverage_trade_trio();

/// (F, G, H) five-piece trio on a common support, H mirroring F; the
/// relaxed stochastic chain holds but does not compose.
std::array<Distribution, 3> mirrored_tail_trio();

} // namespace fixtures

/// Deterministic random-model generators for the property suites. All draw
/// from the caller's engine, so the call site controls seeding.
namespace testgen {

/// Contiguous mixture of 2..max_pieces uniform pieces: a continuous,
/// strictly increasing piecewise-linear quantile.
Distribution random_uniform_mixture(std::mt19937_64& rng, int max_pieces = 5);

/// Normal with mu in [-3, 3] and sigma in [0.3, 3].
Distribution random_normal(std::mt19937_64& rng);

/// Continuous piecewise-linear distribution symmetric about a random
/// center.
Distribution random_symmetric(std::mt19937_64& rng);

/// x -> shift + scale * x applied to the whole distribution (scale > 0).
Distribution affine(const Distribution& d, double shift, double scale);

} // namespace testgen

namespace validation {

/// Pinned reference table. cfg controls the quadrature grids, so a
/// deliberately coarse grid makes the quadrature rows fail with a
/// tolerance report while the exact-path rows keep passing.
std::vector<CheckResult> fixture_checks(const QuadratureConfig& cfg = {});

/// Components-sum-equals-total on random pairs, all three divergences,
/// exact and quadrature paths.
std::vector<CheckResult> exactness_checks(const QuadratureConfig& cfg = {},
                                          int pairs_per_divergence = 500);

/// Closed-form vs quadrature agreement on random normal pairs.
std::vector<CheckResult> gaussian_agreement_checks(
    const QuadratureConfig& cfg = {}, int pairs = 200);

/// fixture_checks + exactness_checks + gaussian_agreement_checks.
std::vector<CheckResult> run_selftest(const QuadratureConfig& cfg = {});

} // namespace validation

} // namespace qdd
