#pragma once

#include "qdd/decompose.hpp"

namespace qdd {

/// A pair of normal distributions compared as (F, G). The decomposition
/// formulas only ever see the pair through three reduced scales:
///   mu_tilde    |mu_f - mu_g|      location gap
///   sigma_tilde |sigma_f - sigma_g| scale gap
///   rho_tilde   sqrt(sigma_f^2 + sigma_g^2) combined scale (Cramer only)
struct NormalPair {
    double mu_f = 0.0;
    double sigma_f = 1.0;
    double mu_g = 0.0;
    double sigma_g = 1.0;

    double mu_tilde() const;
    double sigma_tilde() const;
    double rho_tilde() const;
};

/// Conditional truncated moment E[Y^p | Y > a] for Y ~ N(mu, sigma^2),
/// computed by the two-term recurrence
///   m_k = (k-1) sigma^2 m_{k-2} + mu m_{k-1} + sigma a^{k-1} h((a-mu)/sigma)
/// with m_{-1} = 0, m_0 = 1, a^0 taken as 1 even at a = 0, and h the normal
/// hazard. Throws std::domain_error for p < -1, non-positive sigma, or a
/// truncation point so deep that (a - mu)/sigma exceeds the hazard range.
double truncated_normal_moment(int p, double mu, double sigma, double a);

/// Closed-form decompositions for a normal pair. Each returns the same
/// structure the grid engines produce, with exact_path = true since no
/// quadrature is involved. Component placement follows the pair ordering:
/// shift mass lands on the plus side when mu_f >= mu_g, dispersion mass on
/// the plus side when sigma_f >= sigma_g. When the scales agree to within
/// 1e-13 relative the quantile lines are parallel and everything is shift.
Decomposition normal_avm_decompose(const NormalPair& np);
Decomposition normal_wdp_decompose(const NormalPair& np, int p);
Decomposition normal_cd_decompose(const NormalPair& np);

} // namespace qdd
