#include "qdd/closed_forms.hpp"

#include "qdd/normal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdd {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887;

void validate_pair(const NormalPair& np) {
    if (!std::isfinite(np.mu_f) || !std::isfinite(np.mu_g) ||
        !(np.sigma_f > 0.0) || !std::isfinite(np.sigma_f) ||
        !(np.sigma_g > 0.0) || !std::isfinite(np.sigma_g)) {
        throw std::domain_error(
            "normal pair: means must be finite and scales positive");
    }
}

double pow_nonneg(double x, int p) {
    double m = 1.0;
    for (int k = 0; k < p; ++k) m *= x;
    return m;
}

// Place the computed one-sided masses on the correct components. Negative
// inputs can only arise from cancellation rounding, so they are snapped to
// zero, and the total is rebuilt as the component sum to keep the
// sum-equals-total identity exact.
Decomposition assemble(const NormalPair& np, DivergenceKind kind, int p,
                       double shift_val, double disp_val) {
    Decomposition d;
    d.kind = kind;
    d.p = p;
    d.exact_path = true;
    shift_val = std::max(shift_val, 0.0);
    disp_val = std::max(disp_val, 0.0);
    if (np.mu_f >= np.mu_g) {
        d.shift_plus = shift_val;
    } else {
        d.shift_minus = shift_val;
    }
    if (np.sigma_f >= np.sigma_g) {
        d.disp_plus = disp_val;
    } else {
        d.disp_minus = disp_val;
    }
    d.total = d.component_sum();
    return d;
}

bool scales_parallel(const NormalPair& np) {
    return np.sigma_tilde() <
           1e-13 * std::max(np.sigma_f, np.sigma_g);
}

} // namespace

double NormalPair::mu_tilde() const { return std::fabs(mu_f - mu_g); }
double NormalPair::sigma_tilde() const { return std::fabs(sigma_f - sigma_g); }
double NormalPair::rho_tilde() const { return std::hypot(sigma_f, sigma_g); }

double truncated_normal_moment(int p, double mu, double sigma, double a) {
    if (p < -1) {
        throw std::domain_error("truncated_normal_moment: p must be >= -1");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu) ||
        !std::isfinite(a)) {
        throw std::domain_error(
            "truncated_normal_moment: sigma must be positive and all "
            "arguments finite");
    }
    if (p == -1) return 0.0;
    if (p == 0) return 1.0;
    const double h = normal_hazard((a - mu) / sigma);
    double m_prev = 0.0; // m_{-1}
    double m_cur = 1.0;  // m_0
    double apow = 1.0;   // a^{k-1}, with 0^0 := 1
    for (int k = 1; k <= p; ++k) {
        const double m_next =
            (k - 1) * sigma * sigma * m_prev + mu * m_cur + sigma * apow * h;
        m_prev = m_cur;
        m_cur = m_next;
        apow *= a;
    }
    return m_cur;
}

Decomposition normal_avm_decompose(const NormalPair& np) {
    validate_pair(np);
    const double mt = np.mu_tilde();
    const double st = np.sigma_tilde();
    if (scales_parallel(np)) {
        return assemble(np, DivergenceKind::avm, 1, mt, 0.0);
    }
    const double r = mt / st;
    const double gap = mt * (2.0 * normal_cdf(r) - 1.0);
    const double disp = 2.0 * st * normal_pdf(0.0);
    const double shift = gap + 2.0 * st * (normal_pdf(r) - normal_pdf(0.0));
    return assemble(np, DivergenceKind::avm, 1, shift, disp);
}

Decomposition normal_wdp_decompose(const NormalPair& np, int p) {
    validate_pair(np);
    if (p < 1) throw std::domain_error("normal_wdp_decompose: p must be >= 1");
    const double mt = np.mu_tilde();
    const double st = np.sigma_tilde();
    if (scales_parallel(np)) {
        return assemble(np, DivergenceKind::wdp, p, pow_nonneg(mt, p), 0.0);
    }
    const double r = mt / st;
    const double phi_r = normal_cdf(r);
    const double sf_r = normal_sf(r);
    const double m_pos = truncated_normal_moment(p, mt, st, 0.0);
    const double m_mid = truncated_normal_moment(p, mt, st, mt);
    // The mirrored moment needs the hazard at +r; once the survival weight
    // underflows (or r is past the hazard range) that term contributes
    // nothing and is skipped rather than evaluated.
    double tail = 0.0;
    if (sf_r > 0.0 && r <= kHazardMaxZ) {
        tail = sf_r * truncated_normal_moment(p, -mt, st, 0.0);
    }
    const double disp = m_mid + tail - phi_r * m_pos;
    const double shift = 2.0 * phi_r * m_pos - m_mid;
    return assemble(np, DivergenceKind::wdp, p, shift, disp);
}

Decomposition normal_cd_decompose(const NormalPair& np) {
    validate_pair(np);
    const double mt = np.mu_tilde();
    const double rho = np.rho_tilde();
    const double r = mt / rho;
    const double phi0 = normal_pdf(0.0);
    const double disp =
        2.0 * rho * phi0 - kSqrt2 * phi0 * (np.sigma_f + np.sigma_g);
    const double shift = mt * (2.0 * normal_cdf(r) - 1.0) -
                         2.0 * rho * (phi0 - normal_pdf(r));
    return assemble(np, DivergenceKind::cd, 1, shift, disp);
}

} // namespace qdd
