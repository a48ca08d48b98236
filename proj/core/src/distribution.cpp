#include "qdd/distribution.hpp"

#include "qdd/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qdd {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

bool is_sorted_nondecreasing(const std::vector<double>& xs) {
    return std::is_sorted(xs.begin(), xs.end());
}

bool all_finite(const std::vector<double>& xs) {
    return std::all_of(xs.begin(), xs.end(),
                       [](double x) { return std::isfinite(x); });
}

} // namespace

// ---------------------------------------------------------------------------
// Polyline
// ---------------------------------------------------------------------------

Polyline::Polyline(std::vector<double> levels, std::vector<double> values)
    : t_(std::move(levels)), v_(std::move(values)) {
    require(t_.size() == v_.size(), "polyline: levels and values differ in length");
    require(t_.size() >= 2, "polyline: need at least two points");
    require(all_finite(v_), "polyline: values must be finite");
    require(is_sorted_nondecreasing(t_), "polyline: levels must be nondecreasing");
    require(is_sorted_nondecreasing(v_), "polyline: values must be nondecreasing");
    require(t_.front() == 0.0 && t_.back() == 1.0,
            "polyline: levels must start at 0 and end at 1");

    // Canonical cleanup: drop exact duplicate points, and where three or
    // more points share one coordinate keep only the two extremes.
    std::vector<double> t, v;
    t.reserve(t_.size());
    v.reserve(v_.size());
    for (std::size_t i = 0; i < t_.size(); ++i) {
        if (!t.empty() && t.back() == t_[i] && v.back() == v_[i]) continue;
        if (t.size() >= 2) {
            const auto n = t.size();
            const bool same_level = t[n - 1] == t[n - 2] && t_[i] == t[n - 1];
            const bool same_value = v[n - 1] == v[n - 2] && v_[i] == v[n - 1];
            if (same_level || same_value) {
                t.pop_back();
                v.pop_back();
            }
        }
        t.push_back(t_[i]);
        v.push_back(v_[i]);
    }
    require(t.size() >= 2, "polyline: degenerate after cleanup");
    t_ = std::move(t);
    v_ = std::move(v);
}

double Polyline::operator()(double tau) const {
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw std::domain_error("polyline quantile: tau must lie in (0, 1]");
    }
    // First index with level >= tau. Because t_.front() == 0 < tau this is
    // never 0, and because t_.back() == 1 it always exists.
    const auto it = std::lower_bound(t_.begin(), t_.end(), tau);
    const std::size_t j = static_cast<std::size_t>(it - t_.begin());
    if (t_[j] == tau) return v_[j]; // exact hit: lower branch of any jump
    const double t0 = t_[j - 1], t1 = t_[j];
    const double v0 = v_[j - 1], v1 = v_[j];
    return v0 + (tau - t0) / (t1 - t0) * (v1 - v0);
}

double Polyline::upper_inverse(double tau) const {
    if (!(tau >= 0.0 && tau < 1.0)) {
        throw std::domain_error("polyline upper inverse: tau must lie in [0, 1)");
    }
    // First index with level strictly greater than tau; the limit from
    // above lives on the segment starting there.
    const auto it = std::upper_bound(t_.begin(), t_.end(), tau);
    const std::size_t j = static_cast<std::size_t>(it - t_.begin());
    const double t0 = t_[j - 1], t1 = t_[j];
    if (t0 == tau) return v_[j - 1]; // top branch: j-1 is the last index at tau
    const double v0 = v_[j - 1], v1 = v_[j];
    return v0 + (tau - t0) / (t1 - t0) * (v1 - v0);
}

double Polyline::cdf(double x) const {
    if (x >= v_.back()) return 1.0;
    if (x < v_.front()) return 0.0;
    // Last index with value <= x gives the top of any atom at x.
    const auto it = std::upper_bound(v_.begin(), v_.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - v_.begin());
    const double v0 = v_[j - 1], v1 = v_[j];
    if (v0 == x) return t_[j - 1];
    return t_[j - 1] + (x - v0) / (v1 - v0) * (t_[j] - t_[j - 1]);
}

double Polyline::cdf_left(double x) const {
    if (x > v_.back()) return 1.0;
    if (x <= v_.front()) return 0.0;
    // First index with value >= x gives the bottom of any atom at x.
    const auto it = std::lower_bound(v_.begin(), v_.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - v_.begin());
    if (v_[j] == x) return t_[j];
    const double v0 = v_[j - 1], v1 = v_[j];
    return t_[j - 1] + (x - v0) / (v1 - v0) * (t_[j] - t_[j - 1]);
}

Polyline Polyline::reflected() const {
    std::vector<double> t(t_.size()), v(v_.size());
    for (std::size_t i = 0; i < t_.size(); ++i) {
        t[i] = 1.0 - t_[t_.size() - 1 - i];
        v[i] = -v_[v_.size() - 1 - i];
    }
    return Polyline(std::move(t), std::move(v));
}

bool Polyline::has_jump() const {
    for (std::size_t i = 1; i < t_.size(); ++i) {
        if (t_[i] == t_[i - 1] && v_[i] > v_[i - 1]) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Mixture / Distribution construction
// ---------------------------------------------------------------------------

bool Mixture::operator==(const Mixture& other) const {
    return components == other.components;
}

namespace {

bool contains_normal(const Distribution& d);

bool contains_normal_mix(const Mixture& m) {
    return std::any_of(m.components.begin(), m.components.end(),
                       [](const auto& c) { return contains_normal(c.second); });
}

bool contains_normal(const Distribution& d) {
    return std::visit(
        [](const auto& v) -> bool {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>) return true;
            else if constexpr (std::is_same_v<T, Mixture>) return contains_normal_mix(v);
            else return false;
        },
        d.value());
}

void validate_mixture(const Mixture& m) {
    require(!m.components.empty(), "mixture: needs at least one component");
    double sum = 0.0;
    for (const auto& [w, c] : m.components) {
        (void)c;
        require(std::isfinite(w) && w > 0.0 && w <= 1.0,
                "mixture: weights must lie in (0, 1]");
        sum += w;
    }
    require(std::fabs(sum - 1.0) <= 1e-9, "mixture: weights must sum to 1");
}

// Extreme x-breakpoints of every piecewise component, used both for the
// exact composition and as the bisection bracket.
double mix_lo_bracket(const Mixture& m);
double mix_hi_bracket(const Mixture& m);

double dist_lo_bracket(const Distribution& d) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>)
                return v.mu + v.sigma * normal_quantile(1e-15);
            else if constexpr (std::is_same_v<T, Uniform>)
                return v.a;
            else if constexpr (std::is_same_v<T, Polyline>)
                return v.min_value();
            else
                return mix_lo_bracket(v);
        },
        d.value());
}

double dist_hi_bracket(const Distribution& d) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>)
                return v.mu + v.sigma * normal_quantile(1.0 - 1e-15);
            else if constexpr (std::is_same_v<T, Uniform>)
                return v.b;
            else if constexpr (std::is_same_v<T, Polyline>)
                return v.max_value();
            else
                return mix_hi_bracket(v);
        },
        d.value());
}

double mix_lo_bracket(const Mixture& m) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& [w, c] : m.components) {
        (void)w;
        lo = std::min(lo, dist_lo_bracket(c));
    }
    return lo;
}

double mix_hi_bracket(const Mixture& m) {
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [w, c] : m.components) {
        (void)w;
        hi = std::max(hi, dist_hi_bracket(c));
    }
    return hi;
}

double mixture_cdf(const Mixture& m, double x) {
    double s = 0.0;
    for (const auto& [w, c] : m.components) s += w * cdf(c, x);
    return s;
}

double mixture_cdf_left(const Mixture& m, double x) {
    double s = 0.0;
    for (const auto& [w, c] : m.components) {
        s += w * std::visit(
                     [x](const auto& v) -> double {
                         using T = std::decay_t<decltype(v)>;
                         if constexpr (std::is_same_v<T, Polyline>)
                             return v.cdf_left(x);
                         else if constexpr (std::is_same_v<T, Mixture>)
                             return mixture_cdf_left(v, x);
                         else
                             return cdf(Distribution(v), x); // continuous CDF
                     },
                     c.value());
    }
    return s;
}

// Exact composition of an all-piecewise mixture into one polyline: the
// mixture CDF is piecewise linear with kinks only at the union of the
// component value-breakpoints, so sampling (cdf_left(x), x) and (cdf(x), x)
// at every such x reproduces it without error. Atoms arrive as CDF jumps
// (the two sampled levels differ) and support gaps as repeated levels.
Polyline compose_mixture(const Mixture& m) {
    std::vector<double> xs;
    for (const auto& [w, c] : m.components) {
        (void)w;
        std::visit(
            [&xs](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Uniform>) {
                    xs.push_back(v.a);
                    xs.push_back(v.b);
                } else if constexpr (std::is_same_v<T, Polyline>) {
                    xs.insert(xs.end(), v.values().begin(), v.values().end());
                }
            },
            c.value());
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> t, v;
    t.reserve(2 * xs.size());
    v.reserve(2 * xs.size());
    for (double x : xs) {
        const double a = mixture_cdf_left(m, x);
        const double b = mixture_cdf(m, x);
        t.push_back(a);
        v.push_back(x);
        if (b != a) {
            t.push_back(b);
            v.push_back(x);
        }
    }
    // Weight roundoff can leave the outermost levels a few ulp away from
    // their exact values; snap them so the polyline invariant holds.
    t.front() = 0.0;
    t.back() = 1.0;
    for (double& level : t) level = std::clamp(level, 0.0, 1.0);
    return Polyline(std::move(t), std::move(v));
}

} // namespace

Distribution::Distribution(Normal n) : v_(n) {
    require(std::isfinite(n.mu), "normal: mu must be finite");
    require(std::isfinite(n.sigma) && n.sigma > 0.0, "normal: sigma must be positive");
}

Distribution::Distribution(Uniform u) : v_(u) {
    require(std::isfinite(u.a) && std::isfinite(u.b), "uniform: bounds must be finite");
    require(u.a < u.b, "uniform: requires a < b");
}

Distribution::Distribution(Polyline p) : v_(std::move(p)) {}

Distribution::Distribution(Mixture m) : v_(Normal{0.0, 1.0}) {
    validate_mixture(m);
    if (m.components.size() == 1) {
        v_ = m.components.front().second.v_;
        return;
    }
    if (contains_normal_mix(m)) {
        v_ = std::move(m);
    } else {
        v_ = compose_mixture(m);
    }
}

Distribution Distribution::piecewise_quantile(std::vector<double> levels,
                                              std::vector<double> values,
                                              Interp mode) {
    require(levels.size() == values.size(),
            "piecewise quantile: levels and values differ in length");
    require(!levels.empty(), "piecewise quantile: empty table");
    require(all_finite(values), "piecewise quantile: values must be finite");
    require(is_sorted_nondecreasing(levels) && levels.front() >= 0.0 &&
                levels.back() <= 1.0,
            "piecewise quantile: levels must be sorted within [0, 1]");
    require(is_sorted_nondecreasing(values),
            "piecewise quantile: values must be nondecreasing");
    if (mode == Interp::linear) {
        require(levels.front() == 0.0 && levels.back() == 1.0,
                "piecewise quantile: linear mode needs levels from 0 to 1");
        return Distribution(Polyline(std::move(levels), std::move(values)));
    }
    // Step mode: the value at the first level >= tau. Each (t_k, v_k) row
    // becomes a flat at v_k from the previous level up to t_k.
    require(levels.back() == 1.0, "piecewise quantile: step mode needs final level 1");
    std::vector<double> t, v;
    t.reserve(2 * levels.size());
    v.reserve(2 * levels.size());
    double prev = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        t.push_back(prev);
        v.push_back(values[k]);
        t.push_back(levels[k]);
        v.push_back(values[k]);
        prev = levels[k];
    }
    return Distribution(Polyline(std::move(t), std::move(v)));
}

Distribution Distribution::empirical(std::vector<double> samples) {
    require(!samples.empty(), "empirical: needs at least one sample");
    require(all_finite(samples), "empirical: samples must be finite");
    std::sort(samples.begin(), samples.end());
    const auto n = samples.size();
    std::vector<double> levels(n);
    for (std::size_t k = 0; k < n; ++k) {
        levels[k] = static_cast<double>(k + 1) / static_cast<double>(n);
    }
    levels.back() = 1.0;
    return piecewise_quantile(std::move(levels), std::move(samples), Interp::step);
}

Distribution Distribution::histogram(std::vector<double> edges,
                                     std::vector<double> probs) {
    require(edges.size() == probs.size() + 1, "histogram: need one more edge than bins");
    require(edges.size() >= 2, "histogram: need at least one bin");
    require(all_finite(edges), "histogram: edges must be finite");
    require(is_sorted_nondecreasing(edges), "histogram: edges must be sorted");
    double sum = 0.0;
    for (double p : probs) {
        require(std::isfinite(p) && p >= 0.0, "histogram: probabilities must be >= 0");
        sum += p;
    }
    require(std::fabs(sum - 1.0) <= 1e-9, "histogram: probabilities must sum to 1");

    std::vector<double> t, v;
    t.reserve(edges.size());
    v.reserve(edges.size());
    double c = 0.0;
    t.push_back(0.0);
    v.push_back(edges.front());
    for (std::size_t k = 0; k < probs.size(); ++k) {
        c += probs[k];
        t.push_back(c);
        v.push_back(edges[k + 1]);
    }
    t.back() = 1.0;
    for (double& level : t) level = std::clamp(level, 0.0, 1.0);
    return Distribution(Polyline(std::move(t), std::move(v)));
}

// ---------------------------------------------------------------------------
// Distribution operations
// ---------------------------------------------------------------------------

namespace {

double mixture_quantile(const Mixture& m, double tau) {
    double lo = mix_lo_bracket(m);
    double hi = mix_hi_bracket(m);
    // Left inverse by bisection: shrink toward the smallest x with
    // F(x) >= tau. The bracket always contains it because the component
    // extreme quantiles bound the mixture support at the 1e-15 level.
    for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mixture_cdf(m, mid) >= tau) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

} // namespace

double quantile(const Distribution& d, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw std::domain_error("quantile: tau must lie strictly between 0 and 1");
    }
    return std::visit(
        [tau](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>)
                return v.mu + v.sigma * normal_quantile(tau);
            else if constexpr (std::is_same_v<T, Uniform>)
                return v.a + (v.b - v.a) * tau;
            else if constexpr (std::is_same_v<T, Polyline>)
                return v(tau);
            else
                return mixture_quantile(v, tau);
        },
        d.value());
}

double cdf(const Distribution& d, double x) {
    return std::visit(
        [x](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>)
                return normal_cdf((x - v.mu) / v.sigma);
            else if constexpr (std::is_same_v<T, Uniform>)
                return std::clamp((x - v.a) / (v.b - v.a), 0.0, 1.0);
            else if constexpr (std::is_same_v<T, Polyline>)
                return v.cdf(x);
            else
                return mixture_cdf(v, x);
        },
        d.value());
}

std::optional<std::pair<double, double>> bounded_support(const Distribution& d) {
    return std::visit(
        [](const auto& v) -> std::optional<std::pair<double, double>> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>)
                return std::nullopt;
            else if constexpr (std::is_same_v<T, Uniform>)
                return std::pair{v.a, v.b};
            else if constexpr (std::is_same_v<T, Polyline>)
                return std::pair{v.min_value(), v.max_value()};
            else
                return std::nullopt; // surviving mixtures contain a Normal
        },
        d.value());
}

CentralInterval central_interval(const Distribution& d, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::domain_error("central_interval: alpha must lie in [0, 1]");
    }
    if (alpha == 1.0) {
        const auto hull = bounded_support(d);
        if (!hull) {
            throw std::domain_error(
                "central_interval: alpha = 1 needs a bounded support");
        }
        return CentralInterval{1.0, hull->first, hull->second};
    }
    const double lo = quantile(d, (1.0 - alpha) / 2.0);
    const double hi = quantile(d, (1.0 + alpha) / 2.0);
    return CentralInterval{alpha, lo, hi};
}

double central_median(const Distribution& d) {
    return std::visit(
        [&d](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>)
                return v.mu;
            else if constexpr (std::is_same_v<T, Uniform>)
                return 0.5 * (v.a + v.b);
            else if constexpr (std::is_same_v<T, Polyline>)
                return 0.5 * (v(0.5) + v.upper_inverse(0.5));
            else
                // A mixture that kept its Mixture form contains a Normal,
                // so its CDF increases strictly and the median is unique.
                return quantile(d, 0.5);
        },
        d.value());
}

bool is_symmetric(const Distribution& d, int grid_n, double tol) {
    if (grid_n < 2) throw std::domain_error("is_symmetric: grid_n must be >= 2");
    if (std::holds_alternative<Normal>(d.value()) ||
        std::holds_alternative<Uniform>(d.value())) {
        return true;
    }
    const double m = central_median(d);
    for (int i = 0; i < grid_n; ++i) {
        const double g = (i + 0.5) / grid_n;
        if (std::fabs(quantile(d, g) + quantile(d, 1.0 - g) - 2.0 * m) > tol) {
            return false;
        }
    }
    return true;
}

std::optional<Polyline> to_polyline(const Distribution& d) {
    return std::visit(
        [](const auto& v) -> std::optional<Polyline> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>)
                return Polyline({0.0, 1.0}, {v.a, v.b});
            else if constexpr (std::is_same_v<T, Polyline>)
                return v;
            else
                return std::nullopt;
        },
        d.value());
}

bool has_quantile_jump(const Distribution& d) {
    if (const auto* p = std::get_if<Polyline>(&d.value())) return p->has_jump();
    return false;
}

} // namespace qdd
