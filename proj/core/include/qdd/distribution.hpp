// One-dimensional probability distributions represented through their
// generalized quantile functions. The model is deliberately small: normals,
// uniforms, finite mixtures, and piecewise-linear quantile polylines. Every
// piecewise family (empirical samples, histograms, step or linear quantile
// tables, mixtures of any of those) canonicalizes to a single Polyline at
// construction time, so downstream integrators see exactly two cases: an
// evaluable smooth quantile, or an explicit polyline with known breakpoints.

#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace qdd {

/// Normal distribution with mean mu and standard deviation sigma > 0.
struct Normal {
    double mu;
    double sigma;
    bool operator==(const Normal&) const = default;
};

/// Continuous uniform distribution on (a, b), a < b.
struct Uniform {
    double a;
    double b;
    bool operator==(const Uniform&) const = default;
};

/// Canonical piecewise-linear quantile function.
///
/// Stored as level/value point pairs with levels[0] = 0, levels.back() = 1,
/// both sequences nondecreasing. Linear interpolation between points; a
/// repeated level with two distinct values is a jump (a gap in the support),
/// a repeated value across distinct levels is a flat (an atom). Evaluation
/// is the left-continuous generalized inverse: at a jump level the lower
/// branch value is returned.
class Polyline {
public:
    /// Validates and canonicalizes the point list (drops exact duplicates,
    /// collapses runs of three or more collinear jump points). Throws
    /// std::invalid_argument on non-monotone or out-of-range input.
    Polyline(std::vector<double> levels, std::vector<double> values);

    /// Left-continuous quantile at tau in (0,1]; tau = 1 gives the top of
    /// the support. Throws std::domain_error outside (0,1].
    double operator()(double tau) const;

    /// Right-continuous companion inf{x : F(x) > tau}; differs from
    /// operator() only at jump levels, where it returns the upper branch.
    double upper_inverse(double tau) const;

    /// CDF (right-continuous) and its left limit at x.
    double cdf(double x) const;
    double cdf_left(double x) const;

    /// Point reflection through the origin: the quantile of -X.
    Polyline reflected() const;

    /// True when some repeated level carries two distinct values, i.e. the
    /// quantile function itself has a discontinuity.
    bool has_jump() const;

    const std::vector<double>& levels() const { return t_; }
    const std::vector<double>& values() const { return v_; }
    double min_value() const { return v_.front(); }
    double max_value() const { return v_.back(); }

    bool operator==(const Polyline&) const = default;

private:
    std::vector<double> t_;
    std::vector<double> v_;
};

class Distribution;

/// Finite mixture component list. Weights must be in (0,1] and sum to 1
/// (within 1e-9). Only mixtures that contain at least one Normal survive as
/// Mixture values; all-piecewise mixtures are composed into one Polyline
/// when the Distribution is constructed.
struct Mixture {
    std::vector<std::pair<double, Distribution>> components;
    bool operator==(const Mixture&) const;
};

/// Interval spanned by the (1-alpha)/2 and (1+alpha)/2 quantiles.
struct CentralInterval {
    double alpha;
    double lo;
    double hi;
};

/// Immutable distribution value. All operations are pure and safe to call
/// concurrently from many threads.
class Distribution {
public:
    Distribution(Normal n);
    Distribution(Uniform u);
    Distribution(Polyline p);
    Distribution(Mixture m);

    /// Piecewise quantile table. mode "linear" interpolates between the
    /// given (level, value) points and requires levels to start at 0 and
    /// end at 1; mode "step" treats values as a left-continuous step
    /// function (the value at the first level >= tau) and requires the
    /// final level to be 1.
    enum class Interp { linear, step };
    static Distribution piecewise_quantile(std::vector<double> levels,
                                           std::vector<double> values,
                                           Interp mode);

    /// Empirical distribution of the given samples, each with mass 1/n.
    /// The samples are sorted internally; duplicates are allowed.
    static Distribution empirical(std::vector<double> samples);

    /// Histogram with finite edges: probability probs[i] spread uniformly
    /// over [edges[i], edges[i+1]]. Open-ended survey histograms go through
    /// histogram_pair_to_distributions in io.hpp instead, which applies the
    /// conservative pairwise truncation rule before landing here.
    static Distribution histogram(std::vector<double> edges,
                                  std::vector<double> probs);

    using Value = std::variant<Normal, Uniform, Polyline, Mixture>;
    const Value& value() const { return v_; }

    bool operator==(const Distribution&) const = default;

private:
    Value v_;
};

/// Left-continuous generalized quantile at tau in (0,1).
/// Normals evaluate through the AS 241 inverse CDF; mixtures invert their
/// weighted CDF by bisection to an absolute x-tolerance of 1e-12.
double quantile(const Distribution& d, double tau);

/// CDF at x (right-continuous).
double cdf(const Distribution& d, double x);

/// Central interval at coverage alpha in [0,1]. alpha = 1 is allowed only
/// for bounded supports and returns the support hull; unbounded supports
/// throw std::domain_error at alpha = 1.
CentralInterval central_interval(const Distribution& d, double alpha);

/// Midpoint of the median interval; equals quantile(0.5) whenever the
/// median is unique. Flat median intervals (support gaps straddling level
/// one-half) resolve to the midpoint of the gap.
double central_median(const Distribution& d);

/// Symmetry test: |quantile(g) + quantile(1-g) - 2m| <= tol at grid_n
/// midpoint levels g, with m the central median. Normal and Uniform short-
/// circuit to true structurally.
bool is_symmetric(const Distribution& d, int grid_n = 512, double tol = 1e-9);

/// Support hull [lowest, highest] when both ends are finite.
std::optional<std::pair<double, double>> bounded_support(const Distribution& d);

/// The quantile of d as an explicit polyline, when it is piecewise linear:
/// Polyline values copy out, uniforms become two-point lines, and anything
/// involving a Normal returns nullopt.
std::optional<Polyline> to_polyline(const Distribution& d);

/// True when the quantile function of d is discontinuous (some support gap
/// exists). Atoms alone do not count: they flatten the quantile but keep it
/// continuous.
bool has_quantile_jump(const Distribution& d);

} // namespace qdd
