#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace seqscreen {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Interval on the extended real line. Either end may be infinite.
struct Interval {
    double lower = 0.0;
    double upper = 1.0;

    bool lower_finite() const noexcept;
    bool upper_finite() const noexcept;
    bool bounded() const noexcept { return lower_finite() && upper_finite(); }
    double width() const noexcept { return upper - lower; }
    bool contains(double x) const noexcept { return x >= lower && x <= upper; }
    bool contains_open(double x) const noexcept { return x > lower && x < upper; }
    std::string describe() const;
};

/// Throws ArgumentError unless lower < upper.
Interval make_interval(double lower, double upper);

using RealFunction = std::function<double(double)>;

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subintervals = 0;
};

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_floor = 1e-13;
    int max_depth = 48;
    int max_subintervals = 4000;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature with global error control.
///
/// Infinite ends are removed by a smooth substitution before subdivision:
/// two-sided domains use x = c + t/(1-t^2) on (-1,1); one-sided domains use
/// x = a + t/(1-t) (resp. b - t/(1-t)) on [0,1). Throws QuadratureError
/// with the partial value when the error target is not met within the
/// depth and subinterval caps.
QuadratureResult integrate(const RealFunction& f, Interval domain, const QuadratureOptions& options);
QuadratureResult integrate(const RealFunction& f, Interval domain, double rel_tol);

/// Step rule for central differences: h = max(abs_min, rel * |x|).
struct StepPolicy {
    double rel = 1e-5;
    double abs_min = 1e-5;

    double step(double x) const noexcept;
};

struct DerivativeEstimate {
    double value = 0.0;
    double error_estimate = 0.0;
    /// Set when the stencil looks non-smooth (kink) or produced non-finite values.
    bool flagged = false;
};

/// Five-point stencil {x+h, x-h, x+h/2, x-h/2, x} used by differentiate().
struct Stencil {
    double center = 0.0;
    double step = 0.0;
    std::array<double, 5> points{};
};

Stencil make_stencil(double x, const StepPolicy& policy);

/// Richardson-refined central difference from values at the stencil points.
DerivativeEstimate combine_stencil(const Stencil& stencil, const std::array<double, 5>& values);

/// Central difference with one Richardson refinement. Evaluation failures
/// inside the stencil are rethrown as DomainError naming the stencil point.
DerivativeEstimate differentiate(const RealFunction& f, double x, const StepPolicy& policy = {});

enum class Direction { Increasing, Decreasing };

std::string to_string(Direction d);

struct MonotonePair {
    std::size_t index = 0;  // left sample of the adjacent pair
    double x0 = 0.0;
    double x1 = 0.0;
    double y0 = 0.0;
    double y1 = 0.0;
    double magnitude = 0.0;
};

struct MonotoneVerdict {
    Direction direction = Direction::Increasing;
    bool pass = true;
    double worst_violation = 0.0;
    /// Worst offending adjacent pair; meaningful only when worst_violation > 0.
    MonotonePair witness;
    /// Every adjacent pair whose violation exceeds the slack, in sample order.
    std::vector<MonotonePair> violations;
};

/// Weak monotonicity scan: passes iff no adjacent pair moves against
/// `direction` by more than `slack`. Abscissae must be strictly increasing.
MonotoneVerdict monotone_scan(std::span<const double> xs, std::span<const double> values, Direction direction,
                              double slack);

/// Largest x in [lo, hi] with g(x) <= target for nondecreasing g, found by
/// bisection until the bracket cannot shrink further.
double bisect_nondecreasing(const RealFunction& g, double target, double lo, double hi, int max_iter = 200);

/// n equally spaced points strictly inside [lo, hi], keeping `margin` away
/// from each end. n == 1 yields the midpoint.
std::vector<double> interior_lattice(double lo, double hi, std::size_t n, double margin);

/// Runs body(i) for i in [0, n) on a small thread pool. Each index is
/// visited exactly once; callers write into preallocated slots so results
/// do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace seqscreen
