#pragma once

#include "seqscreen/numerics.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace seqscreen {

/// Interior evaluation lattice shared by every checker.
struct GridSpec {
    std::size_t v_points = 129;
    std::size_t V_points = 129;
    /// Fraction of a finite support's width excluded at each end.
    double endpoint_margin = 1e-4;
    /// Probability mass dropped from each infinite tail of the value support.
    double tail_mass_cut = 1e-9;

    void validate() const;
};

struct ToleranceConfig {
    /// Absolute slack for weak monotonicity on the grid.
    double monotonicity_slack = 1e-8;
    /// Relative tolerance handed to adaptive quadrature.
    double quadrature_rel = 1e-10;
    StepPolicy derivative_step{};

    void validate() const;
};

struct SignalValues {
    double cdf = 0.0;
    double pdf = 0.0;
    /// 1 - F, evaluated without cancellation where the family allows it.
    double survival = 1.0;
};

/// Distribution F of the first-stage signal on a (possibly relabeled) support.
class SignalDistribution {
public:
    virtual ~SignalDistribution() = default;

    virtual std::string family() const = 0;
    virtual Interval support() const = 0;
    /// Unchecked evaluation; callers guarantee v lies in support().
    virtual SignalValues eval(double v) const = 0;
    /// Interior signal lattice for a grid spec.
    virtual std::vector<double> grid(const GridSpec& spec) const;
};

class ValuationKernel;

struct KernelValues {
    double H = 0.0;
    double h = 0.0;
    double dHdv = 0.0;
};

/// H_v, h_v and dH_v/dv at one resolved signal value. Relabeled kernels
/// resolve their signal index once and hand back a section of the base
/// kernel with the rate rescaled, so sweeping V costs no extra inversions.
class KernelSection {
public:
    KernelSection(const ValuationKernel* base, double base_signal, double rate_scale = 1.0)
        : base_(base), v_(base_signal), rate_scale_(rate_scale) {}

    double cdf(double V) const;
    double pdf(double V) const;
    double rate(double V) const;
    KernelValues eval(double V) const;

    double base_signal() const noexcept { return v_; }
    double rate_scale() const noexcept { return rate_scale_; }
    const ValuationKernel& base() const noexcept { return *base_; }

private:
    const ValuationKernel* base_;
    double v_;
    double rate_scale_;
};

/// Conditional valuation family H_v(V) with density h_v(V).
class ValuationKernel {
public:
    explicit ValuationKernel(StepPolicy step = {}) : step_(step) {}
    virtual ~ValuationKernel() = default;

    virtual std::string family() const = 0;
    /// Open value support (V_lo, V_hi); ends may be infinite.
    virtual Interval support() const = 0;
    virtual double cdf(double v, double V) const = 0;
    virtual double pdf(double v, double V) const = 0;
    /// dH_v(V)/dv. Falls back to a Richardson central difference in v.
    virtual double rate(double v, double V) const;
    virtual bool analytic_rate() const { return false; }
    virtual KernelSection section(double v) const { return KernelSection(this, v); }
    /// Declared dominating bound b(V) >= |dH_v(V)/dv|, if the family has one.
    virtual std::optional<double> tail_bound(double V) const;
    /// True for V = v + noise kernels with mean-zero noise independent of v.
    virtual bool additive_noise() const { return false; }
    /// Throws ArgumentError if the kernel is undefined somewhere on the signal support.
    virtual void check_signal_support(Interval signal_support) const;

    const StepPolicy& step_policy() const noexcept { return step_; }

private:
    StepPolicy step_;
};

/// A signal distribution paired with a conditional valuation kernel.
class ScreeningModel {
public:
    ScreeningModel(std::shared_ptr<const SignalDistribution> signal, std::shared_ptr<const ValuationKernel> kernel);

    const SignalDistribution& signal() const noexcept { return *signal_; }
    const ValuationKernel& kernel() const noexcept { return *kernel_; }
    const std::shared_ptr<const SignalDistribution>& signal_ptr() const noexcept { return signal_; }
    const std::shared_ptr<const ValuationKernel>& kernel_ptr() const noexcept { return kernel_; }

private:
    std::shared_ptr<const SignalDistribution> signal_;
    std::shared_ptr<const ValuationKernel> kernel_;
};

struct KernelEval {
    double H = 0.0;
    double h = 0.0;
    double dHdv = 0.0;
    /// dHdv >= 0 at an interior point: the strict FOSD standing assumption fails here.
    bool fosd_violation = false;
};

/// F(v), f(v). Throws DomainError for v outside the signal support.
SignalValues eval_signal(const ScreeningModel& model, double v);

/// H_v(V), h_v(V), dH_v(V)/dv. V must be interior to the value support.
KernelEval eval_kernel(const ScreeningModel& model, double v, double V);

/// Value range actually integrated/scanned: finite ends kept, infinite ends
/// cut at the tail_mass_cut quantile of H_v.
Interval integration_window(const KernelSection& section, Interval support, double tail_mass_cut);

struct MeanEstimate {
    double value = 0.0;
    double error_estimate = 0.0;
    Interval window;
};

/// mu(v) = E[V | v] via the layer-cake identity around an origin inside the window.
MeanEstimate conditional_mean(const ScreeningModel& model, double v, const ToleranceConfig& tol,
                              double tail_mass_cut = 1e-9);

/// mu(v) = integral of V h_v(V) dV, the direct route used as an oracle.
MeanEstimate conditional_mean_direct(const ScreeningModel& model, double v, const ToleranceConfig& tol,
                                     double tail_mass_cut = 1e-9);

/// mu'(v) = -integral of dH_v(V)/dv over the value support.
MeanEstimate conditional_mean_derivative(const ScreeningModel& model, double v, const ToleranceConfig& tol,
                                         double tail_mass_cut = 1e-9);

/// Integral of h_v over the (truncated) value support.
double density_mass(const ScreeningModel& model, double v, const ToleranceConfig& tol, double tail_mass_cut = 1e-9);

/// Signal lattice of the model under `grid`.
std::vector<double> signal_grid(const ScreeningModel& model, const GridSpec& grid);

/// Value lattice common to all signal rows. Infinite sides are cut at the
/// tail quantiles of the extreme grid signals.
struct ValueGrid {
    std::vector<double> points;
    Interval range;
    bool truncated_lower = false;
    bool truncated_upper = false;
};
ValueGrid value_grid(const ScreeningModel& model, const GridSpec& grid);

/// Structural sanity checks (F endpoints, F vs integrated f, h normalization,
/// H monotone in V). Throws ArgumentError describing the first failure.
void validate_model(const ScreeningModel& model, const GridSpec& grid, const ToleranceConfig& tol);

}  // namespace seqscreen
