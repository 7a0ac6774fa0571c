#include "seqscreen/model.hpp"

#include "seqscreen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace seqscreen {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

}  // namespace

void GridSpec::validate() const {
    if (v_points < 2 || V_points < 2) throw ArgumentError("grid needs at least 2 points per axis");
    if (!(endpoint_margin > 0.0 && endpoint_margin < 0.5))
        throw ArgumentError("endpoint_margin must lie in (0, 0.5), got " + fmt(endpoint_margin));
    if (!(tail_mass_cut > 0.0 && tail_mass_cut <= 1e-3))
        throw ArgumentError("tail_mass_cut must lie in (0, 1e-3], got " + fmt(tail_mass_cut));
}

void ToleranceConfig::validate() const {
    if (!(monotonicity_slack > 0.0)) throw ArgumentError("monotonicity slack must be positive");
    if (!(quadrature_rel > 0.0)) throw ArgumentError("quadrature_rel must be positive");
    if (!(derivative_step.rel > 0.0 && derivative_step.abs_min > 0.0))
        throw ArgumentError("derivative step policy must be positive");
}

std::vector<double> SignalDistribution::grid(const GridSpec& spec) const {
    const Interval s = support();
    if (!s.bounded()) throw ArgumentError(family() + " signal: default grid needs a bounded support");
    return interior_lattice(s.lower, s.upper, spec.v_points, spec.endpoint_margin * s.width());
}

// ---------------------------------------------------------------------------

double KernelSection::cdf(double V) const { return base_->cdf(v_, V); }
double KernelSection::pdf(double V) const { return base_->pdf(v_, V); }
double KernelSection::rate(double V) const { return rate_scale_ * base_->rate(v_, V); }
KernelValues KernelSection::eval(double V) const { return {cdf(V), pdf(V), rate(V)}; }

double ValuationKernel::rate(double v, double V) const {
    return differentiate([this, V](double x) { return cdf(x, V); }, v, step_).value;
}

std::optional<double> ValuationKernel::tail_bound(double /*V*/) const { return std::nullopt; }

void ValuationKernel::check_signal_support(Interval /*signal_support*/) const {}

ScreeningModel::ScreeningModel(std::shared_ptr<const SignalDistribution> signal,
                               std::shared_ptr<const ValuationKernel> kernel)
    : signal_(std::move(signal)), kernel_(std::move(kernel)) {
    if (!signal_ || !kernel_) throw ArgumentError("screening model needs both a signal and a kernel");
    kernel_->check_signal_support(signal_->support());
}

// ---------------------------------------------------------------------------

SignalValues eval_signal(const ScreeningModel& model, double v) {
    const Interval s = model.signal().support();
    if (!s.contains(v)) throw DomainError("signal value " + fmt(v) + " outside signal support " + s.describe());
    return model.signal().eval(v);
}

KernelEval eval_kernel(const ScreeningModel& model, double v, double V) {
    const Interval s = model.signal().support();
    if (!s.contains(v)) throw DomainError("signal value " + fmt(v) + " outside signal support " + s.describe());
    const Interval vs = model.kernel().support();
    if (!vs.contains_open(V)) throw DomainError("valuation " + fmt(V) + " not interior to value support " + vs.describe());
    const KernelValues k = model.kernel().section(v).eval(V);
    return KernelEval{k.H, k.h, k.dHdv, !(k.dHdv < 0.0)};
}

Interval integration_window(const KernelSection& section, Interval support, double tail_mass_cut) {
    Interval w = support;
    if (support.bounded()) return w;
    constexpr int kMaxExpand = 2000;
    auto cdf = [&section](double V) { return section.cdf(V); };

    // A point with H strictly between the cuts anchors the bracket search.
    double anchor = support.lower_finite() ? support.lower + 1.0 : (support.upper_finite() ? support.upper - 1.0 : 0.0);
    {
        double step = 1.0;
        int it = 0;
        while (cdf(anchor) <= tail_mass_cut && it++ < kMaxExpand) {
            anchor += step;
            step *= 2.0;
        }
        it = 0;
        step = 1.0;
        while (cdf(anchor) >= 1.0 - tail_mass_cut && it++ < kMaxExpand) {
            anchor -= step;
            step *= 2.0;
        }
        if (!(cdf(anchor) > tail_mass_cut && cdf(anchor) < 1.0 - tail_mass_cut))
            throw IntegrabilityError("could not bracket the tail quantiles of the valuation kernel");
    }
    if (!support.lower_finite()) {
        double lo = anchor - 1.0;
        double step = 2.0;
        int it = 0;
        while (cdf(lo) > tail_mass_cut) {
            if (++it > kMaxExpand || !std::isfinite(lo))
                throw IntegrabilityError("H_v does not approach 0 at the lower end of the value support");
            lo -= step;
            step *= 2.0;
        }
        w.lower = bisect_nondecreasing(cdf, tail_mass_cut, lo, anchor);
    }
    if (!support.upper_finite()) {
        double hi = anchor + 1.0;
        double step = 2.0;
        int it = 0;
        while (cdf(hi) < 1.0 - tail_mass_cut) {
            if (++it > kMaxExpand || !std::isfinite(hi))
                throw IntegrabilityError("H_v does not approach 1 at the upper end of the value support");
            hi += step;
            step *= 2.0;
        }
        w.upper = bisect_nondecreasing(cdf, 1.0 - tail_mass_cut, anchor, hi);
    }
    return w;
}

namespace {

void check_signal_arg(const ScreeningModel& model, double v) {
    const Interval s = model.signal().support();
    if (!s.contains(v)) throw DomainError("signal value " + fmt(v) + " outside signal support " + s.describe());
}

QuadratureResult integrate_or_diverge(const RealFunction& f, Interval d, double rel, const char* what) {
    try {
        return integrate(f, d, rel);
    } catch (const QuadratureError& e) {
        throw IntegrabilityError(std::string(what) + ": integral failed to converge on " + d.describe() + " (" +
                                 e.what() + ")");
    }
}

}  // namespace

MeanEstimate conditional_mean(const ScreeningModel& model, double v, const ToleranceConfig& tol,
                              double tail_mass_cut) {
    check_signal_arg(model, v);
    const KernelSection sec = model.kernel().section(v);
    const Interval win = integration_window(sec, model.kernel().support(), tail_mass_cut);
    // Layer cake around an origin c inside the window:
    // mu = c + int_c^U (1 - H) - int_L^c H.
    const double c = win.contains_open(0.0) ? 0.0 : 0.5 * (win.lower + win.upper);
    const auto upper = integrate_or_diverge([&sec](double x) { return 1.0 - sec.cdf(x); }, Interval{c, win.upper},
                                            tol.quadrature_rel, "conditional mean (upper layer)");
    const auto lower = integrate_or_diverge([&sec](double x) { return sec.cdf(x); }, Interval{win.lower, c},
                                            tol.quadrature_rel, "conditional mean (lower layer)");
    return MeanEstimate{c + upper.value - lower.value, upper.error_estimate + lower.error_estimate, win};
}

MeanEstimate conditional_mean_direct(const ScreeningModel& model, double v, const ToleranceConfig& tol,
                                     double tail_mass_cut) {
    check_signal_arg(model, v);
    const KernelSection sec = model.kernel().section(v);
    const Interval win = integration_window(sec, model.kernel().support(), tail_mass_cut);
    const auto r = integrate_or_diverge([&sec](double x) { return x * sec.pdf(x); }, win, tol.quadrature_rel,
                                        "conditional mean (direct)");
    return MeanEstimate{r.value, r.error_estimate, win};
}

MeanEstimate conditional_mean_derivative(const ScreeningModel& model, double v, const ToleranceConfig& tol,
                                         double tail_mass_cut) {
    check_signal_arg(model, v);
    const KernelSection sec = model.kernel().section(v);
    const Interval win = integration_window(sec, model.kernel().support(), tail_mass_cut);
    const auto r = integrate_or_diverge([&sec](double x) { return -sec.rate(x); }, win, tol.quadrature_rel,
                                        "conditional mean derivative");
    return MeanEstimate{r.value, r.error_estimate, win};
}

double density_mass(const ScreeningModel& model, double v, const ToleranceConfig& tol, double tail_mass_cut) {
    check_signal_arg(model, v);
    const KernelSection sec = model.kernel().section(v);
    const Interval win = integration_window(sec, model.kernel().support(), tail_mass_cut);
    return integrate_or_diverge([&sec](double x) { return sec.pdf(x); }, win, tol.quadrature_rel, "density mass")
        .value;
}

std::vector<double> signal_grid(const ScreeningModel& model, const GridSpec& grid) {
    return model.signal().grid(grid);
}

ValueGrid value_grid(const ScreeningModel& model, const GridSpec& grid) {
    const Interval support = model.kernel().support();
    ValueGrid out;
    if (support.bounded()) {
        out.range = support;
        out.points = interior_lattice(support.lower, support.upper, grid.V_points, grid.endpoint_margin * support.width());
        return out;
    }
    const auto vs = signal_grid(model, grid);
    double lo = kInf;
    double hi = -kInf;
    for (double v : {vs.front(), vs.back()}) {
        const Interval w = integration_window(model.kernel().section(v), support, grid.tail_mass_cut);
        lo = std::min(lo, w.lower);
        hi = std::max(hi, w.upper);
    }
    out.truncated_lower = !support.lower_finite();
    out.truncated_upper = !support.upper_finite();
    const double margin = grid.endpoint_margin * (hi - lo);
    const double a = out.truncated_lower ? lo : lo + margin;
    const double b = out.truncated_upper ? hi : hi - margin;
    out.range = Interval{lo, hi};
    out.points = interior_lattice(a, b, grid.V_points, 0.0);
    return out;
}

void validate_model(const ScreeningModel& model, const GridSpec& grid, const ToleranceConfig& tol) {
    grid.validate();
    tol.validate();
    const auto& signal = model.signal();
    const Interval s = signal.support();
    const std::string tag = signal.family() + " signal";
    if (s.lower_finite() && s.upper_finite()) {
        const SignalValues lo = signal.eval(s.lower);
        const SignalValues hi = signal.eval(s.upper);
        if (std::abs(lo.cdf) > 1e-9) throw ArgumentError(tag + ": F at the lower support end is " + fmt(lo.cdf));
        if (std::abs(1.0 - hi.cdf) > 1e-9) throw ArgumentError(tag + ": F at the upper support end is " + fmt(hi.cdf));
    }
    const auto vs = signal_grid(model, grid);
    for (double v : vs) {
        const SignalValues sv = signal.eval(v);
        if (!(sv.pdf > 0.0) || !std::isfinite(sv.pdf))
            throw ArgumentError(tag + ": density not strictly positive at interior point v=" + fmt(v));
        if (!(sv.cdf >= 0.0 && sv.cdf <= 1.0)) throw ArgumentError(tag + ": F outside [0,1] at v=" + fmt(v));
    }
    for (std::size_t i = 0; i + 1 < vs.size(); ++i)
        if (signal.eval(vs[i + 1]).cdf < signal.eval(vs[i]).cdf - 1e-12)
            throw ArgumentError(tag + ": F decreases near v=" + fmt(vs[i]));
    // F against the integrated density, at a handful of grid points.
    if (s.bounded()) {
        for (std::size_t k = 1; k < 5; ++k) {
            const double v = vs[k * (vs.size() - 1) / 4];
            const double integral =
                integrate([&signal](double x) { return signal.eval(x).pdf; }, Interval{s.lower, v}, 1e-10).value;
            const double declared = signal.eval(v).cdf;
            if (std::abs(integral - declared) > 1e-6)
                throw ArgumentError(tag + ": F(" + fmt(v) + ")=" + fmt(declared) + " but integral of f gives " +
                                    fmt(integral));
        }
    }

    const std::string ktag = model.kernel().family() + " kernel";
    const auto Vs = value_grid(model, grid).points;
    const double mass_tol = 1e-6 + 2.0 * grid.tail_mass_cut;
    for (std::size_t k = 0; k < 5; ++k) {
        const double v = vs[k * (vs.size() - 1) / 4];
        const double mass = density_mass(model, v, tol, grid.tail_mass_cut);
        if (std::abs(mass - 1.0) > mass_tol)
            throw ArgumentError(ktag + ": density integrates to " + fmt(mass) + " at v=" + fmt(v));
        const KernelSection sec = model.kernel().section(v);
        double prev = -kInf;
        for (double V : Vs) {
            const double H = sec.cdf(V);
            const double h = sec.pdf(V);
            if (!(H >= 0.0 && H <= 1.0)) throw ArgumentError(ktag + ": H outside [0,1] at v=" + fmt(v) + ", V=" + fmt(V));
            if (!(h >= 0.0) || !std::isfinite(h))
                throw ArgumentError(ktag + ": invalid density at v=" + fmt(v) + ", V=" + fmt(V));
            if (H < prev - tol.monotonicity_slack)
                throw ArgumentError(ktag + ": H decreases in V at v=" + fmt(v) + ", V=" + fmt(V));
            prev = H;
        }
    }
}

}  // namespace seqscreen
