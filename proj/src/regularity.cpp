#include "seqscreen/regularity.hpp"

#include "seqscreen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace seqscreen {

namespace {

constexpr double kDensityFloor = 1e-300;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

}  // namespace

HazardValues hazard(const ScreeningModel& model, double v) {
    const SignalValues s = eval_signal(model, v);
    if (!(s.survival > 1e-15))
        throw DomainError("1 - F(v) = " + fmt(s.survival) + " at v=" + fmt(v) +
                          " is at the top of the signal support; increase endpoint_margin");
    if (!(s.pdf > 0.0)) throw DomainError("signal density vanishes at v=" + fmt(v));
    return HazardValues{s.pdf / s.survival, s.survival / s.pdf};
}

double gamma(const ScreeningModel& model, double v, double V) {
    const KernelEval k = eval_kernel(model, v, V);
    if (!(k.h >= kDensityFloor))
        throw DensityUnderflowError("h_v(V) = " + fmt(k.h) + " below 1e-300 at v=" + fmt(v) + ", V=" + fmt(V));
    return -k.dHdv / k.h;
}

double virtual_value(const ScreeningModel& model, double v, double V) {
    const HazardValues hz = hazard(model, v);
    return V - hz.inverse_hazard * gamma(model, v, V);
}

std::string to_string(Assumption a) {
    switch (a) {
        case Assumption::A0:
            return "A0";
        case Assumption::A1:
            return "A1";
        case Assumption::A2:
            return "A2";
        case Assumption::FOSD:
            return "FOSD";
        case Assumption::PSI:
            return "PSI";
    }
    return "?";
}

Assumption parse_assumption(const std::string& name) {
    for (Assumption a : kAllAssumptions)
        if (to_string(a) == name) return a;
    throw ArgumentError("unknown assumption '" + name + "' (expected A0, A1, A2, FOSD or PSI)");
}

// ---------------------------------------------------------------------------

double GridEvaluation::gamma(std::size_t i, std::size_t j) const {
    const KernelValues& k = kernel[index(i, j)];
    return -k.dHdv / k.h;
}

double GridEvaluation::inverse_hazard(std::size_t i) const { return signal[i].survival / signal[i].pdf; }

double GridEvaluation::hazard(std::size_t i) const { return signal[i].pdf / signal[i].survival; }

double GridEvaluation::psi(std::size_t i, std::size_t j) const {
    return values.points[j] - inverse_hazard(i) * gamma(i, j);
}

GridProvenance GridEvaluation::provenance() const {
    GridProvenance p;
    p.spec = spec;
    p.v_first = vs.front();
    p.v_last = vs.back();
    p.V_first = values.points.front();
    p.V_last = values.points.back();
    p.truncated_lower = values.truncated_lower;
    p.truncated_upper = values.truncated_upper;
    return p;
}

GridEvaluation evaluate_grid(const ScreeningModel& model, const GridSpec& grid) {
    grid.validate();
    GridEvaluation e;
    e.spec = grid;
    e.vs = signal_grid(model, grid);
    e.values = value_grid(model, grid);
    const std::size_t nv = e.vs.size();
    const std::size_t nV = e.values.points.size();
    e.signal.assign(nv, SignalValues{});
    e.signal_ok.assign(nv, 0);
    e.kernel.assign(nv * nV, KernelValues{});
    e.kernel_ok.assign(nv * nV, 0);

    parallel_for(nv, [&](std::size_t i) {
        const double v = e.vs[i];
        try {
            const SignalValues s = model.signal().eval(v);
            e.signal[i] = s;
            e.signal_ok[i] = std::isfinite(s.pdf) && s.pdf > 0.0 && s.survival > 1e-15 && std::isfinite(s.cdf);
        } catch (const Error&) {
            e.signal_ok[i] = 0;
        }
        try {
            const KernelSection sec = model.kernel().section(v);
            for (std::size_t j = 0; j < nV; ++j) {
                try {
                    const KernelValues k = sec.eval(e.values.points[j]);
                    e.kernel[e.index(i, j)] = k;
                    e.kernel_ok[e.index(i, j)] = std::isfinite(k.H) && std::isfinite(k.dHdv) && std::isfinite(k.h) &&
                                                 k.h >= kDensityFloor;
                } catch (const Error&) {
                }
            }
        } catch (const Error&) {
        }
    });

    double v_lo = kInf, v_hi = -kInf, V_lo = kInf, V_hi = -kInf;
    for (std::size_t i = 0; i < nv; ++i) {
        for (std::size_t j = 0; j < nV; ++j) {
            if (e.ok(i, j)) continue;
            ++e.failed_points;
            v_lo = std::min(v_lo, e.vs[i]);
            v_hi = std::max(v_hi, e.vs[i]);
            V_lo = std::min(V_lo, e.values.points[j]);
            V_hi = std::max(V_hi, e.values.points[j]);
        }
    }
    if (static_cast<double>(e.failed_points) > 0.01 * static_cast<double>(nv * nV)) {
        throw EvaluationError("evaluation failed at " + std::to_string(e.failed_points) + " of " +
                              std::to_string(nv * nV) + " grid points; failing region v in [" + fmt(v_lo) + ", " +
                              fmt(v_hi) + "], V in [" + fmt(V_lo) + ", " + fmt(V_hi) + "]");
    }
    return e;
}

namespace {

struct Collector {
    std::vector<Witness> witnesses;
    double min_value = kInf;
    double max_value = -kInf;
    bool pass = true;

    void observe(std::span<const double> ys) {
        for (double y : ys) {
            min_value = std::min(min_value, y);
            max_value = std::max(max_value, y);
        }
    }
};

void scan_line(Collector& c, const std::vector<double>& xs, const std::vector<double>& ys, Direction dir,
               double slack, const std::string& axis, const std::vector<double>& fixed_v,
               const std::vector<double>& fixed_V) {
    if (xs.size() < 2) return;
    c.observe(ys);
    const MonotoneVerdict m = monotone_scan(xs, ys, dir, slack);
    if (m.pass) return;
    c.pass = false;
    for (const MonotonePair& p : m.violations) {
        Witness w;
        w.axis = axis;
        w.v0 = fixed_v[p.index];
        w.v1 = fixed_v[p.index + 1];
        w.V0 = fixed_V[p.index];
        w.V1 = fixed_V[p.index + 1];
        w.value0 = p.y0;
        w.value1 = p.y1;
        w.magnitude = p.magnitude;
        c.witnesses.push_back(w);
    }
}

}  // namespace

CheckReport check_assumption(const GridEvaluation& e, Assumption which, const ToleranceConfig& tol) {
    tol.validate();
    const double slack = tol.monotonicity_slack;
    const auto& vs = e.vs;
    const auto& Vs = e.Vs();
    const std::size_t nv = vs.size();
    const std::size_t nV = Vs.size();
    Collector c;
    CheckReport r;
    r.id = which;
    r.grid = e.provenance();
    r.tolerances = tol;
    r.failed_points = e.failed_points;
    r.evaluated_points = nv * nV - e.failed_points;

    switch (which) {
        case Assumption::A0: {
            std::vector<double> xs, ys, nanV;
            bool near_top = false;
            for (std::size_t i = 0; i < nv; ++i) {
                if (!e.signal_ok[i]) continue;
                xs.push_back(vs[i]);
                near_top = near_top || e.signal[i].survival < 1e-12;
            }
            nanV.assign(xs.size(), std::nan(""));
            for (std::size_t i = 0; i < nv; ++i) {
                if (!e.signal_ok[i]) continue;
                ys.push_back(near_top ? e.inverse_hazard(i) : e.hazard(i));
            }
            r.evaluated_points = xs.size();
            if (near_top) {
                r.quantity = "(1-F)/f";
                r.scan = "decreasing in v";
                scan_line(c, xs, ys, Direction::Decreasing, slack, "v", xs, nanV);
            } else {
                r.quantity = "f/(1-F)";
                r.scan = "increasing in v";
                scan_line(c, xs, ys, Direction::Increasing, slack, "v", xs, nanV);
            }
            break;
        }
        case Assumption::A1:
        case Assumption::PSI: {
            const bool psi = which == Assumption::PSI;
            r.quantity = psi ? "psi" : "(dH/dv)/h";
            r.scan = psi ? "increasing in V for each v and in v for each V" : "increasing in V for each v";
            for (std::size_t i = 0; i < nv; ++i) {
                std::vector<double> xs, ys, fv;
                for (std::size_t j = 0; j < nV; ++j) {
                    if (!e.ok(i, j)) continue;
                    xs.push_back(Vs[j]);
                    ys.push_back(psi ? e.psi(i, j) : -e.gamma(i, j));
                }
                fv.assign(xs.size(), vs[i]);
                scan_line(c, xs, ys, Direction::Increasing, slack, "V", fv, xs);
            }
            if (!psi) break;
            [[fallthrough]];
        }
        case Assumption::A2: {
            const bool psi = which == Assumption::PSI;
            if (!psi) {
                r.quantity = "(dH/dv)/h";
                r.scan = "increasing in v for each V";
            }
            for (std::size_t j = 0; j < nV; ++j) {
                std::vector<double> xs, ys, fV;
                for (std::size_t i = 0; i < nv; ++i) {
                    if (!e.ok(i, j)) continue;
                    xs.push_back(vs[i]);
                    ys.push_back(psi ? e.psi(i, j) : -e.gamma(i, j));
                }
                fV.assign(xs.size(), Vs[j]);
                scan_line(c, xs, ys, Direction::Increasing, slack, "v", xs, fV);
            }
            break;
        }
        case Assumption::FOSD: {
            r.quantity = "gamma = -(dH/dv)/h";
            r.scan = "gamma > slack at every interior point";
            for (std::size_t i = 0; i < nv; ++i) {
                for (std::size_t j = 0; j < nV; ++j) {
                    if (!e.ok(i, j)) continue;
                    const double g = e.gamma(i, j);
                    c.min_value = std::min(c.min_value, g);
                    c.max_value = std::max(c.max_value, g);
                    if (g > slack) continue;
                    c.pass = false;
                    Witness w;
                    w.axis = "point";
                    w.v0 = w.v1 = vs[i];
                    w.V0 = w.V1 = Vs[j];
                    w.value0 = w.value1 = e.kernel[e.index(i, j)].dHdv;
                    w.magnitude = slack - g;
                    c.witnesses.push_back(w);
                }
            }
            break;
        }
    }

    std::stable_sort(c.witnesses.begin(), c.witnesses.end(),
                     [](const Witness& a, const Witness& b) { return a.magnitude > b.magnitude; });
    r.pass = c.pass && c.witnesses.empty();
    r.witnesses = std::move(c.witnesses);
    r.min_value = std::isfinite(c.min_value) ? c.min_value : 0.0;
    r.max_value = std::isfinite(c.max_value) ? c.max_value : 0.0;
    r.note = r.pass ? "pass is relative to the evaluation grid" : "violation witnessed on the evaluation grid";
    return r;
}

CheckReport check_assumption(const ScreeningModel& model, Assumption which, const GridSpec& grid,
                             const ToleranceConfig& tol) {
    return check_assumption(evaluate_grid(model, grid), which, tol);
}

RegularityReport regularity_report(const ScreeningModel& model, const GridEvaluation& e, const ToleranceConfig& tol) {
    RegularityReport rep;
    for (std::size_t k = 0; k < kAllAssumptions.size(); ++k) rep.checks[k] = check_assumption(e, kAllAssumptions[k], tol);
    rep.es_regular = rep.get(Assumption::A0).pass && rep.get(Assumption::A1).pass && rep.get(Assumption::A2).pass;
    rep.psi_regular = rep.get(Assumption::PSI).pass;
    rep.signal_family = model.signal().family();
    rep.kernel_family = model.kernel().family();

    const auto& Vs = e.Vs();
    const ValuationKernel& kernel = model.kernel();
    if (kernel.tail_bound(Vs[Vs.size() / 2]).has_value()) {
        rep.tail_bound.declared = true;
        constexpr std::size_t kSide = 8;
        for (std::size_t a = 0; a < kSide; ++a) {
            const std::size_t i = a * (e.vs.size() - 1) / (kSide - 1);
            for (std::size_t b = 0; b < kSide; ++b) {
                const std::size_t j = b * (Vs.size() - 1) / (kSide - 1);
                if (!e.ok(i, j)) continue;
                const double bound = *kernel.tail_bound(Vs[j]);
                const double rate = std::abs(e.kernel[e.index(i, j)].dHdv);
                ++rep.tail_bound.samples;
                const double ratio = bound > 0.0 ? rate / bound : (rate > 0.0 ? kInf : 0.0);
                rep.tail_bound.worst_ratio = std::max(rep.tail_bound.worst_ratio, ratio);
            }
        }
        rep.tail_bound.pass = rep.tail_bound.worst_ratio <= 1.0 + 1e-9;
    }
    return rep;
}

RegularityReport regularity_report(const ScreeningModel& model, const GridSpec& grid, const ToleranceConfig& tol) {
    return regularity_report(model, evaluate_grid(model, grid), tol);
}

}  // namespace seqscreen
