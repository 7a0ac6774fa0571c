#include "seqscreen/transforms.hpp"

#include "seqscreen/errors.hpp"
#include "seqscreen/regularity.hpp"

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

// Monotone inverse through a precomputed (v, phi(v)) lattice, then
// bisection inside the bracketing cell down to adjacent doubles.
class LatticeInverse {
public:
    LatticeInverse() = default;
    LatticeInverse(std::vector<double> v, std::vector<double> w) : v_(std::move(v)), w_(std::move(w)) {}

    double inverse(const RealFunction& phi, double w) const {
        if (!(w > w_.front())) return v_.front();
        if (!(w < w_.back())) return v_.back();
        auto it = std::upper_bound(w_.begin(), w_.end(), w);
        const std::size_t k = static_cast<std::size_t>(it - w_.begin()) - 1;
        const double lo = v_[k];
        const double hi = v_[std::min(k + 1, v_.size() - 1)];
        const double x = bisect_nondecreasing(phi, w, lo, hi);
        const double next = std::nextafter(x, hi);
        return (next <= hi && std::abs(phi(next) - w) < std::abs(phi(x) - w)) ? next : x;
    }

    const std::vector<double>& v() const { return v_; }
    const std::vector<double>& w() const { return w_; }

private:
    std::vector<double> v_;
    std::vector<double> w_;
};

std::vector<double> uniform_nodes(double lo, double hi, std::size_t cells) {
    std::vector<double> x(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k)
        x[k] = k == cells ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cells);
    return x;
}

std::size_t locate_cell(const std::vector<double>& nodes, double x) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    std::size_t k = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    return std::min(k, nodes.size() - 2);
}

// ---------------------------------------------------------------------------

class InverseHazardIntegral final : public Relabeling {
public:
    InverseHazardIntegral(std::shared_ptr<const SignalDistribution> signal, const RelabelingParams& p, double rel)
        : signal_(std::move(signal)), w_lower_(p.w_lower), rel_(rel) {
        const Interval s = signal_->support();
        if (!s.bounded()) throw ArgumentError("inverse-hazard integral needs a bounded signal support");
        nodes_ = uniform_nodes(s.lower, s.upper, std::max<std::size_t>(p.lattice_cells, 2));
        const std::size_t cells = nodes_.size() - 1;
        cum_.assign(nodes_.size(), 0.0);
        for (std::size_t k = 0; k < cells; ++k) {
            try {
                cum_[k + 1] = cum_[k] + cell_integral(k, nodes_[k + 1]);
            } catch (const QuadratureError& e) {
                const std::string where = k == 0           ? "near the lower endpoint v=" + fmt(s.lower)
                                          : k + 1 == cells ? "near the upper endpoint v=" + fmt(s.upper)
                                                           : "on [" + fmt(nodes_[k]) + ", " + fmt(nodes_[k + 1]) + "]";
                throw IntegrabilityError("inverse hazard (1-F)/f is not integrable " + where + " (" + e.what() + ")");
            }
        }
        std::vector<double> w(cum_.size());
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = w_lower_ + cum_[k];
        inv_ = LatticeInverse(nodes_, w);
    }

    RelabelingKind kind() const override { return RelabelingKind::InverseHazardIntegral; }
    Interval domain() const override { return signal_->support(); }
    Interval codomain() const override { return Interval{w_lower_, w_lower_ + cum_.back()}; }
    double map(double v) const override {
        v = std::clamp(v, nodes_.front(), nodes_.back());
        const std::size_t k = locate_cell(nodes_, v);
        return w_lower_ + cum_[k] + (v > nodes_[k] ? cell_integral(k, v) : 0.0);
    }
    double derivative(double v) const override {
        const SignalValues s = signal_->eval(v);
        return s.survival / s.pdf;
    }
    double inverse(double w) const override {
        return inv_.inverse([this](double x) { return map(x); }, w);
    }

private:
    // Integral of (1-F)/f from nodes_[k] to x. End cells use x = a + (b-a)u^2
    // (mirrored at the top) so integrable endpoint singularities stay tame.
    double cell_integral(std::size_t k, double x) const {
        auto ratio = [this](double v) {
            const SignalValues s = signal_->eval(v);
            return s.survival / s.pdf;
        };
        const double a = nodes_[k];
        const std::size_t cells = nodes_.size() - 1;
        if (k == 0) {
            const double span = nodes_[1] - a;
            const double umax = std::sqrt((x - a) / span);
            return integrate([&](double u) { return ratio(a + span * u * u) * 2.0 * span * u; }, Interval{0.0, umax},
                             rel_)
                .value;
        }
        if (k + 1 == cells) {
            const double b = nodes_[cells];
            const double span = b - a;
            // int_a^x = int over u in [sqrt((b-x)/span), 1] with v = b - span u^2
            const double umin = std::sqrt(std::max(0.0, (b - x) / span));
            if (!(umin < 1.0)) return 0.0;
            return integrate([&](double u) { return ratio(b - span * u * u) * 2.0 * span * u; }, Interval{umin, 1.0},
                             rel_)
                .value;
        }
        return integrate(ratio, Interval{a, x}, rel_).value;
    }

    std::shared_ptr<const SignalDistribution> signal_;
    double w_lower_;
    double rel_;
    std::vector<double> nodes_;
    std::vector<double> cum_;
    LatticeInverse inv_;
};

class IntegratedHazard final : public Relabeling {
public:
    IntegratedHazard(std::shared_ptr<const SignalDistribution> signal, const RelabelingParams& p)
        : signal_(std::move(signal)), w_lower_(p.w_lower) {
        const Interval s = signal_->support();
        if (!s.bounded()) throw ArgumentError("integrated hazard needs a bounded signal support");
        auto nodes = uniform_nodes(s.lower, s.upper, std::max<std::size_t>(p.lattice_cells, 2));
        std::vector<double> w(nodes.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) w[k] = map(nodes[k]);
        inv_ = LatticeInverse(std::move(nodes), std::move(w));
    }

    RelabelingKind kind() const override { return RelabelingKind::IntegratedHazard; }
    Interval domain() const override { return signal_->support(); }
    Interval codomain() const override { return Interval{inv_.w().front(), inv_.w().back()}; }
    double map(double v) const override {
        const double sf = signal_->eval(v).survival;
        return sf > 0.0 ? w_lower_ - std::log(sf) : kInf;
    }
    double derivative(double v) const override {
        const SignalValues s = signal_->eval(v);
        return s.pdf / s.survival;
    }
    double inverse(double w) const override {
        return inv_.inverse([this](double x) { return map(x); }, w);
    }

private:
    std::shared_ptr<const SignalDistribution> signal_;
    double w_lower_;
    LatticeInverse inv_;
};

// phi' = hazard / g with g the running maximum of the hazard on a dense
// lattice (piecewise linear between nodes). Past the last node, which sits
// just inside the top of the support, g = max(g_last, hazard).
class RunningMaxHazard final : public Relabeling {
public:
    RunningMaxHazard(std::shared_ptr<const SignalDistribution> signal, const RelabelingParams& p, const GridSpec& grid,
                     double rel)
        : signal_(std::move(signal)), w_lower_(p.w_lower), rel_(rel) {
        const Interval s = signal_->support();
        if (!s.bounded()) throw ArgumentError("running-max hazard needs a bounded signal support");
        const double top = s.upper - 0.5 * grid.endpoint_margin * s.width();
        nodes_ = uniform_nodes(s.lower, top, std::max<std::size_t>(4 * p.lattice_cells, 2));
        g_.resize(nodes_.size());
        double run = 0.0;
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            run = std::max(run, hazard_at(nodes_[k]));
            g_[k] = run;
        }
        cum_.assign(nodes_.size(), 0.0);
        for (std::size_t k = 0; k + 1 < nodes_.size(); ++k)
            cum_[k + 1] = cum_[k] + integrate([this](double v) { return derivative(v); },
                                              Interval{nodes_[k], nodes_[k + 1]}, rel_)
                                        .value;
        tail_ = integrate([this](double v) { return derivative(v); }, Interval{nodes_.back(), s.upper}, rel_).value;

        std::vector<double> v = nodes_;
        std::vector<double> w(nodes_.size());
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = w_lower_ + cum_[k];
        v.push_back(s.upper);
        w.push_back(w_lower_ + cum_.back() + tail_);
        inv_ = LatticeInverse(std::move(v), std::move(w));
    }

    RelabelingKind kind() const override { return RelabelingKind::RunningMaxHazard; }
    Interval domain() const override { return signal_->support(); }
    Interval codomain() const override { return Interval{w_lower_, w_lower_ + cum_.back() + tail_}; }
    double map(double v) const override {
        const Interval s = signal_->support();
        v = std::clamp(v, s.lower, s.upper);
        if (v >= nodes_.back()) {
            if (v == nodes_.back()) return w_lower_ + cum_.back();
            return w_lower_ + cum_.back() +
                   integrate([this](double x) { return derivative(x); }, Interval{nodes_.back(), v}, rel_).value;
        }
        const std::size_t k = locate_cell(nodes_, v);
        if (v == nodes_[k]) return w_lower_ + cum_[k];
        return w_lower_ + cum_[k] +
               integrate([this](double x) { return derivative(x); }, Interval{nodes_[k], v}, rel_).value;
    }
    double derivative(double v) const override {
        const double hz = hazard_at(v);
        const double g = envelope(v, hz);
        if (!(g > 0.0)) return 1.0;
        if (std::isinf(g)) return 1.0;
        return hz / g;
    }
    double inverse(double w) const override {
        return inv_.inverse([this](double x) { return map(x); }, w);
    }

    double envelope(double v, double hz) const {
        if (v >= nodes_.back()) return std::max(g_.back(), hz);
        const std::size_t k = locate_cell(nodes_, v);
        const double t = (v - nodes_[k]) / (nodes_[k + 1] - nodes_[k]);
        return (1.0 - t) * g_[k] + t * g_[k + 1];
    }

private:
    double hazard_at(double v) const {
        const SignalValues s = signal_->eval(v);
        if (!(s.survival > 0.0)) return kInf;
        return s.pdf / s.survival;
    }

    std::shared_ptr<const SignalDistribution> signal_;
    double w_lower_;
    double rel_;
    std::vector<double> nodes_;
    std::vector<double> g_;
    std::vector<double> cum_;
    double tail_ = 0.0;
    LatticeInverse inv_;
};

class MeanRelabeling final : public Relabeling {
public:
    MeanRelabeling(const ScreeningModel& model, const RelabelingParams& p, const GridSpec& grid,
                   const ToleranceConfig& tol)
        : model_(model), tol_(tol), cut_(grid.tail_mass_cut) {
        const Interval s = model_.signal().support();
        if (!s.bounded()) throw ArgumentError("mean relabeling needs a bounded signal support");
        auto nodes = uniform_nodes(s.lower, s.upper, std::clamp<std::size_t>(p.lattice_cells / 2, 2, 256));
        std::vector<double> w(nodes.size());
        parallel_for(nodes.size(), [&](std::size_t k) { w[k] = map(nodes[k]); });
        for (std::size_t k = 0; k + 1 < w.size(); ++k)
            if (!(w[k] < w[k + 1]))
                throw ArgumentError("conditional mean is not strictly increasing on [" + fmt(nodes[k]) + ", " +
                                    fmt(nodes[k + 1]) + "]; mean relabeling undefined");
        inv_ = LatticeInverse(std::move(nodes), std::move(w));
    }

    RelabelingKind kind() const override { return RelabelingKind::Mean; }
    Interval domain() const override { return model_.signal().support(); }
    Interval codomain() const override { return Interval{inv_.w().front(), inv_.w().back()}; }
    double map(double v) const override { return conditional_mean(model_, v, tol_, cut_).value; }
    double derivative(double v) const override { return conditional_mean_derivative(model_, v, tol_, cut_).value; }
    double inverse(double w) const override {
        return inv_.inverse([this](double x) { return map(x); }, w);
    }

private:
    ScreeningModel model_;
    ToleranceConfig tol_;
    double cut_;
    LatticeInverse inv_;
};

class AffineRelabeling final : public Relabeling {
public:
    AffineRelabeling(Interval domain, double slope, double intercept)
        : domain_(domain), slope_(slope), intercept_(intercept) {
        if (!(slope > 0.0) || !std::isfinite(slope)) throw ArgumentError("affine relabeling needs a slope > 0");
        if (!std::isfinite(intercept)) throw ArgumentError("affine relabeling needs a finite intercept");
    }
    RelabelingKind kind() const override { return RelabelingKind::Affine; }
    Interval domain() const override { return domain_; }
    Interval codomain() const override { return Interval{map(domain_.lower), map(domain_.upper)}; }
    double map(double v) const override { return slope_ * v + intercept_; }
    double derivative(double) const override { return slope_; }
    double inverse(double w) const override { return std::clamp((w - intercept_) / slope_, domain_.lower, domain_.upper); }

private:
    Interval domain_;
    double slope_;
    double intercept_;
};

class TabulatedRelabeling final : public Relabeling {
public:
    TabulatedRelabeling(std::vector<RelabelingNode> nodes, std::string origin)
        : nodes_(std::move(nodes)), origin_(std::move(origin)) {
        if (nodes_.size() < 2) throw ArgumentError("tabulated relabeling needs at least 2 nodes");
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            const auto& n = nodes_[k];
            if (!std::isfinite(n.v) || !std::isfinite(n.w) || !std::isfinite(n.dphi) || !(n.dphi > 0.0))
                throw ArgumentError("tabulated relabeling node " + std::to_string(k) +
                                    " must be finite with a positive derivative");
            if (k > 0 && !(nodes_[k - 1].v < n.v && nodes_[k - 1].w < n.w))
                throw ArgumentError("tabulated relabeling nodes must be strictly increasing in v and w");
        }
        std::vector<double> v, w;
        for (const auto& n : nodes_) {
            v.push_back(n.v);
            w.push_back(n.w);
        }
        vs_ = v;
        inv_ = LatticeInverse(std::move(v), std::move(w));
    }

    RelabelingKind kind() const override { return RelabelingKind::Tabulated; }
    std::string origin() const override { return origin_; }
    Interval domain() const override { return Interval{nodes_.front().v, nodes_.back().v}; }
    Interval codomain() const override { return Interval{nodes_.front().w, nodes_.back().w}; }
    double map(double v) const override {
        const auto [k, t, dx] = cell(v);
        const auto& a = nodes_[k];
        const auto& b = nodes_[k + 1];
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * a.w + (t3 - 2 * t2 + t) * dx * a.dphi + (-2 * t3 + 3 * t2) * b.w +
               (t3 - t2) * dx * b.dphi;
    }
    double derivative(double v) const override {
        const auto [k, t, dx] = cell(v);
        const auto& a = nodes_[k];
        const auto& b = nodes_[k + 1];
        const double t2 = t * t;
        return (6 * t2 - 6 * t) * (a.w - b.w) / dx + (3 * t2 - 4 * t + 1) * a.dphi + (3 * t2 - 2 * t) * b.dphi;
    }
    double inverse(double w) const override {
        return inv_.inverse([this](double x) { return map(x); }, w);
    }

private:
    struct Cell {
        std::size_t k;
        double t;
        double dx;
    };
    Cell cell(double v) const {
        if (v < nodes_.front().v || v > nodes_.back().v)
            throw DomainError("tabulated relabeling evaluated at v=" + fmt(v) + " outside its nodes " +
                              domain().describe());
        const std::size_t k = locate_cell(vs_, v);
        const double dx = nodes_[k + 1].v - nodes_[k].v;
        return {k, (v - nodes_[k].v) / dx, dx};
    }

    std::vector<RelabelingNode> nodes_;
    std::vector<double> vs_;
    std::string origin_;
    LatticeInverse inv_;
};

// ---------------------------------------------------------------------------

class TransformedSignal final : public SignalDistribution {
public:
    TransformedSignal(std::shared_ptr<const SignalDistribution> base, std::shared_ptr<const Relabeling> r)
        : base_(std::move(base)), r_(std::move(r)) {}

    std::string family() const override { return base_->family() + "/" + r_->origin(); }
    Interval support() const override { return r_->codomain(); }
    SignalValues eval(double w) const override {
        const double v = r_->inverse(w);
        const SignalValues s = base_->eval(v);
        return {s.cdf, s.pdf / r_->derivative(v), s.survival};
    }
    std::vector<double> grid(const GridSpec& spec) const override {
        std::vector<double> out = base_->grid(spec);
        for (double& v : out) v = r_->map(v);
        return out;
    }

private:
    std::shared_ptr<const SignalDistribution> base_;
    std::shared_ptr<const Relabeling> r_;
};

class TransformedKernel final : public ValuationKernel {
public:
    TransformedKernel(std::shared_ptr<const ValuationKernel> base, std::shared_ptr<const Relabeling> r)
        : ValuationKernel(base->step_policy()), base_(std::move(base)), r_(std::move(r)) {}

    std::string family() const override { return base_->family(); }
    Interval support() const override { return base_->support(); }
    double cdf(double w, double V) const override { return section(w).cdf(V); }
    double pdf(double w, double V) const override { return section(w).pdf(V); }
    double rate(double w, double V) const override { return section(w).rate(V); }
    bool analytic_rate() const override { return base_->analytic_rate(); }
    KernelSection section(double w) const override {
        const double v = r_->inverse(w);
        const KernelSection s = base_->section(v);
        return KernelSection(&s.base(), s.base_signal(), s.rate_scale() / r_->derivative(v));
    }

private:
    std::shared_ptr<const ValuationKernel> base_;
    std::shared_ptr<const Relabeling> r_;
};

}  // namespace

std::string to_string(RelabelingKind k) {
    switch (k) {
        case RelabelingKind::InverseHazardIntegral:
            return "inverse_hazard_integral";
        case RelabelingKind::IntegratedHazard:
            return "integrated_hazard";
        case RelabelingKind::RunningMaxHazard:
            return "runningmax_hazard";
        case RelabelingKind::Mean:
            return "mean";
        case RelabelingKind::Affine:
            return "affine";
        case RelabelingKind::Tabulated:
            return "tabulated";
    }
    return "?";
}

RelabelingKind parse_relabeling_kind(const std::string& name) {
    std::string n = name;
    std::replace(n.begin(), n.end(), '-', '_');
    for (RelabelingKind k : {RelabelingKind::InverseHazardIntegral, RelabelingKind::IntegratedHazard,
                             RelabelingKind::RunningMaxHazard, RelabelingKind::Mean, RelabelingKind::Affine,
                             RelabelingKind::Tabulated})
        if (to_string(k) == n) return k;
    throw ArgumentError("unknown relabeling kind '" + name +
                        "' (expected inverse_hazard_integral, integrated_hazard, runningmax_hazard, mean or affine)");
}

std::shared_ptr<const Relabeling> make_relabeling(const ScreeningModel& model, RelabelingKind kind,
                                                  const RelabelingParams& params, const GridSpec& grid,
                                                  const ToleranceConfig& tol) {
    switch (kind) {
        case RelabelingKind::InverseHazardIntegral:
            return std::make_shared<InverseHazardIntegral>(model.signal_ptr(), params, tol.quadrature_rel);
        case RelabelingKind::IntegratedHazard:
            return std::make_shared<IntegratedHazard>(model.signal_ptr(), params);
        case RelabelingKind::RunningMaxHazard:
            return std::make_shared<RunningMaxHazard>(model.signal_ptr(), params, grid, tol.quadrature_rel);
        case RelabelingKind::Mean:
            return std::make_shared<MeanRelabeling>(model, params, grid, tol);
        case RelabelingKind::Affine:
            return std::make_shared<AffineRelabeling>(model.signal().support(), params.slope, params.intercept);
        case RelabelingKind::Tabulated:
            throw ArgumentError("tabulated relabelings are built from nodes, see make_tabulated_relabeling");
    }
    throw ArgumentError("unknown relabeling kind");
}

std::shared_ptr<const Relabeling> make_tabulated_relabeling(std::vector<RelabelingNode> nodes, std::string origin) {
    return std::make_shared<TabulatedRelabeling>(std::move(nodes), std::move(origin));
}

std::vector<RelabelingNode> sample_relabeling(const Relabeling& r, std::span<const double> vs) {
    std::vector<RelabelingNode> out(vs.size());
    parallel_for(vs.size(), [&](std::size_t k) { out[k] = RelabelingNode{vs[k], r.map(vs[k]), r.derivative(vs[k])}; });
    return out;
}

std::vector<double> relabeling_lattice(const ScreeningModel& model, const GridSpec& grid, std::size_t refine) {
    const auto g = signal_grid(model, grid);
    refine = std::max<std::size_t>(refine, 1);
    std::vector<double> out;
    out.reserve(g.size() * refine);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        out.push_back(g[i]);
        for (std::size_t r = 1; r < refine; ++r)
            out.push_back(g[i] + (g[i + 1] - g[i]) * static_cast<double>(r) / static_cast<double>(refine));
    }
    out.push_back(g.back());
    return out;
}

TransformedModel wrap_relabeling(const ScreeningModel& base, std::shared_ptr<const Relabeling> r) {
    if (!r) throw ArgumentError("relabeling is null");
    auto signal = std::make_shared<TransformedSignal>(base.signal_ptr(), r);
    auto kernel = std::make_shared<TransformedKernel>(base.kernel_ptr(), r);
    return TransformedModel{base, r, ScreeningModel(signal, kernel)};
}

TransformedModel apply_relabeling(const ScreeningModel& base, std::shared_ptr<const Relabeling> r,
                                  const GridSpec& grid, IdentityCheck* check) {
    TransformedModel tm = wrap_relabeling(base, std::move(r));
    const Relabeling& phi = *tm.relabeling;

    const auto vs = signal_grid(base, grid);
    const auto Vs = value_grid(base, grid).points;
    const double a = vs.front() + 0.05 * (vs.back() - vs.front());
    const double b = vs.back() - 0.05 * (vs.back() - vs.front());
    const double w_span = phi.map(b) - phi.map(a);
    const StepPolicy step{1e-4, 1e-4 * w_span};
    constexpr std::size_t kPoints = 32;
    constexpr double kGolden = 0.6180339887498949;

    std::vector<double> hazard_res(kPoints, 0.0), ratio_res(kPoints, 0.0);
    parallel_for(kPoints, [&](std::size_t k) {
        const double u = std::fmod(0.5 + static_cast<double>(k) * kGolden, 1.0);
        const double v = a + u * (b - a);
        const double w = phi.map(v);
        const std::size_t j = Vs.size() / 4 + (k * 7) % std::max<std::size_t>(1, Vs.size() / 2);
        const double V = Vs[std::min(j, Vs.size() - 1)];

        const Stencil st = make_stencil(w, step);
        std::array<double, 5> F{}, H{};
        for (std::size_t p = 0; p < st.points.size(); ++p) {
            F[p] = tm.model.signal().eval(st.points[p]).cdf;
            H[p] = tm.model.kernel().section(st.points[p]).cdf(V);
        }
        const double f_fd = combine_stencil(st, F).value;
        const double rate_fd = combine_stencil(st, H).value;

        const SignalValues sw = tm.model.signal().eval(w);
        const KernelSection sec = tm.model.kernel().section(w);
        const double h = sec.pdf(V);
        const double rate = sec.rate(V);

        // identity 1: f~/(1-F~) = (1/phi') f/(1-F); identity 2: (dH~/dw)/h~ = (1/phi') (dH/dv)/h
        const SignalValues sv = base.signal().eval(v);
        const double d = phi.derivative(v);
        const double hz_direct = sv.pdf / sv.survival / d;
        const double hz_fd = f_fd / sw.survival;
        hazard_res[k] = std::abs(hz_fd - hz_direct) / std::max(std::abs(hz_direct), 1e-300);
        const KernelSection bsec = base.kernel().section(v);
        const double ratio_direct = bsec.rate(V) / bsec.pdf(V) / d;
        const double ratio_fd = rate_fd / h;
        ratio_res[k] = std::abs(ratio_fd - ratio_direct) / std::max(std::abs(ratio_direct), 1e-6);
        (void)rate;
    });

    IdentityCheck ic;
    ic.points = kPoints;
    ic.worst_hazard_residual = *std::max_element(hazard_res.begin(), hazard_res.end());
    ic.worst_ratio_residual = *std::max_element(ratio_res.begin(), ratio_res.end());
    if (check) *check = ic;
    if (!(ic.worst_hazard_residual <= 1e-6) || !(ic.worst_ratio_residual <= 1e-6)) {
        throw SelfCheckError("relabeling self-check failed for kind " + phi.origin() +
                             ": hazard identity residual " + fmt(ic.worst_hazard_residual) +
                             ", rate-ratio identity residual " + fmt(ic.worst_ratio_residual) + " (limit 1e-6)");
    }
    return tm;
}

GammaPsi transformed_gamma_psi(const TransformedModel& tm, double w, double V) {
    return GammaPsi{gamma(tm.model, w, V), virtual_value(tm.model, w, V)};
}

}  // namespace seqscreen
