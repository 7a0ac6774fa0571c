#include "seqscreen/families.hpp"

#include "seqscreen/errors.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace seqscreen {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

// expm1(z)/z, continuous at 0.
double expm1_over(double z) { return z == 0.0 ? 1.0 : std::expm1(z) / z; }

// ---------------------------------------------------------------------------
// Signals

class UniformSignal final : public SignalDistribution {
public:
    UniformSignal(double lo, double hi) : s_(make_interval(lo, hi)) {
        if (!s_.bounded()) throw ArgumentError("uniform signal needs a finite support");
    }
    std::string family() const override { return "uniform"; }
    Interval support() const override { return s_; }
    SignalValues eval(double v) const override {
        const double w = s_.width();
        const double x = std::clamp((v - s_.lower) / w, 0.0, 1.0);
        return {x, 1.0 / w, std::clamp((s_.upper - v) / w, 0.0, 1.0)};
    }

private:
    Interval s_;
};

class BetaSignal final : public SignalDistribution {
public:
    BetaSignal(double a, double b, double lo, double hi) : a_(a), b_(b), s_(make_interval(lo, hi)) {
        if (!(a > 0.0 && b > 0.0)) throw ArgumentError("beta signal needs positive shape parameters");
        if (!s_.bounded()) throw ArgumentError("beta signal needs a finite support");
    }
    std::string family() const override { return "beta"; }
    Interval support() const override { return s_; }
    SignalValues eval(double v) const override {
        const double x = std::clamp((v - s_.lower) / s_.width(), 0.0, 1.0);
        const double cdf = boost::math::ibeta(a_, b_, x);
        const double sf = boost::math::ibetac(a_, b_, x);
        const double pdf = (x <= 0.0 || x >= 1.0) ? endpoint_density(x) : boost::math::ibeta_derivative(a_, b_, x);
        return {cdf, pdf / s_.width(), sf};
    }

private:
    double endpoint_density(double x) const {
        const double shape = x <= 0.0 ? a_ : b_;
        if (shape > 1.0) return 0.0;
        if (shape < 1.0) return kInf;
        return 1.0 / boost::math::beta(a_, b_);
    }

    double a_;
    double b_;
    Interval s_;
};

class TableSignal final : public SignalDistribution {
public:
    TableSignal(double lo, double hi, std::vector<double> d) : s_(make_interval(lo, hi)), d_(std::move(d)) {
        if (!s_.bounded()) throw ArgumentError("table signal needs a finite support");
        if (d_.size() < 2) throw ArgumentError("table signal needs at least 2 density values");
        for (double x : d_)
            if (!(x > 0.0) || !std::isfinite(x)) throw ArgumentError("table signal densities must be finite and > 0");
        step_ = s_.width() / static_cast<double>(d_.size() - 1);
        const std::size_t cells = d_.size() - 1;
        r_.resize(cells);
        mass_.resize(cells);
        for (std::size_t i = 0; i < cells; ++i) {
            r_[i] = std::log(d_[i + 1] / d_[i]);
            mass_[i] = step_ * d_[i] * expm1_over(r_[i]);
        }
        below_.assign(cells + 1, 0.0);
        above_.assign(cells + 1, 0.0);
        for (std::size_t i = 0; i < cells; ++i) below_[i + 1] = below_[i] + mass_[i];
        for (std::size_t i = cells; i-- > 0;) above_[i] = above_[i + 1] + mass_[i];
        total_ = below_[cells];
    }
    std::string family() const override { return "table"; }
    Interval support() const override { return s_; }
    SignalValues eval(double v) const override {
        const double x = std::clamp(v, s_.lower, s_.upper);
        const std::size_t cells = d_.size() - 1;
        std::size_t i = static_cast<std::size_t>(std::floor((x - s_.lower) / step_));
        i = std::min(i, cells - 1);
        const double t = std::clamp((x - (s_.lower + static_cast<double>(i) * step_)) / step_, 0.0, 1.0);
        const double dens = d_[i] * std::exp(r_[i] * t);
        const double left = step_ * d_[i] * t * expm1_over(r_[i] * t);
        const double right = step_ * dens * (1.0 - t) * expm1_over(r_[i] * (1.0 - t));
        return {(below_[i] + left) / total_, dens / total_, (above_[i + 1] + right) / total_};
    }

private:
    Interval s_;
    std::vector<double> d_;
    std::vector<double> r_;
    std::vector<double> mass_;
    std::vector<double> below_;
    std::vector<double> above_;
    double step_ = 0.0;
    double total_ = 0.0;
};

// ---------------------------------------------------------------------------
// Kernels

struct Noise {
    NoiseFamily family;

    double cdf(double x) const {
        switch (family) {
            case NoiseFamily::Normal:
                return 0.5 * std::erfc(-x / std::numbers::sqrt2);
            case NoiseFamily::Logistic:
                return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
            case NoiseFamily::Laplace:
                return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
        }
        return 0.0;
    }
    double pdf(double x) const {
        switch (family) {
            case NoiseFamily::Normal:
                return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
            case NoiseFamily::Logistic: {
                const double e = std::exp(-std::abs(x));
                return e / ((1.0 + e) * (1.0 + e));
            }
            case NoiseFamily::Laplace:
                return 0.5 * std::exp(-std::abs(x));
        }
        return 0.0;
    }
};

class AdditiveNoiseKernel final : public ValuationKernel {
public:
    AdditiveNoiseKernel(NoiseFamily f, double scale) : noise_{f}, scale_(scale) {
        if (!(scale > 0.0) || !std::isfinite(scale)) throw ArgumentError("noise.scale must be finite and > 0");
    }
    std::string family() const override { return "additive_noise"; }
    Interval support() const override { return Interval{-kInf, kInf}; }
    double cdf(double v, double V) const override { return noise_.cdf((V - v) / scale_); }
    double pdf(double v, double V) const override { return noise_.pdf((V - v) / scale_) / scale_; }
    // dH/dv = -h exactly: the translation structure is preserved bit for bit.
    double rate(double v, double V) const override { return -pdf(v, V); }
    bool analytic_rate() const override { return true; }
    bool additive_noise() const override { return true; }

private:
    Noise noise_;
    double scale_;
};

class PowerKernel final : public ValuationKernel {
public:
    std::string family() const override { return "power"; }
    Interval support() const override { return Interval{0.0, 1.0}; }
    double cdf(double v, double V) const override {
        if (V <= 0.0) return 0.0;
        if (V >= 1.0) return 1.0;
        return std::pow(V, v);
    }
    double pdf(double v, double V) const override {
        if (V <= 0.0 || V >= 1.0) return 0.0;
        return v * std::pow(V, v - 1.0);
    }
    double rate(double v, double V) const override {
        if (V <= 0.0 || V >= 1.0) return 0.0;
        return std::log(V) * std::pow(V, v);
    }
    bool analytic_rate() const override { return true; }
    std::optional<double> tail_bound(double V) const override {
        if (V <= 0.0 || V >= 1.0) return 0.0;
        return -std::log(V);
    }
    void check_signal_support(Interval s) const override {
        if (!(s.lower > 0.0)) throw ArgumentError("power kernel requires a signal support with lower end > 0");
    }
};

class ExpTiltKernel final : public ValuationKernel {
public:
    explicit ExpTiltKernel(StepPolicy step) : ValuationKernel(step) {}
    std::string family() const override { return "exp_tilt"; }
    Interval support() const override { return Interval{0.0, 1.0}; }
    double cdf(double v, double V) const override {
        if (V <= 0.0) return 0.0;
        if (V >= 1.0) return 1.0;
        if (v == 0.0) return V;
        return std::expm1(v * V) / std::expm1(v);
    }
    double pdf(double v, double V) const override {
        if (V <= 0.0 || V >= 1.0) return 0.0;
        if (v == 0.0) return 1.0;
        return v * std::exp(v * V) / std::expm1(v);
    }
    void check_signal_support(Interval s) const override {
        if (!(s.lower > -700.0 && s.upper < 700.0))
            throw ArgumentError("exp_tilt kernel supports signals in (-700, 700) only");
    }
};

std::size_t cell_index(const std::vector<double>& nodes, double x) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    std::size_t i = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    return std::min(i, nodes.size() - 2);
}

class TableKernel final : public ValuationKernel {
public:
    explicit TableKernel(KernelTable t) : t_(std::move(t)) {
        auto check_nodes = [](const std::vector<double>& n, const char* name) {
            if (n.size() < 2) throw ArgumentError(std::string("table kernel needs at least 2 ") + name + " nodes");
            for (std::size_t i = 0; i + 1 < n.size(); ++i)
                if (!(n[i] < n[i + 1]))
                    throw ArgumentError(std::string("table kernel ") + name + " nodes must be strictly increasing");
        };
        check_nodes(t_.v_nodes, "v");
        check_nodes(t_.V_nodes, "V");
        const std::size_t n = t_.v_nodes.size() * t_.V_nodes.size();
        if (t_.H.size() != n)
            throw ArgumentError("table kernel H has " + std::to_string(t_.H.size()) + " values, expected " +
                                std::to_string(n));
        if (!t_.h.empty() && t_.h.size() != n) throw ArgumentError("table kernel h table has the wrong size");
        if (!t_.dHdv.empty() && t_.dHdv.size() != n) throw ArgumentError("table kernel dHdv table has the wrong size");
        const std::size_t nV = t_.V_nodes.size();
        for (std::size_t i = 0; i < t_.v_nodes.size(); ++i) {
            for (std::size_t j = 0; j < nV; ++j) {
                const double H = t_.H[i * nV + j];
                if (!(H >= 0.0 && H <= 1.0)) throw ArgumentError("table kernel H values must lie in [0, 1]");
                if (j > 0 && H < t_.H[i * nV + j - 1] - 1e-12)
                    throw ArgumentError("table kernel H must be nondecreasing in V (row " + std::to_string(i) + ")");
            }
        }
    }
    std::string family() const override { return "table"; }
    Interval support() const override { return Interval{t_.V_nodes.front(), t_.V_nodes.back()}; }

    double cdf(double v, double V) const override {
        if (V <= t_.V_nodes.front()) return 0.0;
        if (V >= t_.V_nodes.back()) return 1.0;
        return bilinear(t_.H, v, V);
    }
    double pdf(double v, double V) const override {
        if (V <= t_.V_nodes.front() || V >= t_.V_nodes.back()) return 0.0;
        if (!t_.h.empty()) return bilinear(t_.h, v, V);
        const Cell c = locate(v, V);
        return ((1.0 - c.s) * (at(t_.H, c.i, c.j + 1) - at(t_.H, c.i, c.j)) +
                c.s * (at(t_.H, c.i + 1, c.j + 1) - at(t_.H, c.i + 1, c.j))) /
               c.dV;
    }
    double rate(double v, double V) const override {
        if (V <= t_.V_nodes.front() || V >= t_.V_nodes.back()) return 0.0;
        if (!t_.dHdv.empty()) return bilinear(t_.dHdv, v, V);
        const Cell c = locate(v, V);
        return ((1.0 - c.t) * (at(t_.H, c.i + 1, c.j) - at(t_.H, c.i, c.j)) +
                c.t * (at(t_.H, c.i + 1, c.j + 1) - at(t_.H, c.i, c.j + 1))) /
               c.dv;
    }
    bool analytic_rate() const override { return true; }
    void check_signal_support(Interval s) const override {
        if (s.lower < t_.v_nodes.front() || s.upper > t_.v_nodes.back())
            throw ArgumentError("table kernel v nodes do not cover the signal support " + s.describe());
    }

private:
    struct Cell {
        std::size_t i, j;
        double s, t, dv, dV;
    };

    Cell locate(double v, double V) const {
        if (v < t_.v_nodes.front() || v > t_.v_nodes.back())
            throw DomainError("table kernel evaluated at v=" + fmt(v) + " outside its v nodes");
        Cell c{};
        c.i = cell_index(t_.v_nodes, v);
        c.j = cell_index(t_.V_nodes, V);
        c.dv = t_.v_nodes[c.i + 1] - t_.v_nodes[c.i];
        c.dV = t_.V_nodes[c.j + 1] - t_.V_nodes[c.j];
        c.s = (v - t_.v_nodes[c.i]) / c.dv;
        c.t = (V - t_.V_nodes[c.j]) / c.dV;
        return c;
    }
    double at(const std::vector<double>& tab, std::size_t i, std::size_t j) const {
        return tab[i * t_.V_nodes.size() + j];
    }
    double bilinear(const std::vector<double>& tab, double v, double V) const {
        const Cell c = locate(v, V);
        return (1.0 - c.s) * (1.0 - c.t) * at(tab, c.i, c.j) + c.s * (1.0 - c.t) * at(tab, c.i + 1, c.j) +
               (1.0 - c.s) * c.t * at(tab, c.i, c.j + 1) + c.s * c.t * at(tab, c.i + 1, c.j + 1);
    }

    KernelTable t_;
};

}  // namespace

std::shared_ptr<const SignalDistribution> make_uniform_signal(double lower, double upper) {
    return std::make_shared<UniformSignal>(lower, upper);
}

std::shared_ptr<const SignalDistribution> make_beta_signal(double a, double b, double lower, double upper) {
    return std::make_shared<BetaSignal>(a, b, lower, upper);
}

std::shared_ptr<const SignalDistribution> make_table_signal(double lower, double upper, std::vector<double> density) {
    return std::make_shared<TableSignal>(lower, upper, std::move(density));
}

NoiseFamily parse_noise_family(const std::string& name) {
    if (name == "normal") return NoiseFamily::Normal;
    if (name == "logistic") return NoiseFamily::Logistic;
    if (name == "laplace") return NoiseFamily::Laplace;
    throw ArgumentError("unknown noise family '" + name + "' (expected normal, logistic or laplace)");
}

std::string to_string(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::Normal:
            return "normal";
        case NoiseFamily::Logistic:
            return "logistic";
        case NoiseFamily::Laplace:
            return "laplace";
    }
    return "?";
}

std::shared_ptr<const ValuationKernel> make_additive_noise_kernel(NoiseFamily noise, double scale) {
    return std::make_shared<AdditiveNoiseKernel>(noise, scale);
}

std::shared_ptr<const ValuationKernel> make_power_kernel() { return std::make_shared<PowerKernel>(); }

std::shared_ptr<const ValuationKernel> make_exp_tilt_kernel(StepPolicy step) {
    return std::make_shared<ExpTiltKernel>(step);
}

std::shared_ptr<const ValuationKernel> make_table_kernel(KernelTable table) {
    return std::make_shared<TableKernel>(std::move(table));
}

KernelTable tabulate_kernel(const ValuationKernel& kernel, std::vector<double> v_nodes, std::vector<double> V_nodes) {
    KernelTable t;
    t.v_nodes = std::move(v_nodes);
    t.V_nodes = std::move(V_nodes);
    const std::size_t n = t.v_nodes.size() * t.V_nodes.size();
    t.H.reserve(n);
    t.h.reserve(n);
    t.dHdv.reserve(n);
    for (double v : t.v_nodes) {
        const KernelSection sec = kernel.section(v);
        for (double V : t.V_nodes) {
            const KernelValues k = sec.eval(V);
            t.H.push_back(k.H);
            t.h.push_back(k.h);
            t.dHdv.push_back(k.dHdv);
        }
    }
    return t;
}

}  // namespace seqscreen
