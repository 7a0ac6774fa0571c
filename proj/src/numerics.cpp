#include "seqscreen/numerics.hpp"

#include "seqscreen/errors.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <queue>
#include <sstream>
#include <thread>

namespace seqscreen {

bool Interval::lower_finite() const noexcept { return std::isfinite(lower); }
bool Interval::upper_finite() const noexcept { return std::isfinite(upper); }

namespace {

std::string format_real(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

}  // namespace

std::string Interval::describe() const {
    std::string s = lower_finite() ? "[" : "(";
    s += format_real(lower) + ", " + format_real(upper);
    s += upper_finite() ? "]" : ")";
    return s;
}

Interval make_interval(double lower, double upper) {
    if (std::isnan(lower) || std::isnan(upper) || !(lower < upper))
        throw ArgumentError("interval requires lower < upper, got " + format_real(lower) + ", " + format_real(upper));
    return Interval{lower, upper};
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    int depth;
};

struct SegmentOrder {
    bool operator()(const Segment& x, const Segment& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;
    }
};

double checked(const RealFunction& g, double t) {
    double y = g(t);
    if (!std::isfinite(y)) {
        std::ostringstream os;
        os.precision(17);
        os << "non-finite integrand value at t=" << t;
        throw QuadratureError(os.str(), 0.0, kInf);
    }
    return y;
}

Segment gauss_kronrod(const RealFunction& g, double a, double b, int depth) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked(g, center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = checked(g, center - dx);
        f2[j] = checked(g, center + dx);
        const double sum = f1[j] + f2[j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * sum;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return Segment{a, b, value, err, depth};
}

struct Mapped {
    RealFunction g;
    double t0;
    double t1;
};

Mapped map_domain(const RealFunction& f, Interval d) {
    if (d.bounded()) return {f, d.lower, d.upper};
    if (!d.lower_finite() && !d.upper_finite()) {
        return {[&f](double t) {
                    const double s = 1.0 - t * t;
                    const double x = t / s;
                    if (!std::isfinite(x)) return 0.0;
                    const double y = f(x);
                    return y == 0.0 ? 0.0 : y * (1.0 + t * t) / (s * s);
                },
                -1.0, 1.0};
    }
    if (d.lower_finite()) {
        const double a = d.lower;
        return {[&f, a](double t) {
                    const double s = 1.0 - t;
                    const double x = a + t / s;
                    if (!std::isfinite(x)) return 0.0;
                    const double y = f(x);
                    return y == 0.0 ? 0.0 : y / (s * s);
                },
                0.0, 1.0};
    }
    const double b = d.upper;
    return {[&f, b](double t) {
                const double s = 1.0 - t;
                const double x = b - t / s;
                if (!std::isfinite(x)) return 0.0;
                const double y = f(x);
                return y == 0.0 ? 0.0 : y / (s * s);
            },
            0.0, 1.0};
}

}  // namespace

QuadratureResult integrate(const RealFunction& f, Interval domain, const QuadratureOptions& options) {
    if (std::isnan(domain.lower) || std::isnan(domain.upper) || !(domain.lower < domain.upper))
        throw ArgumentError("integration domain must satisfy lower < upper, got " + domain.describe());
    if (!(options.rel_tol > 0.0)) throw ArgumentError("quadrature rel_tol must be positive");

    const Mapped m = map_domain(f, domain);
    std::priority_queue<Segment, std::vector<Segment>, SegmentOrder> queue;
    Segment first = gauss_kronrod(m.g, m.t0, m.t1, 0);
    double total = first.value;
    double total_err = first.error;
    queue.push(first);
    int count = 1;

    auto target = [&] { return std::max(options.rel_tol * std::abs(total), options.abs_floor); };

    while (total_err > target()) {
        const Segment worst = queue.top();
        if (worst.depth >= options.max_depth || count >= options.max_subintervals) {
            std::ostringstream os;
            os.precision(6);
            os << "adaptive quadrature did not converge on " << domain.describe() << " (worst segment ["
               << worst.a << ", " << worst.b << "] in mapped coordinates, error " << total_err << ")";
            throw QuadratureError(os.str(), total, total_err);
        }
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Segment left = gauss_kronrod(m.g, worst.a, mid, worst.depth + 1);
        Segment right = gauss_kronrod(m.g, mid, worst.b, worst.depth + 1);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++count;
    }

    // Final sum in left-to-right order so the result does not depend on
    // the running-update rounding history.
    std::vector<Segment> segments;
    segments.reserve(queue.size());
    while (!queue.empty()) {
        segments.push_back(queue.top());
        queue.pop();
    }
    std::sort(segments.begin(), segments.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    QuadratureResult r;
    for (const auto& s : segments) {
        r.value += s.value;
        r.error_estimate += s.error;
    }
    r.subintervals = count;
    return r;
}

QuadratureResult integrate(const RealFunction& f, Interval domain, double rel_tol) {
    QuadratureOptions o;
    o.rel_tol = rel_tol;
    return integrate(f, domain, o);
}

// ---------------------------------------------------------------------------
// Differentiation

double StepPolicy::step(double x) const noexcept { return std::max(abs_min, rel * std::abs(x)); }

Stencil make_stencil(double x, const StepPolicy& policy) {
    const double h = policy.step(x);
    return Stencil{x, h, {x + h, x - h, x + 0.5 * h, x - 0.5 * h, x}};
}

DerivativeEstimate combine_stencil(const Stencil& stencil, const std::array<double, 5>& values) {
    const double h = stencil.step;
    const auto [fp, fm, fph, fmh, f0] = values;

    DerivativeEstimate d;
    const double coarse = (fp - fm) / (2.0 * h);
    const double fine = (fph - fmh) / h;
    d.value = fine + (fine - coarse) / 3.0;
    d.error_estimate = std::abs(d.value - fine);
    if (!std::isfinite(d.value)) {
        d.flagged = true;
        d.error_estimate = kInf;
        return d;
    }

    // One-sided asymmetry shrinks linearly with h for smooth f and stays put at a kink.
    const double asym_coarse = (fp - 2.0 * f0 + fm) / h;
    const double asym_fine = (fph - 2.0 * f0 + fmh) / (0.5 * h);
    const double scale = std::max({std::abs(f0), std::abs(fp), std::abs(fm)});
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * scale / h;
    if (std::abs(asym_fine) > 1e3 * noise && std::abs(asym_fine) > 0.75 * std::abs(asym_coarse)) {
        d.flagged = true;
        d.error_estimate = std::max(d.error_estimate, 0.5 * std::abs(asym_fine));
    }
    return d;
}

DerivativeEstimate differentiate(const RealFunction& f, double x, const StepPolicy& policy) {
    const Stencil st = make_stencil(x, policy);
    std::array<double, 5> values{};
    for (std::size_t k = 0; k < st.points.size(); ++k) {
        try {
            values[k] = f(st.points[k]);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os.precision(17);
            os << "derivative stencil evaluation failed at x=" << st.points[k] << " (center " << x << "): " << e.what();
            throw DomainError(os.str());
        }
    }
    return combine_stencil(st, values);
}

// ---------------------------------------------------------------------------
// Monotonicity

std::string to_string(Direction d) { return d == Direction::Increasing ? "increasing" : "decreasing"; }

MonotoneVerdict monotone_scan(std::span<const double> xs, std::span<const double> values, Direction direction,
                              double slack) {
    if (values.size() < 2) throw ArgumentError("monotone scan needs at least 2 samples");
    if (xs.size() != values.size()) throw ArgumentError("monotone scan: abscissae and values differ in length");
    if (!(slack >= 0.0)) throw ArgumentError("monotone scan: slack must be non-negative");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] < xs[i + 1])) throw ArgumentError("monotone scan: abscissae must be strictly increasing");
    for (double y : values)
        if (std::isnan(y)) throw ArgumentError("monotone scan: NaN sample");

    MonotoneVerdict v;
    v.direction = direction;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double delta = values[i + 1] - values[i];
        const double against = direction == Direction::Increasing ? -delta : delta;
        if (against > v.worst_violation) {
            v.worst_violation = against;
            v.witness = MonotonePair{i, xs[i], xs[i + 1], values[i], values[i + 1], against};
        }
        if (against > slack) v.violations.push_back(MonotonePair{i, xs[i], xs[i + 1], values[i], values[i + 1], against});
    }
    v.pass = v.worst_violation <= slack;
    return v;
}

double bisect_nondecreasing(const RealFunction& g, double target, double lo, double hi, int max_iter) {
    if (g(hi) <= target) return hi;
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (g(mid) <= target)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::vector<double> interior_lattice(double lo, double hi, std::size_t n, double margin) {
    if (n == 0) throw ArgumentError("lattice needs at least one point");
    const double a = lo + margin;
    const double b = hi - margin;
    if (!(a < b)) throw ArgumentError("lattice margin exceeds interval width");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = 0.5 * (a + b);
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = i + 1 == n ? b : a + t * (b - a);
    }
    return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>({hw, n, 8});
    std::vector<std::exception_ptr> errors(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace seqscreen
