#include "seqscreen/errors.hpp"
#include "seqscreen/families.hpp"
#include "seqscreen/regularity.hpp"
#include "seqscreen/transforms.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace seqscreen;
using doctest::Approx;

namespace {

double transformed_hazard(const TransformedModel& tm, double w) {
    const SignalValues s = tm.model.signal().eval(w);
    return s.pdf / s.survival;
}

}  // namespace

TEST_CASE("inverse-hazard integral on the uniform signal") {
    const ScreeningModel u = testing::uniform_logistic();
    const auto phi = make_relabeling(u, RelabelingKind::InverseHazardIntegral);
    CHECK(phi->map(1.0) == Approx(0.5).epsilon(1e-12));
    CHECK(phi->map(0.3) == Approx(0.3 - 0.045).epsilon(1e-12));
    CHECK(phi->derivative(0.3) == Approx(0.7));
    CHECK(phi->codomain().upper == Approx(0.5).epsilon(1e-12));

    const TransformedModel tm = apply_relabeling(u, phi);
    CHECK(transformed_hazard(tm, 0.0) == Approx(1.0).epsilon(1e-10));
    CHECK(transformed_hazard(tm, 0.25) == Approx(2.0).epsilon(1e-9));
    for (double w : {0.05, 0.2, 0.4, 0.49}) CHECK(transformed_hazard(tm, w) == Approx(1.0 / (1.0 - 2.0 * w)).epsilon(1e-8));

    RelabelingParams shifted;
    shifted.w_lower = 3.0;
    CHECK(make_relabeling(u, RelabelingKind::InverseHazardIntegral, shifted)->map(1.0) == Approx(3.5).epsilon(1e-12));
}

TEST_CASE("inverse-hazard integral diverges for beta(2,2)") {
    const ScreeningModel b{make_beta_signal(2, 2), make_additive_noise_kernel(NoiseFamily::Logistic)};
    try {
        make_relabeling(b, RelabelingKind::InverseHazardIntegral);
        FAIL("expected IntegrabilityError");
    } catch (const IntegrabilityError& e) {
        CHECK(std::string(e.what()).find("lower endpoint") != std::string::npos);
    }
    // integrable endpoint singularity (inverse hazard ~ v^-1/2) is accepted
    const ScreeningModel s{make_beta_signal(1.5, 2), make_additive_noise_kernel(NoiseFamily::Logistic)};
    CHECK_NOTHROW(make_relabeling(s, RelabelingKind::InverseHazardIntegral));
}

TEST_CASE("integrated hazard: exponential relabeling") {
    const ScreeningModel u = testing::uniform_logistic();
    const auto phi = make_relabeling(u, RelabelingKind::IntegratedHazard);
    CHECK(phi->map(0.5) == Approx(0.69315).epsilon(1e-5));
    CHECK(phi->map(0.5) == Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(std::isinf(phi->codomain().upper));
    const TransformedModel tm = apply_relabeling(u, phi);
    for (double w : signal_grid(tm.model, GridSpec{})) CHECK(transformed_hazard(tm, w) == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("relabelings invert to 1e-10") {
    const ScreeningModel u = testing::uniform_power(1.0, 2.0);
    RelabelingParams p;
    p.slope = 0.5;
    p.intercept = -1.0;
    for (RelabelingKind k : {RelabelingKind::InverseHazardIntegral, RelabelingKind::IntegratedHazard,
                             RelabelingKind::RunningMaxHazard, RelabelingKind::Mean, RelabelingKind::Affine}) {
        CAPTURE(to_string(k));
        const auto phi = make_relabeling(u, k, p);
        for (double v : {1.001, 1.2, 1.5, 1.77, 1.999}) {
            const double w = phi->map(v);
            CHECK(phi->map(phi->inverse(w)) == Approx(w).epsilon(1e-10));
            CHECK(phi->inverse(w) == Approx(v).epsilon(1e-9));
            CHECK(phi->derivative(v) > 0.0);
        }
    }
}

TEST_CASE("identity affine map leaves evaluators unchanged") {
    const ScreeningModel u = testing::uniform_power(1.0, 2.0);
    const TransformedModel tm = apply_relabeling(u, make_relabeling(u, RelabelingKind::Affine));
    for (double v : {1.1, 1.5, 1.9}) {
        CHECK(tm.model.signal().eval(v).cdf == u.signal().eval(v).cdf);
        CHECK(tm.model.signal().eval(v).pdf == u.signal().eval(v).pdf);
        for (double V : {0.1, 0.5, 0.9}) {
            CHECK(tm.model.kernel().cdf(v, V) == u.kernel().cdf(v, V));
            CHECK(tm.model.kernel().rate(v, V) == u.kernel().rate(v, V));
        }
    }
}

TEST_CASE("affine slope 1/2 doubles gamma; psi is invariant") {
    const ScreeningModel u = testing::uniform_power(1.0, 2.0);
    RelabelingParams p;
    p.slope = 0.5;
    const TransformedModel tm = apply_relabeling(u, make_relabeling(u, RelabelingKind::Affine, p));
    for (double v : {1.1, 1.5, 1.9}) {
        for (double V : {0.05, 0.3, 0.8}) {
            const GammaPsi gp = transformed_gamma_psi(tm, 0.5 * v, V);
            CHECK(gp.gamma == Approx(2.0 * gamma(u, v, V)).epsilon(1e-12));
            CHECK(gp.psi == Approx(virtual_value(u, v, V)).epsilon(1e-12));
        }
    }
}

TEST_CASE("psi invariance at 32 matched points for every kind") {
    const ScreeningModel u = testing::uniform_exp_tilt();
    const auto Vs = value_grid(u, GridSpec{}).points;
    for (RelabelingKind k : {RelabelingKind::IntegratedHazard, RelabelingKind::RunningMaxHazard,
                             RelabelingKind::InverseHazardIntegral, RelabelingKind::Mean}) {
        CAPTURE(to_string(k));
        const TransformedModel tm = apply_relabeling(u, make_relabeling(u, k));
        for (int n = 0; n < 32; ++n) {
            const double v = 0.02 + 0.96 * std::fmod(0.5 + n * 0.6180339887498949, 1.0);
            const double V = Vs[(n * 37) % Vs.size()];
            const double w = tm.relabeling->map(v);
            const GammaPsi gp = transformed_gamma_psi(tm, w, V);
            CHECK(std::abs(gp.psi - virtual_value(u, v, V)) <= 1e-8);
            CHECK(gp.gamma * tm.relabeling->derivative(v) == Approx(gamma(u, v, V)).epsilon(1e-8));
        }
    }
}

TEST_CASE("mean normalization gives E[V|w] = w") {
    const ScreeningModel u = testing::uniform_power(1.0, 2.0);
    const TransformedModel tm = apply_relabeling(u, make_relabeling(u, RelabelingKind::Mean));
    const ToleranceConfig tol;
    for (double w : signal_grid(tm.model, GridSpec{9, 9}))
        CHECK(std::abs(conditional_mean(tm.model, w, tol).value - w) <= 10 * tol.quadrature_rel);
}

TEST_CASE("running-max relabeling achieves A0 with a finite codomain") {
    const ScreeningModel t{make_table_signal(0, 1, {8, 1, 1, 1, 1}), make_additive_noise_kernel(NoiseFamily::Normal)};
    CHECK_FALSE(check_assumption(t, Assumption::A0, GridSpec{}, ToleranceConfig{}).pass);
    const auto phi = make_relabeling(t, RelabelingKind::RunningMaxHazard);
    CHECK(std::isfinite(phi->codomain().upper));
    const TransformedModel tm = apply_relabeling(t, phi);
    CHECK(check_assumption(tm.model, Assumption::A0, GridSpec{}, ToleranceConfig{}).pass);
    // phi' <= 1 up to lattice interpolation
    for (double v : {0.01, 0.1, 0.3, 0.6, 0.9}) CHECK(phi->derivative(v) <= 1.0 + 1e-3);
}

TEST_CASE("tabulated relabeling: Hermite interpolation") {
    // phi(v) = v^3 + v is reproduced exactly by cubic Hermite
    std::vector<RelabelingNode> nodes;
    for (double v : {0.0, 0.4, 1.0}) nodes.push_back({v, v * v * v + v, 3 * v * v + 1});
    const auto phi = make_tabulated_relabeling(nodes, "custom");
    CHECK(phi->origin() == "custom");
    for (double v : {0.1, 0.25, 0.7, 0.95}) {
        CHECK(phi->map(v) == Approx(v * v * v + v).epsilon(1e-14));
        CHECK(phi->derivative(v) == Approx(3 * v * v + 1).epsilon(1e-13));
        CHECK(phi->inverse(phi->map(v)) == Approx(v).epsilon(1e-13));
    }
    CHECK_THROWS_AS(phi->map(1.5), DomainError);
    nodes[1].dphi = 0.0;
    CHECK_THROWS_AS(make_tabulated_relabeling(nodes, "x"), ArgumentError);
    nodes[1].dphi = 1.0;
    nodes[1].w = -1.0;
    CHECK_THROWS_AS(make_tabulated_relabeling(nodes, "x"), ArgumentError);
}

namespace {

// Derivative twice the slope of the map: the identities cannot hold.
class Inconsistent final : public Relabeling {
public:
    RelabelingKind kind() const override { return RelabelingKind::Affine; }
    Interval domain() const override { return {0.0, 1.0}; }
    Interval codomain() const override { return {0.0, 1.0}; }
    double map(double v) const override { return v; }
    double derivative(double) const override { return 2.0; }
    double inverse(double w) const override { return w; }
};

}  // namespace

TEST_CASE("self-check catches an inconsistent relabeling") {
    IdentityCheck ic;
    CHECK_THROWS_AS(apply_relabeling(testing::uniform_logistic(), std::make_shared<Inconsistent>(), GridSpec{}, &ic),
                    SelfCheckError);
    CHECK(ic.worst_hazard_residual > 0.1);
    IdentityCheck ok;
    const ScreeningModel u = testing::uniform_logistic();
    apply_relabeling(u, make_relabeling(u, RelabelingKind::IntegratedHazard), GridSpec{}, &ok);
    CHECK(ok.points == 32);
    CHECK(ok.worst_hazard_residual <= 1e-6);
    CHECK(ok.worst_ratio_residual <= 1e-6);
}

TEST_CASE("relabeling kind names") {
    CHECK(parse_relabeling_kind("integrated-hazard") == RelabelingKind::IntegratedHazard);
    CHECK(parse_relabeling_kind("runningmax_hazard") == RelabelingKind::RunningMaxHazard);
    CHECK_THROWS_AS(parse_relabeling_kind("logit"), ArgumentError);
    const auto lat = relabeling_lattice(testing::uniform_logistic(), GridSpec{5, 5}, 4);
    CHECK(lat.size() == 17);
}
