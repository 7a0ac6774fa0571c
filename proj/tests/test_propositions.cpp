#include "seqscreen/errors.hpp"
#include "seqscreen/families.hpp"
#include "seqscreen/propositions.hpp"
#include "seqscreen/transforms.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace seqscreen;
using doctest::Approx;

namespace {

const NamedCheck* find(const std::vector<NamedCheck>& cs, const std::string& prefix) {
    for (const auto& c : cs)
        if (c.name.rfind(prefix, 0) == 0) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("Delta oracle for the power kernel") {
    const ScreeningModel p = testing::uniform_power(1.0, 2.0);
    // Delta(1.5, -1) = H_1.5(0.5)
    const KernelEval k = eval_kernel(p, 1.5, 0.5);
    CHECK(k.H == Approx(0.35355).epsilon(1e-5));
    CHECK(k.h + k.dHdv == Approx(0.81561).epsilon(1e-5));
    const auto fd = differentiate([&](double v) { return p.kernel().cdf(v, v - 1.0); }, 1.5);
    CHECK(fd.value == Approx(0.81561).epsilon(1e-5));
    CHECK(fd.value == Approx(k.h + k.dHdv).epsilon(1e-8));
}

TEST_CASE("Delta field: cross-check and outside-support convention") {
    const DeltaField d = delta_diagnostic(testing::uniform_power(), GridSpec{});
    CHECK(d.evaluable > 0);
    CHECK(d.worst_residual <= 1e-4);
    std::size_t outside = 0;
    for (const DeltaPoint& pt : d.points) {
        CHECK(pt.delta >= 0.0);
        CHECK(pt.delta <= 1.0);
        if (!pt.evaluable) {
            ++outside;
            CHECK(pt.delta1_fd == 0.0);
            CHECK(pt.delta1_factored == 0.0);
        }
    }
    CHECK(outside > 0);
}

TEST_CASE("Delta field vanishes for additive noise") {
    for (NoiseFamily f : {NoiseFamily::Normal, NoiseFamily::Logistic, NoiseFamily::Laplace}) {
        const DeltaField d = delta_diagnostic(testing::uniform_additive(f), GridSpec{});
        CHECK(d.max_abs_delta1 <= 1e-8);
        for (const DeltaPoint& pt : d.points) CHECK(pt.delta1_factored == 0.0);
    }
}

TEST_CASE("Proposition 1 on the uniform signal flags the constant-hazard claim") {
    const PropositionReport r = verify_prop1(testing::uniform_logistic());
    REQUIRE(r.hypotheses.size() == 1);
    CHECK(r.hypotheses[0].pass);
    CHECK(r.verdict == Verdict::DiscrepancyFlagged);
    CHECK(exit_code(r) == 1);
    const NamedCheck* a0 = find(r.conclusions, "A0 achieved");
    REQUIRE(a0);
    CHECK(a0->pass);
    const NamedCheck* constant = find(r.conclusions, "inverse_hazard_integral yields");
    REQUIRE(constant);
    CHECK_FALSE(constant->pass);
    const NamedCheck* square = find(r.diagnostics, "inverse_hazard_integral: hazard~ equals the squared");
    REQUIRE(square);
    CHECK(square->pass);
    CHECK(find(r.diagnostics, "integrated_hazard: transformed hazard within")->pass);
}

TEST_CASE("Proposition 1 on beta(2,2): hypothesis fails, running max still reported") {
    const ScreeningModel b{make_beta_signal(2, 2), make_additive_noise_kernel(NoiseFamily::Logistic)};
    const PropositionReport r = verify_prop1(b);
    CHECK(r.verdict == Verdict::HypothesisNotSatisfied);
    CHECK(exit_code(r) == 0);
    CHECK(r.conclusions.empty());
    CHECK_FALSE(r.hypotheses[0].pass);
    CHECK(r.hypotheses[0].detail.find("lower endpoint") != std::string::npos);
    const NamedCheck* rm = find(r.diagnostics, "runningmax_hazard: A0");
    REQUIRE(rm);
    CHECK(rm->pass);
}

TEST_CASE("Proposition 2 verdicts") {
    PropositionReport r = verify_prop2(testing::uniform_power());
    CHECK(r.verdict == Verdict::Consistent);
    CHECK_FALSE(find(r.diagnostics, "A1")->pass);
    CHECK(find(r.diagnostics, "A2")->pass);
    CHECK(find(r.diagnostics, "Delta_1")->pass);
    REQUIRE(r.evidence.size() >= 2);
    CHECK(r.evidence[0].rows.size() == 15);

    r = verify_prop2(testing::uniform_exp_tilt());
    CHECK(r.verdict == Verdict::Consistent);
    CHECK(r.conclusions[0].pass);

    r = verify_prop2(testing::uniform_logistic());
    CHECK(r.verdict == Verdict::NotApplicable);
    CHECK(r.summary == "hypothesis not applicable: V_lo = -inf");
    CHECK(exit_code(r) == 0);
}

TEST_CASE("Proposition 3 on additive noise, both directions") {
    for (NoiseFamily f : {NoiseFamily::Normal, NoiseFamily::Logistic, NoiseFamily::Laplace}) {
        CAPTURE(to_string(f));
        const ScreeningModel m = testing::uniform_additive(f);
        for (Prop3Direction d : {Prop3Direction::Forward, Prop3Direction::Converse}) {
            const PropositionReport r = verify_prop3(m, d);
            CAPTURE(r.summary);
            CHECK(r.verdict == Verdict::Consistent);
            for (const auto& c : r.conclusions) CHECK(c.pass);
        }
    }
}

TEST_CASE("Proposition 3: failing hypotheses stop the suite") {
    const ScreeningModel p = testing::uniform_power(1.0, 2.0);
    PropositionReport r = verify_prop3(p, Prop3Direction::Forward);
    CHECK(r.verdict == Verdict::HypothesisNotSatisfied);
    CHECK(r.summary == "hypothesis fail: E[V|v] ≠ v");
    CHECK(r.conclusions.empty());

    const TransformedModel tm = apply_relabeling(p, make_relabeling(p, RelabelingKind::Mean));
    r = verify_prop3(tm.model, Prop3Direction::Converse);
    CHECK(r.hypotheses[0].pass);
    CHECK(r.verdict == Verdict::HypothesisNotSatisfied);
    CHECK(r.summary == "hypothesis (A1∧A2) not satisfied; no conclusion asserted");
    CHECK(r.conclusions.empty());
    r = verify_prop3(tm.model, Prop3Direction::Forward);
    CHECK(r.verdict == Verdict::HypothesisNotSatisfied);
}

TEST_CASE("Eq. (1) style identity: integral of gamma h equals mu'") {
    const ToleranceConfig tol;
    for (const ScreeningModel& m : {testing::uniform_power(), testing::uniform_exp_tilt(), testing::uniform_logistic()}) {
        for (double v : signal_grid(m, GridSpec{9, 9})) {
            const KernelSection s = m.kernel().section(v);
            const Interval win = integration_window(s, m.kernel().support(), 1e-9);
            const double eg = integrate([&](double V) { return -s.rate(V) / s.pdf(V) * s.pdf(V); }, win, 1e-10).value;
            CHECK(eg == Approx(conditional_mean_derivative(m, v, tol).value).epsilon(1e-9));
        }
    }
}
