#include "seqscreen/errors.hpp"
#include "seqscreen/families.hpp"
#include "seqscreen/regularity.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace seqscreen;
using doctest::Approx;

TEST_CASE("hazard oracles") {
    const ScreeningModel u = testing::uniform_logistic();
    CHECK(hazard(u, 0.5).hazard == Approx(2.0));
    CHECK(hazard(u, 0.5).inverse_hazard == Approx(0.5));
    CHECK(hazard(u, 0.9).hazard == Approx(10.0));
    CHECK(hazard(u, 0.9).inverse_hazard == Approx(0.1));
    CHECK_THROWS_AS(hazard(u, 1.0), DomainError);

    const ScreeningModel b{make_beta_signal(2, 2), make_additive_noise_kernel(NoiseFamily::Logistic)};
    CHECK(hazard(b, 0.5).hazard == Approx(3.0).epsilon(1e-12));
    CHECK(hazard(b, 0.5).inverse_hazard == Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("gamma and virtual value oracles") {
    const ScreeningModel p = testing::uniform_power(1.0, 2.0);
    CHECK(gamma(p, 1.0, 0.5) == Approx(0.34657).epsilon(1e-5));
    CHECK(gamma(p, 2.0, 0.5) == Approx(0.17329).epsilon(1e-5));
    CHECK(gamma(p, 1.5, 0.5) == Approx(-0.5 * std::log(0.5) / 1.5).epsilon(1e-12));
    // inverse hazard 0.5, gamma 0.23105
    CHECK(virtual_value(p, 1.5, 0.5) == Approx(0.38448).epsilon(1e-5));

    const ScreeningModel u = testing::uniform_logistic();
    CHECK(gamma(u, 0.5, 2.0) == Approx(1.0));
    CHECK(virtual_value(u, 0.5, 2.0) == Approx(1.5));
    CHECK(virtual_value(u, 0.9999, 2.0) == Approx(2.0).epsilon(1e-3));
}

TEST_CASE("gamma refuses vanishing densities") {
    const ScreeningModel n = testing::uniform_additive(NoiseFamily::Normal);
    CHECK_THROWS_AS(gamma(n, 0.5, 60.0), DensityUnderflowError);
}

TEST_CASE("additive logistic passes every check") {
    const auto rep = regularity_report(testing::uniform_logistic(), GridSpec{}, ToleranceConfig{});
    for (const auto& c : rep.checks) {
        CAPTURE(to_string(c.id));
        CHECK(c.pass);
        CHECK(c.witnesses.empty());
    }
    CHECK(rep.es_regular);
    CHECK(rep.psi_regular);
    CHECK(rep.get(Assumption::FOSD).min_value == Approx(1.0));
    CHECK(rep.get(Assumption::A0).grid.truncated_lower);
}

TEST_CASE("power kernel: A1 fails below 1/e, A2 passes") {
    const GridSpec g;
    const auto rep = regularity_report(testing::uniform_power(), g, ToleranceConfig{});
    const CheckReport& a1 = rep.get(Assumption::A1);
    CHECK_FALSE(a1.pass);
    REQUIRE_FALSE(a1.witnesses.empty());
    const double spacing = (a1.grid.V_last - a1.grid.V_first) / static_cast<double>(g.V_points - 1);
    for (const Witness& w : a1.witnesses) {
        CHECK(w.axis == "V");
        CHECK(w.V0 < std::exp(-1.0) + spacing);
        CHECK(w.V1 < std::exp(-1.0) + spacing);
        CHECK(w.value1 < w.value0);
    }
    for (std::size_t k = 1; k < a1.witnesses.size(); ++k)
        CHECK(a1.witnesses[k - 1].magnitude >= a1.witnesses[k].magnitude);
    CHECK(rep.get(Assumption::A2).pass);
    CHECK(rep.get(Assumption::FOSD).pass);
    CHECK(rep.get(Assumption::A0).pass);
    CHECK_FALSE(rep.es_regular);
    CHECK(rep.tail_bound.declared);
    CHECK(rep.tail_bound.samples == 64);
    CHECK(rep.tail_bound.pass);
}

TEST_CASE("beta(2,2) hazard is increasing; decreasing-hazard table signal fails A0") {
    const ScreeningModel b{make_beta_signal(2, 2), make_additive_noise_kernel(NoiseFamily::Logistic)};
    CHECK(check_assumption(b, Assumption::A0, GridSpec{}, ToleranceConfig{}).pass);
    const ScreeningModel t{make_table_signal(0, 1, {8, 1, 1, 1, 1}), make_additive_noise_kernel(NoiseFamily::Normal)};
    const CheckReport a0 = check_assumption(t, Assumption::A0, GridSpec{}, ToleranceConfig{});
    CHECK_FALSE(a0.pass);
    REQUIRE_FALSE(a0.witnesses.empty());
    CHECK(std::isnan(a0.witnesses.front().V0));
}

TEST_CASE("table kernel clone of the logistic gives the analytic verdicts") {
    std::vector<double> vn, Vn;
    for (int i = 0; i <= 16; ++i) vn.push_back(i / 16.0);
    for (int j = 0; j <= 400; ++j) Vn.push_back(-25.0 + 50.0 * j / 400.0);
    const auto logistic = make_additive_noise_kernel(NoiseFamily::Logistic);
    const ScreeningModel analytic{make_uniform_signal(0, 1), logistic};
    const ScreeningModel table{make_uniform_signal(0, 1), make_table_kernel(tabulate_kernel(*logistic, vn, Vn))};
    const auto a = regularity_report(analytic, GridSpec{}, ToleranceConfig{});
    const auto b = regularity_report(table, GridSpec{}, ToleranceConfig{});
    for (Assumption x : kAllAssumptions) {
        CAPTURE(to_string(x));
        CHECK(a.get(x).pass == b.get(x).pass);
    }
    CHECK(b.es_regular);
}

TEST_CASE("virtual value identity and gamma positivity on the grid") {
    for (const ScreeningModel& m : {testing::uniform_power(), testing::uniform_exp_tilt(), testing::uniform_logistic()}) {
        const GridEvaluation e = evaluate_grid(m, GridSpec{33, 33});
        for (std::size_t i = 0; i < e.vs.size(); ++i) {
            for (std::size_t j = 0; j < e.Vs().size(); ++j) {
                REQUIRE(e.ok(i, j));
                CHECK(e.psi(i, j) + e.inverse_hazard(i) * e.gamma(i, j) == Approx(e.Vs()[j]).epsilon(1e-14));
                CHECK(e.gamma(i, j) > 0.0);
            }
        }
    }
}

namespace {

// Density undefined on the upper half of the value support.
class HalfBroken final : public ValuationKernel {
public:
    std::string family() const override { return "half_broken"; }
    Interval support() const override { return {0.0, 1.0}; }
    double cdf(double, double V) const override { return V; }
    double pdf(double, double V) const override {
        if (V > 0.5) throw DomainError("no density here");
        return 1.0;
    }
};

}  // namespace

TEST_CASE("evaluation failures beyond 1% abort the report and name the region") {
    const ScreeningModel m{make_uniform_signal(0, 1), std::make_shared<HalfBroken>()};
    try {
        evaluate_grid(m, GridSpec{});
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("failing region") != std::string::npos);
        CHECK(msg.find("V in [0.50") != std::string::npos);
    }
}

TEST_CASE("assumption names round-trip") {
    for (Assumption a : kAllAssumptions) CHECK(parse_assumption(to_string(a)) == a);
    CHECK_THROWS_AS(parse_assumption("A3"), ArgumentError);
}
