#include "seqscreen/errors.hpp"
#include "seqscreen/families.hpp"
#include "seqscreen/model.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace seqscreen;
using doctest::Approx;

TEST_CASE("eval_signal oracles") {
    const ScreeningModel u = testing::uniform_logistic();
    auto s = eval_signal(u, 0.5);
    CHECK(s.cdf == Approx(0.5));
    CHECK(s.pdf == Approx(1.0));
    s = eval_signal(u, 1.0);
    CHECK(s.cdf == Approx(1.0));
    CHECK(s.pdf == Approx(1.0));
    CHECK_THROWS_AS(eval_signal(u, 1.5), DomainError);

    const ScreeningModel b{make_beta_signal(2, 2), make_additive_noise_kernel(NoiseFamily::Logistic)};
    s = eval_signal(b, 0.5);
    CHECK(s.cdf == Approx(0.5).epsilon(1e-12));
    CHECK(s.pdf == Approx(1.5).epsilon(1e-12));
    // 3v^2 - 2v^3 and 6v(1-v)
    s = eval_signal(b, 0.2);
    CHECK(s.cdf == Approx(0.104).epsilon(1e-12));
    CHECK(s.pdf == Approx(0.96).epsilon(1e-12));
    CHECK(s.survival == Approx(0.896).epsilon(1e-12));
}

TEST_CASE("eval_kernel oracles") {
    auto k = eval_kernel(testing::uniform_logistic(), 0.5, 0.5);
    CHECK(k.H == Approx(0.5));
    CHECK(k.h == Approx(0.25));
    CHECK(k.dHdv == Approx(-0.25));
    CHECK_FALSE(k.fosd_violation);

    const ScreeningModel p = testing::uniform_power(1.0, 3.0);
    k = eval_kernel(p, 1.0, 0.5);
    CHECK(k.H == Approx(0.5));
    CHECK(k.h == Approx(1.0));
    CHECK(k.dHdv == Approx(-0.34657).epsilon(1e-5));
    k = eval_kernel(p, 2.0, 0.5);
    CHECK(k.H == Approx(0.25));
    CHECK(k.h == Approx(1.0));
    CHECK(k.dHdv == Approx(-0.17329).epsilon(1e-5));
    CHECK_THROWS_AS(eval_kernel(p, 2.0, 1.5), DomainError);
    CHECK_THROWS_AS(eval_kernel(p, 3.5, 0.5), DomainError);

    // exp_tilt: H = (e^{vV} - 1)/(e^v - 1)
    const ScreeningModel e = testing::uniform_exp_tilt();
    k = eval_kernel(e, 1.0, 0.5);
    CHECK(k.H == Approx(0.37754066879814546).epsilon(1e-12));
    CHECK(k.h == Approx(std::exp(0.5) / (std::exp(1.0) - 1.0)).epsilon(1e-12));
    CHECK(k.dHdv < 0.0);
    CHECK(eval_kernel(e, 0.0, 0.3).H == Approx(0.3));
}

TEST_CASE("power kernel needs a positive signal support") {
    CHECK_THROWS_AS(ScreeningModel(make_uniform_signal(0.0, 1.0), make_power_kernel()), ArgumentError);
}

TEST_CASE("additive kernels: dH/dv = -h exactly") {
    for (NoiseFamily f : {NoiseFamily::Normal, NoiseFamily::Logistic, NoiseFamily::Laplace}) {
        const ScreeningModel m = testing::uniform_additive(f, 0.0, 1.0, 0.7);
        for (double V : {-2.0, -0.3, 0.4, 1.0, 3.5}) {
            const auto k = eval_kernel(m, 0.4, V);
            CHECK(k.dHdv == -k.h);
        }
    }
}

TEST_CASE("conditional mean: layer cake, direct route and derivative") {
    const ToleranceConfig tol;
    const ScreeningModel p = testing::uniform_power(0.5, 3.5);
    CHECK(conditional_mean(p, 1.0, tol).value == Approx(0.5).epsilon(1e-10));
    CHECK(conditional_mean(p, 3.0, tol).value == Approx(0.75).epsilon(1e-10));
    CHECK(conditional_mean_derivative(p, 1.0, tol).value == Approx(0.25).epsilon(1e-9));
    CHECK(conditional_mean_derivative(p, 3.0, tol).value == Approx(0.0625).epsilon(1e-9));
    CHECK(conditional_mean_direct(p, 2.0, tol).value == Approx(2.0 / 3.0).epsilon(1e-9));

    for (NoiseFamily f : {NoiseFamily::Normal, NoiseFamily::Logistic, NoiseFamily::Laplace}) {
        const ScreeningModel m = testing::uniform_additive(f);
        for (double v : {0.1, 0.5, 0.9}) {
            CHECK(conditional_mean(m, v, tol).value == Approx(v).epsilon(1e-8));
            CHECK(conditional_mean_direct(m, v, tol).value == Approx(v).epsilon(1e-8));
            CHECK(conditional_mean_derivative(m, v, tol).value == Approx(1.0).epsilon(1e-8));
            CHECK(density_mass(m, v, tol) == Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("integration window follows the tail cut") {
    const ScreeningModel m = testing::uniform_logistic();
    const KernelSection s = m.kernel().section(0.0);
    const Interval w = integration_window(s, m.kernel().support(), 1e-9);
    // logistic quantiles: log(p/(1-p))
    CHECK(w.lower == Approx(std::log(1e-9 / (1 - 1e-9))).epsilon(1e-9));
    // 1 - 1e-9 carries a rounding error of ~1e-16, i.e. ~1e-7 in the quantile
    CHECK(w.upper == Approx(-std::log(1e-9 / (1 - 1e-9))).epsilon(1e-7));
    const Interval bounded = integration_window(testing::uniform_power().kernel().section(1.5), Interval{0, 1}, 1e-9);
    CHECK(bounded.lower == 0.0);
    CHECK(bounded.upper == 1.0);
}

TEST_CASE("value grid: truncation recorded only on infinite sides") {
    const GridSpec g;
    const ValueGrid a = value_grid(testing::uniform_logistic(), g);
    CHECK(a.truncated_lower);
    CHECK(a.truncated_upper);
    CHECK(a.points.size() == g.V_points);
    const ValueGrid b = value_grid(testing::uniform_power(), g);
    CHECK_FALSE(b.truncated_lower);
    CHECK(b.points.front() > 0.0);
    CHECK(b.points.back() < 1.0);
}

TEST_CASE("grid and tolerance validation") {
    GridSpec g;
    g.tail_mass_cut = 0.01;
    CHECK_THROWS_AS(g.validate(), ArgumentError);
    g = GridSpec{};
    g.v_points = 1;
    CHECK_THROWS_AS(g.validate(), ArgumentError);
    ToleranceConfig t;
    t.monotonicity_slack = 0.0;
    CHECK_THROWS_AS(t.validate(), ArgumentError);
}

TEST_CASE("validate_model accepts the builtin families") {
    const GridSpec g;
    const ToleranceConfig t;
    CHECK_NOTHROW(validate_model(testing::uniform_logistic(), g, t));
    CHECK_NOTHROW(validate_model(testing::uniform_power(), g, t));
    CHECK_NOTHROW(validate_model(testing::uniform_exp_tilt(), g, t));
    CHECK_NOTHROW(validate_model({make_beta_signal(2, 5, -1, 2), make_additive_noise_kernel(NoiseFamily::Laplace, 2)}, g, t));
}

TEST_CASE("table signal") {
    const auto flat = make_table_signal(0.0, 2.0, {3.0, 3.0, 3.0});
    CHECK(flat->eval(0.5).cdf == Approx(0.25).epsilon(1e-13));
    CHECK(flat->eval(0.5).pdf == Approx(0.5).epsilon(1e-13));
    // log-linear between nodes: density e^{-x} on [0, 1] sampled at 0, 1
    const auto ex = make_table_signal(0.0, 1.0, {1.0, std::exp(-1.0)});
    const double z = 1.0 - std::exp(-1.0);
    CHECK(ex->eval(0.5).cdf == Approx((1.0 - std::exp(-0.5)) / z).epsilon(1e-13));
    CHECK(ex->eval(0.5).survival == Approx((std::exp(-0.5) - std::exp(-1.0)) / z).epsilon(1e-13));
    CHECK_THROWS_AS(make_table_signal(0.0, 1.0, {1.0, 0.0}), ArgumentError);
}

TEST_CASE("table kernel reproduces its nodes and validates input") {
    const auto logistic = make_additive_noise_kernel(NoiseFamily::Logistic);
    std::vector<double> vn{0.0, 0.5, 1.0}, Vn{-3.0, 0.0, 3.0};
    const auto t = make_table_kernel(tabulate_kernel(*logistic, vn, Vn));
    CHECK(t->cdf(0.5, 0.0) == Approx(logistic->cdf(0.5, 0.0)));
    CHECK(t->pdf(1.0, 0.0) == Approx(logistic->pdf(1.0, 0.0)));
    CHECK(t->rate(0.0, 0.0) == Approx(logistic->rate(0.0, 0.0)));
    CHECK_THROWS_AS(t->cdf(1.5, 0.0), DomainError);

    KernelTable bad;
    bad.v_nodes = {0.0, 1.0};
    bad.V_nodes = {0.0, 1.0};
    bad.H = {0.0, 1.0, 0.6, 0.5};
    CHECK_THROWS_AS(make_table_kernel(bad), ArgumentError);
}
