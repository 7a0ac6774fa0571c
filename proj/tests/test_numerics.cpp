#include "seqscreen/errors.hpp"
#include "seqscreen/numerics.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>

using namespace seqscreen;

TEST_CASE("integrate: bounded and unbounded oracles") {
    CHECK(integrate([](double) { return 1.0; }, Interval{0, 1}, 1e-10).value == doctest::Approx(1.0).epsilon(1e-12));
    // int_0^1 -log(V) V dV = 1/4
    auto r = integrate([](double x) { return -std::log(x) * x; }, Interval{0, 1}, 1e-10);
    CHECK(r.value == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(r.error_estimate <= 1e-10 * 0.25 + 1e-13);

    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    auto normal = [c](double x) { return c * std::exp(-0.5 * x * x); };
    CHECK(integrate(normal, Interval{-kInf, kInf}, 1e-10).value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate(normal, Interval{0.0, kInf}, 1e-10).value == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(integrate(normal, Interval{-kInf, 0.0}, 1e-10).value == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(integrate([](double x) { return std::exp(-x); }, Interval{2.0, kInf}, 1e-10).value ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
}

TEST_CASE("integrate: kinks and reversed sign") {
    auto r = integrate([](double x) { return std::abs(x - 0.3); }, Interval{0, 1}, 1e-10);
    CHECK(r.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-10));
    CHECK(integrate([](double x) { return std::sin(x); }, Interval{0, std::numbers::pi}, 1e-12).value ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("integrate: divergence and bad values raise QuadratureError") {
    bool threw = false;
    try {
        integrate([](double x) { return 1.0 / x; }, Interval{0, 1}, 1e-10);
    } catch (const QuadratureError& e) {
        threw = true;
        CHECK(e.partial_value() > 0.0);
    }
    CHECK(threw);
    CHECK_THROWS_AS(integrate([](double) { return std::nan(""); }, Interval{0, 1}, 1e-10), QuadratureError);
    CHECK_THROWS_AS(make_interval(1.0, 1.0), ArgumentError);
}

TEST_CASE("differentiate: smooth functions and kinks") {
    auto d = differentiate([](double x) { return x * x; }, 3.0);
    CHECK(d.value == doctest::Approx(6.0).epsilon(1e-9));
    CHECK_FALSE(d.flagged);
    CHECK(differentiate([](double x) { return std::exp(x); }, 1.0).value ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-9));
    CHECK(differentiate([](double x) { return std::abs(x); }, 0.0).flagged);
    CHECK_THROWS_AS(differentiate([](double x) -> double {
                        if (x > 1.0) throw DomainError("outside");
                        return x;
                    }, 1.0),
                    DomainError);
}

TEST_CASE("step policy") {
    StepPolicy p;
    CHECK(p.step(0.0) == 1e-5);
    CHECK(p.step(1000.0) == doctest::Approx(1e-2));
}

TEST_CASE("monotone_scan") {
    std::vector<double> xs{0, 1, 2, 3};
    auto up = monotone_scan(xs, std::vector<double>{0, 1, 1, 2}, Direction::Increasing, 1e-8);
    CHECK(up.pass);
    CHECK(up.worst_violation == 0.0);

    auto bad = monotone_scan(xs, std::vector<double>{0, 1, 0.5, 2}, Direction::Increasing, 1e-8);
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst_violation == doctest::Approx(0.5));
    CHECK(bad.witness.index == 1);
    CHECK(bad.witness.x0 == 1.0);
    CHECK(bad.witness.x1 == 2.0);
    REQUIRE(bad.violations.size() == 1);

    // slack absorbs small wiggles
    CHECK(monotone_scan(xs, std::vector<double>{0, 1, 1 - 1e-9, 2}, Direction::Increasing, 1e-8).pass);
    CHECK_FALSE(monotone_scan(xs, std::vector<double>{0, 1, 1 - 1e-7, 2}, Direction::Increasing, 1e-8).pass);
    CHECK(monotone_scan(xs, std::vector<double>{3, 2, 2, 1}, Direction::Decreasing, 0.0).pass);

    CHECK_THROWS_AS(monotone_scan(std::vector<double>{0}, std::vector<double>{0}, Direction::Increasing, 0), ArgumentError);
    CHECK_THROWS_AS(monotone_scan(std::vector<double>{0, 0}, std::vector<double>{0, 1}, Direction::Increasing, 0),
                    ArgumentError);
    CHECK_THROWS_AS(monotone_scan(xs, std::vector<double>{0, 1}, Direction::Increasing, 0), ArgumentError);
}

TEST_CASE("bisect_nondecreasing") {
    const double x = bisect_nondecreasing([](double t) { return t * t * t; }, 2.0, 0.0, 2.0);
    CHECK(x == doctest::Approx(std::cbrt(2.0)).epsilon(1e-15));
    CHECK(bisect_nondecreasing([](double t) { return t; }, 5.0, 0.0, 1.0) == 1.0);
}

TEST_CASE("interior_lattice") {
    auto g = interior_lattice(0.0, 1.0, 5, 0.1);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == doctest::Approx(0.1));
    CHECK(g.back() == doctest::Approx(0.9));
    CHECK(g[2] == doctest::Approx(0.5));
    CHECK(interior_lattice(0.0, 1.0, 1, 0.1)[0] == doctest::Approx(0.5));
}

TEST_CASE("parallel_for visits each index once and reports the first failure") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    bool threw = false;
    try {
        parallel_for(100, [](std::size_t i) {
            if (i == 17 || i == 80) throw DomainError("index " + std::to_string(i));
        });
    } catch (const DomainError& e) {
        threw = true;
        CHECK(std::string(e.what()) == "index 17");
    }
    CHECK(threw);
}
