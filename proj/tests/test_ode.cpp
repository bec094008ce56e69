#include <doctest.h>

#include <cmath>

#include "vecctl/ode.hpp"

using namespace vecctl;

TEST_SUITE("ode") {
  TEST_CASE("exponential decay to tolerance") {
    Tolerances<1> tol{1e-10, {1e-12}};
    IntegrationStats stats;
    const auto y = integrate_dp5<1>([](double, const Vec<1>& v) { return Vec<1>{-0.7 * v[0]}; }, 0.0, 10.0,
                                    Vec<1>{2.0}, tol, nullptr, &stats);
    CHECK(y[0] == doctest::Approx(2.0 * std::exp(-7.0)).epsilon(1e-8));
    CHECK(stats.accepted > 0);
  }

  TEST_CASE("harmonic oscillator and dense output between steps") {
    Tolerances<2> tol{1e-10, {1e-10, 1e-10}};
    std::vector<DenseStep<2>> dense;
    auto rhs = [](double, const Vec<2>& v) { return Vec<2>{v[1], -v[0]}; };
    const auto y = integrate_dp5<2>(rhs, 0.0, 20.0, Vec<2>{1.0, 0.0}, tol, &dense);
    CHECK(y[0] == doctest::Approx(std::cos(20.0)).epsilon(1e-7));
    REQUIRE(dense.size() > 2);
    CHECK(dense.front().t0 == 0.0);
    CHECK(dense.back().t1() == doctest::Approx(20.0).epsilon(1e-15));
    double worst = 0.0;
    for (const auto& s : dense) {
      for (double f : {0.25, 0.5, 0.75}) {
        const double t = s.t0 + f * s.h;
        worst = std::max(worst, std::abs(s(t)[0] - std::cos(t)));
      }
    }
    CHECK(worst < 1e-7);
  }

  TEST_CASE("empty interval returns the input; reversed interval is rejected") {
    Tolerances<1> tol{1e-8, {1e-8}};
    auto rhs = [](double, const Vec<1>& v) { return v; };
    CHECK(integrate_dp5<1>(rhs, 3.0, 3.0, Vec<1>{5.0}, tol)[0] == 5.0);
    CHECK_THROWS_AS(integrate_dp5<1>(rhs, 3.0, 2.0, Vec<1>{5.0}, tol), ValidationError);
  }

  TEST_CASE("finite-time blow-up is a numerical failure") {
    Tolerances<1> tol{1e-8, {1e-8}};
    auto rhs = [](double, const Vec<1>& v) { return Vec<1>{v[0] * v[0]}; };
    CHECK_THROWS_AS(integrate_dp5<1>(rhs, 0.0, 2.0, Vec<1>{1.0}, tol), NumericalError);
  }
}
