#include <cmath>
#include <numbers>

#include "doctest.h"
#include "emscat/errors.hpp"
#include "emscat/linalg.hpp"
#include "emscat/quadrature.hpp"

using namespace emscat;
using std::numbers::pi;

TEST_CASE("finite intervals reproduce elementary integrals") {
  QuadOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-14;
  CHECK(integrate([](double t) { return std::sin(t); }, 0.0, pi, o).value == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(integrate([](double t) { return std::exp(t); }, -1.0, 2.0, o).value ==
        doctest::Approx(std::exp(2.0) - std::exp(-1.0)).epsilon(1e-14));
  CHECK(integrate([](double t) { return std::sqrt(t); }, 0.0, 1.0, o).value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("reversed bounds flip the sign and equal bounds give zero") {
  auto f = [](double t) { return t * t; };
  CHECK(integrate(f, 1.0, 0.0).value == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(integrate(f, 0.5, 0.5).value == 0.0);
}

TEST_CASE("infinite ranges with algebraic tails") {
  QuadOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-13;
  const double inf = HUGE_VAL;
  CHECK(integrate([](double t) { return 1.0 / (1.0 + t * t); }, -inf, inf, o).value ==
        doctest::Approx(pi).epsilon(1e-12));
  CHECK(integrate([](double t) { return std::pow(1.0 + t * t, -1.5); }, -inf, inf, o).value ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(integrate([](double t) { return 1.0 / (1.0 + t * t); }, 0.0, inf, o).value ==
        doctest::Approx(pi / 2).epsilon(1e-12));
  CHECK(integrate([](double t) { return std::exp(t); }, -inf, 0.0, o).value == doctest::Approx(1.0).epsilon(1e-12));
  o.center = 40.0;
  o.scale = 0.5;
  CHECK(integrate([](double t) { return std::exp(-(t - 40.0) * (t - 40.0)); }, -inf, inf, o).value ==
        doctest::Approx(std::sqrt(pi)).epsilon(1e-12));
}

TEST_CASE("vector-valued integrands converge per component") {
  QuadOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-13;
  auto f = [](double t) {
    Vec v(3);
    v << std::cos(t), t, 1.0 / (1.0 + t * t);
    return v;
  };
  const Vec r = integrate(f, 0.0, 1.0, o).value;
  CHECK(r(0) == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
  CHECK(r(1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r(2) == doctest::Approx(pi / 4).epsilon(1e-14));
}

TEST_CASE("cancelling integrands stop at the round-off floor") {
  QuadOptions o;
  o.abs_tol = 0.0;
  o.rel_tol = 0.0;
  const auto r = integrate([](double t) { return std::sin(t); }, -3.0, 3.0, o);
  CHECK(r.converged);
  CHECK(std::abs(r.value) < 1e-13);
}

TEST_CASE("non-convergence throws unless disabled") {
  QuadOptions o;
  o.abs_tol = 1e-16;
  o.rel_tol = 0.0;
  o.max_intervals = 10;
  auto f = [](double t) { return std::sin(1.0 / t); };
  CHECK_THROWS_AS(integrate(f, 1e-6, 1.0, o), Error);
  o.throw_on_failure = false;
  CHECK_FALSE(integrate(f, 1e-6, 1.0, o).converged);
  CHECK_THROWS_AS(integrate(f, NAN, 1.0), Error);
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 16, 48}) {
    const GaussRule g = gauss_legendre(n, -1.0, 3.0);
    CHECK(g.nodes.size() == static_cast<std::size_t>(n));
    double sum_w = 0.0, moment = 0.0;
    for (int i = 0; i < n; ++i) {
      sum_w += g.weights[i];
      moment += g.weights[i] * std::pow(g.nodes[i], 2 * n - 1);
    }
    CHECK(sum_w == doctest::Approx(4.0).epsilon(1e-13));
    const double exact = (std::pow(3.0, 2 * n) - 1.0) / (2 * n);
    CHECK(moment == doctest::Approx(exact).epsilon(1e-11));
    for (int i = 1; i < n; ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
  }
  CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), Error);
}
