#include <cmath>

#include "doctest.h"
#include "emscat/bounds.hpp"
#include "emscat/errors.hpp"

using namespace emscat;

namespace {

// Reference point; expected values are high-precision evaluations of the
// closed-form bounds (40 digits, rounded to double).
BoundParams reference() {
  BoundParams p;
  p.c = 1.3;
  p.d = 3;
  p.alpha = 2.5;
  p.beta0 = 2e-8;
  p.beta1 = 3e-8;
  p.beta2 = 4e-8;
  p.r = 0.3;
  p.x_norm = 1.7;
  p.v_norm = 1.2;
  p.T = -0.8;
  return p;
}

constexpr double kTol = 1e-12;

}  // namespace

TEST_CASE("speed thresholds match the reference values") {
  const BoundParams p = reference();
  CHECK(threshold_z1(p) == doctest::Approx(0.42427043395808515).epsilon(kTol));
  CHECK(threshold_z(p) == doctest::Approx(1.295160656280491).epsilon(kTol));
  CHECK(threshold_z2(p) == doctest::Approx(0.00047581922090772993).epsilon(1e-10));
}

TEST_CASE("operator bounds match the reference values") {
  const OperatorBounds b = operator_bounds(reference());
  CHECK(b.rho == doctest::Approx(1.0578102629722896e-5).epsilon(kTol));
  CHECK(b.rho_T == doctest::Approx(4.0271605187487547e-6).epsilon(kTol));
  CHECK(b.lambda == doctest::Approx(1.5748667634759514).epsilon(kTol));
  CHECK(b.lambda_T == doctest::Approx(8.3292965539560578e-5).epsilon(kTol));
  CHECK(b.mu == doctest::Approx(5.2495558782531714).epsilon(kTol));
  CHECK(b.mu_T == doctest::Approx(0.00027764321846520193).epsilon(kTol));
  CHECK(mu_bound(reference()) == doctest::Approx(b.mu).epsilon(1e-15));
}

TEST_CASE("envelopes match the reference values") {
  const Envelopes e = envelopes(reference(), -2.5, 3.5);
  CHECK(e.zeta_minus == doctest::Approx(1.5217884358631061e-7).epsilon(kTol));
  CHECK(e.xi_minus == doctest::Approx(6.609155512539804e-7).epsilon(kTol));
  CHECK(e.zeta_plus == doctest::Approx(1.0648964961960319e-7).epsilon(kTol));
  CHECK(e.xi_plus == doctest::Approx(5.3347963087361345e-7).epsilon(kTol));
  CHECK(zeta_minus(reference(), -2.5) == e.zeta_minus);
  CHECK(xi_plus(reference(), 3.5) == e.xi_plus);
}

TEST_CASE("proximity constants match the reference values") {
  const ProximityConstants e = proximity_constants(reference());
  CHECK(e.eps_a_prime == doctest::Approx(2.233688470019345e-10).epsilon(kTol));
  CHECK(e.eps_a == doctest::Approx(2.014451836263616e-10).epsilon(kTol));
  CHECK(e.eps_b == doctest::Approx(1.0758023602917771e-5).epsilon(kTol));
}

TEST_CASE("asymptotic constants match the reference values") {
  const Theorem1Constants t = theorem1_constants(reference(), 0.25);
  CHECK(t.s1 == doctest::Approx(1.295160656280491).epsilon(kTol));
  CHECK(t.s2 == doctest::Approx(1.295160656280491).epsilon(kTol));
  CHECK(t.C1 == doctest::Approx(5.9547921938078152e-10).epsilon(kTol));
  CHECK(t.C2_explicit == doctest::Approx(0.00016907482509455007).epsilon(kTol));
  CHECK(t.C_fit == 0.25);
  CHECK(t.C2 == doctest::Approx(0.25 + t.C2_explicit).epsilon(1e-15));
  CHECK_FALSE(t.trivial);
}

TEST_CASE("threshold roots solve their equations") {
  const BoundParams p = reference();
  const double z1 = threshold_z1(p), z2 = threshold_z2(p);
  CHECK(std::abs(z1_equation(p, z1)) < 1e-12);
  CHECK(std::abs(z2_equation(p, z2)) < 1e-12);
  BoundParams q = p;
  q.v_norm = threshold_z(p);
  CHECK(mu_bound(q) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(z1_equation(p, 0.5 * (z1 + p.c)) > 0.0);
}

TEST_CASE("bounds decrease with speed and with |x|") {
  BoundParams p = reference();
  double prev_mu = HUGE_VAL, prev_rho = HUGE_VAL;
  for (double v : {0.6, 0.8, 1.0, 1.2}) {
    p.v_norm = v;
    const OperatorBounds b = operator_bounds(p);
    CHECK(b.mu < prev_mu);
    CHECK(b.rho < prev_rho);
    prev_mu = b.mu;
    prev_rho = b.rho;
  }
  p = reference();
  double prev = HUGE_VAL;
  for (double x : {0.0, 1.0, 3.0, 10.0}) {
    p.x_norm = x;
    const double m = mu_bound(p);
    CHECK(m < prev);
    prev = m;
  }
}

TEST_CASE("finite-horizon bounds grow towards the infinite horizon") {
  BoundParams p = reference();
  double prev = 0.0;
  for (double T : {-100.0, -10.0, -1.0, 0.0}) {
    p.T = T;
    const OperatorBounds b = operator_bounds(p);
    CHECK(b.rho_T > prev);
    CHECK(b.rho_T <= b.rho);
    CHECK(b.mu_T <= b.mu);
    prev = b.rho_T;
  }
  p.T = 1.0;
  CHECK(std::isnan(operator_bounds(p).rho_T));
}

TEST_CASE("envelopes decay away from the closest approach") {
  const BoundParams p = reference();
  CHECK(zeta_minus(p, -10.0) < zeta_minus(p, -1.0));
  CHECK(xi_plus(p, 10.0) < xi_plus(p, 1.0));
  CHECK(zeta_minus(p, 0.0) == doctest::Approx(zeta_plus(p, 0.0)).epsilon(1e-15));
  CHECK_THROWS_AS(zeta_minus(p, 1.0), Error);
  CHECK_THROWS_AS(xi_plus(p, -1.0), Error);
}

TEST_CASE("zero decay constants give trivial constants") {
  BoundParams p = reference();
  p.beta0 = p.beta1 = p.beta2 = 0.0;
  const Theorem1Constants t = theorem1_constants(p);
  CHECK(t.trivial);
  CHECK(t.C1 == 0.0);
  CHECK(t.C2 == 0.0);
}

TEST_CASE("invalid parameters are rejected") {
  BoundParams p = reference();
  p.r = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);
  p = reference();
  p.alpha = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = reference();
  p.v_norm = 0.3;  // below sqrt(2) r
  CHECK_THROWS_AS(p.validate_speed(), Error);
  p.v_norm = 1.3;
  CHECK_THROWS_AS(p.validate_speed(), Error);
}

TEST_CASE("radius choices are optimal on a scan") {
  BoundParams p = reference();
  p.beta1 = p.beta2 = 1e-12;
  const double r = best_contraction_radius(p);
  p.r = r;
  const double best = mu_bound(p);
  for (double s : {0.5, 0.8, 1.25, 2.0}) {
    BoundParams q = p;
    q.r = r * s;
    if (q.r >= std::min(1.0, q.c / std::sqrt(2.0)) || std::sqrt(2.0) * q.r >= q.v_norm) continue;
    CHECK(mu_bound(q) >= best * (1.0 - 1e-6));
  }
  BoundParams t = reference();
  const double rt = best_threshold_radius(t);
  t.r = rt;
  const Theorem1Constants at = theorem1_constants(t);
  for (double s : {0.5, 0.8, 1.25}) {
    BoundParams q = t;
    q.r = rt * s;
    try {
      const Theorem1Constants other = theorem1_constants(q);
      CHECK(other.s1 >= at.s1 * (1.0 - 1e-6));
    } catch (const Error&) {
    }
  }
}

TEST_CASE("constant set bundles the pieces consistently") {
  const BoundParams p = reference();
  const ConstantSet s = constant_set(p, 0.1);
  CHECK(s.z1 == threshold_z1(p));
  CHECK(s.ops.mu == operator_bounds(p).mu);
  CHECK(s.zeta_minus0 == doctest::Approx(zeta_minus(p, 0.0)));
  CHECK(s.eps.eps_b == proximity_constants(p).eps_b);
  CHECK(s.thm.C_fit == 0.1);
}
