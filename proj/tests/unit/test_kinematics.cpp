#include <cmath>
#include <random>

#include "doctest.h"
#include "emscat/errors.hpp"
#include "emscat/fields.hpp"
#include "emscat/kinematics.hpp"

using namespace emscat;

namespace {

Vec random_vec(std::mt19937_64& rng, int d, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = n(rng);
  return v;
}

// Distance from the origin to the segment [x, y].
double segment_distance(const Vec& x, const Vec& y) {
  const Vec e = x - y;
  const double ee = e.squaredNorm();
  double t = ee > 0.0 ? -y.dot(e) / ee : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (t * x + (1.0 - t) * y).norm();
}

}  // namespace

TEST_CASE("lorentz factor and bound damping match closed forms") {
  CHECK(lorentz_factor(0.6, 1.0) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(lorentz_factor(1.5, 2.0) == doctest::Approx(1.5118578920369089089).epsilon(1e-15));
  CHECK(bound_damping(0.6, 1.0) == doctest::Approx(0.93632917756904451155).epsilon(1e-15));
  CHECK(bound_damping(1.5, 2.0) == doctest::Approx(0.86991767240168006415).epsilon(1e-15));
  CHECK_THROWS_AS(lorentz_factor(1.0, 1.0), Error);
}

TEST_CASE("impulse and velocity maps are inverse to each other") {
  std::mt19937_64 rng(7);
  for (int d : {2, 3, 5}) {
    for (int k = 0; k < 200; ++k) {
      const double c = std::exp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
      Vec v = random_vec(rng, d, 1.0);
      v *= c * std::uniform_real_distribution<double>(0.0, 0.999)(rng) / v.norm();
      const Vec p = impulse_from_velocity(v, c);
      CHECK((velocity_from_impulse(p, c) - v).norm() <= 1e-13 * c);
    }
  }
}

TEST_CASE("velocity map stays inside the speed of light") {
  Vec p(3);
  p << 1e8, -3e8, 2e8;
  CHECK(velocity_from_impulse(p, 2.0).norm() < 2.0);
  Vec v(2);
  v << 1.0, 0.0;
  CHECK_THROWS_AS(impulse_from_velocity(v, 1.0), Error);
}

TEST_CASE("velocity increment is accurate for tiny impulse changes") {
  Vec p(2), dp(2);
  p << 3.0, -1.0;
  dp << 1e-12, 2e-12;
  const double c = 1.0;
  const Vec inc = velocity_increment(p, dp, c);
  const Vec lin = velocity_jacobian(p, c) * dp;
  CHECK((inc - lin).norm() <= 1e-10 * lin.norm());
  Vec big(2);
  big << 0.5, 0.7;
  CHECK((velocity_increment(p, big, c) - (velocity_from_impulse(p + big, c) - velocity_from_impulse(p, c))).norm() <=
        1e-15);
}

TEST_CASE("velocity jacobian matches central differences") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const Vec p = random_vec(rng, 3, 2.0);
    const double c = 1.7;
    const Mat j = velocity_jacobian(p, c);
    const double h = 1e-6;
    for (int l = 0; l < 3; ++l) {
      Vec pp = p, pm = p;
      pp(l) += h;
      pm(l) -= h;
      const Vec col = (velocity_from_impulse(pp, c) - velocity_from_impulse(pm, c)) / (2.0 * h);
      CHECK((j.col(l) - col).norm() <= 1e-8);
    }
  }
}

TEST_CASE("gradient rows of the velocity map obey the growth bound") {
  std::mt19937_64 rng(21);
  for (int d : {2, 3, 4}) {
    for (int k = 0; k < 500; ++k) {
      const double c = std::exp(std::uniform_real_distribution<double>(-1.5, 1.5)(rng));
      const Vec x = random_vec(rng, d, std::pow(10.0, std::uniform_real_distribution<double>(-2.0, 2.0)(rng)));
      const Mat j = velocity_jacobian(x, c);
      const double rhs = 1.0 / (1.0 + x.squaredNorm() / (c * c));
      for (int i = 0; i < d; ++i) CHECK(j.row(i).squaredNorm() <= rhs * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("velocity map is Lipschitz with the segment weight") {
  std::mt19937_64 rng(22);
  for (int d : {2, 3, 4}) {
    for (int k = 0; k < 500; ++k) {
      const double c = std::exp(std::uniform_real_distribution<double>(-1.5, 1.5)(rng));
      const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-2.0, 2.0)(rng));
      const Vec x = random_vec(rng, d, scale), y = random_vec(rng, d, scale);
      const double dist = segment_distance(x, y);
      const double weight = 1.0 / std::sqrt(1.0 + dist * dist / (c * c));
      const double lhs = (velocity_from_impulse(x, c) - velocity_from_impulse(y, c)).norm();
      CHECK(lhs <= std::sqrt(double(d)) * weight * (x - y).norm() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("gradient rows of the velocity map are Lipschitz with the squared segment weight") {
  std::mt19937_64 rng(23);
  for (int d : {2, 3, 4}) {
    for (int k = 0; k < 500; ++k) {
      const double c = std::exp(std::uniform_real_distribution<double>(-1.5, 1.5)(rng));
      const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-2.0, 2.0)(rng));
      const Vec x = random_vec(rng, d, scale), y = random_vec(rng, d, scale);
      const double dist = segment_distance(x, y);
      const double weight = 1.0 / (1.0 + dist * dist / (c * c));
      const Mat jx = velocity_jacobian(x, c), jy = velocity_jacobian(y, c);
      for (int i = 0; i < d; ++i) {
        const double lhs = (jx.row(i) - jy.row(i)).norm();
        CHECK(lhs <= 3.0 * std::sqrt(double(d)) / c * weight * (x - y).norm() * (1.0 + 1e-12) + 1e-15);
      }
    }
  }
}

TEST_CASE("force combines the potential gradient and the magnetic term") {
  // V = v0 (1 + |x|^2)^(-alpha/2): grad V = -alpha v0 x (1 + |x|^2)^(-alpha/2 - 1).
  const double v0 = 0.3, alpha = 2.5;
  const FieldPtr f = make_inverse_power_field(2, v0, alpha, Vec::Zero(2));
  Vec x(2), v(2);
  x << 0.4, -1.1;
  v << 0.2, 0.5;
  const double q = 1.0 + x.squaredNorm();
  const Vec expected = alpha * v0 * x * std::pow(q, -alpha / 2.0 - 1.0);
  CHECK((force(x, v, *f, 1.0) - expected).norm() <= 1e-15);

  // Radial magnetic field: B_12 = b0 (2 xi + 2 |x|^2 xi'), xi(t) = (1 + t)^(-sigma).
  const double b0 = 0.7, sigma = 2.0, c = 1.5;
  const FieldPtr m = make_radial_magnetic_field(b0, sigma);
  const double t = x.squaredNorm();
  const double b12 = b0 * (2.0 * std::pow(1.0 + t, -sigma) - 2.0 * t * sigma * std::pow(1.0 + t, -sigma - 1.0));
  Vec fm(2);
  fm << b12 * v(1) / c, -b12 * v(0) / c;
  CHECK((force(x, v, *m, c) - fm).norm() <= 1e-14);
}

TEST_CASE("energy is rest energy plus potential at zero velocity") {
  const FieldPtr f = make_gaussian_field(3, 0.4, 1.2, 2.0, Vec::Zero(3));
  Vec x(3);
  x << 0.3, 0.1, -0.2;
  const double c = 2.0;
  CHECK(energy(x, Vec::Zero(3), *f, c) == doctest::Approx(c * c + f->potential(x)).epsilon(1e-15));
  Vec v(3);
  v << 0.6 * c, 0.0, 0.0;
  CHECK(energy(x, v, *f, c) == doctest::Approx(1.25 * c * c + f->potential(x)).epsilon(1e-14));
}
