#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "emscat/errors.hpp"
#include "emscat/fields.hpp"
#include "emscat/xray.hpp"

using namespace emscat;
using std::numbers::pi;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Ray random_ray(std::mt19937_64& rng, int d, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec y(d), x(d);
  for (int i = 0; i < d; ++i) {
    y(i) = n(rng);
    x(i) = scale * n(rng);
  }
  return project_to_ray(y, x);
}

// Two gaussian bumps and their exact line integrals.
struct Phantom {
  double a1 = 1.0, w1 = 0.9, x1 = 0.8, y1 = -0.4;
  double a2 = -0.6, w2 = 0.6, x2 = -1.0, y2 = 0.7;

  double value(double u, double v) const {
    return a1 * std::exp(-((u - x1) * (u - x1) + (v - y1) * (v - y1)) / (w1 * w1)) +
           a2 * std::exp(-((u - x2) * (u - x2) + (v - y2) * (v - y2)) / (w2 * w2));
  }
  double line(double phi, double q) const {
    const double nx = -std::sin(phi), ny = std::cos(phi);
    const double d1 = nx * x1 + ny * y1 - q, d2 = nx * x2 + ny * y2 - q;
    return a1 * w1 * std::sqrt(pi) * std::exp(-d1 * d1 / (w1 * w1)) +
           a2 * w2 * std::sqrt(pi) * std::exp(-d2 * d2 / (w2 * w2));
  }
};

Sinogram phantom_sinogram(const Phantom& p, int angles, int offsets, double extent) {
  Sinogram s(uniform_angles(angles), uniform_offsets(offsets, extent), 1, extent, "phantom");
  for (std::size_t i = 0; i < s.angles.size(); ++i)
    for (std::size_t j = 0; j < s.offsets.size(); ++j) s.at(i, j) = p.line(s.angles[i], s.offsets[j]);
  return s;
}

}  // namespace

TEST_CASE("rays validate their invariants") {
  CHECK_NOTHROW(make_ray(vec({1.0, 0.0}), vec({0.0, 2.0})));
  CHECK_THROWS_AS(make_ray(vec({1.0, 1.0}), vec({0.0, 2.0})), Error);
  CHECK_THROWS_AS(make_ray(vec({1.0, 0.0}), vec({1.0, 2.0})), Error);
  const Ray r = project_to_ray(vec({0.0, 2.0, 0.0}), vec({1.0, 3.0, -1.0}));
  CHECK((r.theta - vec({0.0, 1.0, 0.0})).norm() == 0.0);
  CHECK((r.x - vec({1.0, 0.0, -1.0})).norm() <= 1e-15);
  CHECK_THROWS_AS(project_to_ray(vec({0.0, 0.0}), vec({1.0, 0.0})), Error);
  CHECK((r.reversed().theta + r.theta).norm() == 0.0);
}

TEST_CASE("gaussian transform matches its closed form") {
  std::mt19937_64 rng(31);
  LineQuadrature q;
  q.abs_tol = 1e-14;
  q.rel_tol = 1e-12;
  for (int d : {2, 3, 4}) {
    const Vec c = Vec::LinSpaced(d, -0.3, 0.5);
    const double v0 = 0.7, w = 1.3;
    const FieldPtr f = make_gaussian_field(d, v0, w, 2.0, c);
    const ScalarFn v = [&](const Vec& x) { return f->potential(x); };
    for (int k = 0; k < 100; ++k) {
      const Ray ray = random_ray(rng, d, 1.5);
      const Vec off = ray.x - c - (ray.x - c).dot(ray.theta) * ray.theta;
      const double exact = v0 * w * std::sqrt(pi) * std::exp(-off.squaredNorm() / (w * w));
      CHECK(std::abs(xray_transform(v, ray, 2.0, q) - exact) < 1e-8);
    }
  }
}

TEST_CASE("inverse-square transform matches its closed form") {
  const FieldPtr f = make_inverse_power_field(3, 1.0, 2.0, Vec::Zero(3));
  const ScalarFn v = [&](const Vec& x) { return f->potential(x); };
  std::mt19937_64 rng(32);
  for (int k = 0; k < 50; ++k) {
    const Ray ray = random_ray(rng, 3, 2.0);
    CHECK(xray_transform(v, ray, 2.0) ==
          doctest::Approx(pi / std::sqrt(1.0 + ray.x.squaredNorm())).epsilon(1e-10));
  }
  CHECK_THROWS_AS(xray_transform(v, random_ray(rng, 3, 1.0), 1.0), Error);
}

TEST_CASE("vector transforms integrate componentwise") {
  const FieldPtr f = make_gaussian_field(2, 1.0, 1.0, 2.0, Vec::Zero(2));
  const VectorFn g = [&](const Vec& x) { return f->potential_gradient(x); };
  const Ray ray = make_ray(vec({1.0, 0.0}), vec({0.0, 0.5}));
  // d/dx2 of sqrt(pi) exp(-x2^2) at 0.5 along the normal, zero along the ray.
  const Vec r = xray_transform(g, ray, 3.0);
  CHECK(std::abs(r(0)) < 1e-12);
  CHECK(r(1) == doctest::Approx(-2.0 * 0.5 * std::sqrt(pi) * std::exp(-0.25)).epsilon(1e-10));
}

TEST_CASE("ramp filter taps: sharp cut-off reproduces Ram-Lak") {
  const double dq = 0.05;
  const std::vector<double> h = ramp_filter(40, dq, 0.0);
  CHECK(h[0] == doctest::Approx(1.0 / (4.0 * dq * dq)).epsilon(1e-12));
  for (int k = 1; k < 40; ++k) {
    if (k % 2 == 1)
      CHECK(h[k] == doctest::Approx(-1.0 / (pi * pi * k * k * dq * dq)).epsilon(1e-10));
    else
      CHECK(std::abs(h[k]) <= 1e-10 * h[0]);
  }
  // Windowed taps: smaller DC-adjacent response, same sign pattern at k = 1.
  const std::vector<double> hw = ramp_filter(40, dq, 0.25);
  CHECK(hw[0] < h[0]);
  CHECK(hw[1] < 0.0);
  CHECK_THROWS_AS(ramp_filter(10, dq, 1.5), Error);
}

TEST_CASE("filtered back-projection recovers a smooth phantom") {
  const Phantom p;
  const double extent = 6.0;
  const Sinogram s = phantom_sinogram(p, 180, 241, extent);
  FbpOptions o;
  o.resolution = 101;
  o.extent = 3.0;
  const GridFunction est = invert_xray_2d(s, 0, o);
  const GridFunction truth = sample_grid([&](double u, double v) { return p.value(u, v); }, 3.0, 101);
  const double err = relative_l2_error(est, truth);
  MESSAGE("FBP relative L2 error " << err);
  CHECK(err < 0.05);
  o.window = false;
  CHECK(relative_l2_error(invert_xray_2d(s, 0, o), truth) < 0.05);
}

TEST_CASE("back-projection is independent of the thread count") {
  const Phantom p;
  const Sinogram s = phantom_sinogram(p, 60, 81, 5.0);
  FbpOptions o;
  o.resolution = 41;
  const GridFunction a = invert_xray_2d(s, 0, o);
  o.threads = 3;
  const GridFunction b = invert_xray_2d(s, 0, o);
  CHECK(a.values == b.values);
}

TEST_CASE("back-projection rejects bad sinograms") {
  Sinogram s(uniform_angles(8, 2 * pi), uniform_offsets(9, 1.0), 1, 1.0);
  CHECK_THROWS_AS(invert_xray_2d(s), Error);
  Sinogram t(uniform_angles(8), {-1.0, -0.5, 0.1, 0.5, 1.0}, 1, 1.0);
  CHECK_THROWS_AS(invert_xray_2d(t), Error);
  CHECK_THROWS_AS(invert_xray_2d(Sinogram(uniform_angles(8), uniform_offsets(9, 1.0), 1, 1.0), 1), Error);
}

TEST_CASE("grid helpers") {
  const GridFunction g = sample_grid([](double u, double v) { return u + 2 * v; }, 2.0, 5);
  CHECK(g.coordinate(0) == -2.0);
  CHECK(g.coordinate(4) == 2.0);
  CHECK(g.spacing() == 1.0);
  CHECK(g.at(4, 0) == doctest::Approx(2.0 - 4.0));
  CHECK(relative_l2_error(g, g) == 0.0);
  GridFunction z(2.0, 5);
  CHECK(relative_l2_error(g, z) > 0.0);
  CHECK_THROWS_AS(relative_l2_error(g, GridFunction(2.0, 6)), Error);
  CHECK_THROWS_AS(GridFunction(0.0, 5), Error);
}

TEST_CASE("sinogram and grid CSV round trip exactly") {
  const Phantom p;
  const Sinogram s = phantom_sinogram(p, 7, 9, 2.5);
  const auto dir = std::filesystem::temp_directory_path() / "emscat_test_xray";
  std::filesystem::create_directories(dir);
  const std::string sp = (dir / "sino.csv").string(), gp = (dir / "grid.csv").string();
  write_sinogram_csv(sp, s);
  const Sinogram r = read_sinogram_csv(sp);
  CHECK(r.angles == s.angles);
  CHECK(r.offsets == s.offsets);
  CHECK(r.values == s.values);
  CHECK(r.components == s.components);
  const GridFunction g = sample_grid([&](double u, double v) { return p.value(u, v); }, 1.5, 11);
  write_grid_csv(gp, g);
  const GridFunction h = read_grid_csv(gp);
  CHECK(h.values == g.values);
  CHECK(h.extent == g.extent);
  CHECK(h.resolution == g.resolution);
  CHECK_THROWS_AS(read_sinogram_csv((dir / "missing.csv").string()), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("plane restriction embeds rays and functions") {
  const PlaneRestriction pl(vec({0.0, 0.0, 1.0}), vec({1.0, 0.0, 0.0}), vec({0.0, 1.0, 0.0}));
  CHECK(pl.dim() == 3);
  const Ray r = pl.embed_ray(pi / 2, 0.5);
  CHECK((r.theta - vec({0.0, 1.0, 0.0})).norm() <= 1e-15);
  CHECK((r.x - vec({-0.5, 0.0, 1.0})).norm() <= 1e-15);
  const auto f = pl.restrict([](const Vec& x) { return x(0) + 10 * x(2); });
  CHECK(f(2.0, 3.0) == doctest::Approx(12.0));
  CHECK_THROWS_AS(PlaneRestriction(vec({0.0, 0.0}), vec({1.0, 0.0}), vec({1.0, 0.0})), Error);
}
