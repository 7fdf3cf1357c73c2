#pragma once

#include <functional>
#include <string>
#include <vector>

#include "emscat/fields.hpp"
#include "emscat/linalg.hpp"
#include "emscat/quadrature.hpp"

namespace emscat {

// Oriented line {t theta + x}: |theta| = 1, theta . x = 0.
struct Ray {
  Vec theta;
  Vec x;

  Ray reversed() const { return Ray{-theta, x}; }
  Vec point(double t) const { return t * theta + x; }
};

// Validates the invariants to 1e-12.
Ray make_ray(const Vec& theta, const Vec& x);
// (y/|y|, x - (x.y/|y|^2) y); throws ZeroDirection for y = 0.
Ray project_to_ray(const Vec& y, const Vec& x);

struct LineQuadrature {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  double scale = 2.0;
  int max_intervals = 4000;

  QuadOptions options(double center = 0.0) const;
};

// P f(theta, x) = int f(t theta + x) dt.  `decay` is the declared decay
// exponent of f; the transform is only defined for decay > 1.
double xray_transform(const ScalarFn& f, const Ray& ray, double decay, const LineQuadrature& q = {});
Vec xray_transform(const VectorFn& f, const Ray& ray, double decay, const LineQuadrature& q = {});

// Two-dimensional sampled transform.  Ray (phi, q): theta = (cos phi, sin phi),
// offset q * (-sin phi, cos phi).
struct Sinogram {
  std::vector<double> angles;
  std::vector<double> offsets;
  int components = 1;
  std::vector<double> values;  // [(angle * n_offsets + offset) * components + component]
  double extent = 0.0;
  std::string label;

  Sinogram() = default;
  Sinogram(std::vector<double> angles, std::vector<double> offsets, int components, double extent = 0.0,
           std::string label = {});
  double& at(std::size_t i, std::size_t j, int c = 0) { return values[(i * offsets.size() + j) * components + c]; }
  double at(std::size_t i, std::size_t j, int c = 0) const {
    return values[(i * offsets.size() + j) * components + c];
  }
  void validate() const;
};

std::vector<double> uniform_angles(int m, double span = 3.14159265358979323846);
std::vector<double> uniform_offsets(int n, double extent);

// Function on the square [-extent, extent]^2 sampled at resolution^2 nodes.
struct GridFunction {
  double extent = 1.0;
  int resolution = 2;
  std::vector<double> values;  // [j * resolution + i] at (coordinate(i), coordinate(j))

  GridFunction() = default;
  GridFunction(double extent, int resolution);
  double coordinate(int i) const { return -extent + 2.0 * extent * i / (resolution - 1); }
  double spacing() const { return 2.0 * extent / (resolution - 1); }
  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * resolution + i]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * resolution + i]; }
};

GridFunction sample_grid(const std::function<double(double, double)>& f, double extent, int resolution);
// sqrt(sum (a-b)^2 / sum b^2); absolute L2 norm of a when b vanishes.
double relative_l2_error(const GridFunction& estimate, const GridFunction& truth);

struct FbpOptions {
  int resolution = 129;
  double extent = 0.0;  // 0: use the sinogram extent
  bool window = true;   // raised-cosine roll-off to zero at Nyquist
  double rolloff = 0.25;  // fraction of the band below Nyquist that is tapered
  int threads = 1;
};

// Filtered back-projection over angles covering [0, pi).
GridFunction invert_xray_2d(const Sinogram& sino, int component = 0, const FbpOptions& opt = {});
// Discrete ramp filter taps h[k], k = 0..n-1 (symmetric); `rolloff` is the
// tapered fraction of the band (0: sharp cut-off, 1: Hann over the full band).
std::vector<double> ramp_filter(int n, double spacing, double rolloff);

// Planar section through `point` with orthonormal tangents e1, e2.
class PlaneRestriction {
 public:
  PlaneRestriction(const Vec& point, const Vec& e1, const Vec& e2);
  int dim() const { return static_cast<int>(foot_.size()); }
  const Vec& foot() const { return foot_; }
  const Vec& e1() const { return e1_; }
  const Vec& e2() const { return e2_; }
  Vec embed(double u1, double u2) const { return foot_ + u1 * e1_ + u2 * e2_; }
  Ray embed_ray(double phi, double q) const;
  std::function<double(double, double)> restrict(const ScalarFn& f) const;

 private:
  Vec foot_, e1_, e2_;
};

void write_sinogram_csv(const std::string& path, const Sinogram& s);
Sinogram read_sinogram_csv(const std::string& path);
void write_grid_csv(const std::string& path, const GridFunction& g);
GridFunction read_grid_csv(const std::string& path);
std::string sinogram_csv(const Sinogram& s);
std::string grid_csv(const GridFunction& g);

}  // namespace emscat
