#pragma once

#include <string>
#include <vector>

#include "emscat/bounds.hpp"
#include "emscat/dynamics.hpp"
#include "emscat/fields.hpp"
#include "emscat/linalg.hpp"
#include "emscat/xray.hpp"

namespace emscat {

// Tight defaults: the functionals feed finite differences.
inline LineQuadrature functional_quadrature() {
  LineQuadrature q;
  q.abs_tol = 1e-15;
  q.rel_tol = 1e-13;
  q.max_intervals = 8000;
  return q;
}

// X-ray transforms of V, grad V and B along a ray.
double ray_pv(const Field& field, const Ray& ray, const LineQuadrature& q = functional_quadrature());
Vec ray_pgradv(const Field& field, const Ray& ray, const LineQuadrature& q = functional_quadrature());
Mat ray_pb(const Field& field, const Ray& ray, const LineQuadrature& q = functional_quadrature());
// P(dB/dx_l)
Mat ray_pdb(const Field& field, const Ray& ray, int l, const LineQuadrature& q = functional_quadrature());

// int F(tau theta + x, c theta) dtau
Vec w1(const Field& field, const Ray& ray, double c, const LineQuadrature& q = functional_quadrature());
// Past/future double integrals of F(., c theta) plus PV theta, in the
// order-swapped form -int sigma F dsigma + PV theta.
Vec w2(const Field& field, const Ray& ray, double c, const LineQuadrature& q = functional_quadrature());
// int B(x + sigma theta) theta dsigma
Vec w3(const Field& field, const Ray& ray, const LineQuadrature& q = functional_quadrature());
// Magnetic double integrals, order-swapped: -int sigma B theta dsigma.
Vec w4(const Field& field, const Ray& ray, const LineQuadrature& q = functional_quadrature());
// The same double integrals evaluated as iterated integrals (inner integral
// per outer node); an independent check of the order-swapped forms.
Vec w2_iterated(const Field& field, const Ray& ray, double c, const LineQuadrature& q = functional_quadrature());
Vec w4_iterated(const Field& field, const Ray& ray, const LineQuadrature& q = functional_quadrature());
// PV theta + int sigma grad V(sigma theta + x) dsigma: the electric part of w2.
Vec w2_electric_part(const Field& field, const Ray& ray, const LineQuadrature& q = functional_quadrature());

// Extensions to y != 0 and arbitrary x, as integrals along x + sigma y:
//   w1~ = -|y| int grad V ds + int B y ds,  w3~ = int B y ds,
//   w4~ = -int (sigma - s0) B(x + sigma y) y dsigma, s0 = -x.y/|y|^2.
// ZeroDirection for y = 0.
Vec w1_tilde(const Field& field, const Vec& y, const Vec& x, double c,
             const LineQuadrature& q = functional_quadrature());
Vec w3_tilde(const Field& field, const Vec& y, const Vec& x, const LineQuadrature& q = functional_quadrature());
Vec w4_tilde(const Field& field, const Vec& y, const Vec& x, const LineQuadrature& q = functional_quadrature());

struct AsymptoticSample {
  Ray ray;
  double s = 0.0;
  Vec lhs, rhs;
  double gap = 0.0;
  double envelope = NAN;
};

struct SpeedSample {
  AsymptoticSample a, b;
  ScatteringDatum datum;
};

// a: lhs = int F(tau theta + x, s theta) dtau, rhs = s a_sc / sqrt(1 - s^2/c^2),
//    envelope C1 / sqrt(1 + s^2 / (4 (c^2 - s^2))).
// b: lhs = b_sc / sqrt(1 - s^2/c^2), rhs = PV theta / c^2 - (1/s^2) int sigma F(sigma theta + x, s theta) dsigma,
//    envelope C2 sqrt(1 - s^2/c^2).
// Envelopes are NaN when `constants` is null.
SpeedSample compare_thm11(const FieldPtr& field, const Ray& ray, double s, double c, const SolverSpec& spec,
                              const Theorem1Constants* constants = nullptr,
                              const LineQuadrature& q = functional_quadrature());
AsymptoticSample compare_thm11_a(const FieldPtr& field, const Ray& ray, double s, double c, const SolverSpec& spec,
                                 const Theorem1Constants* constants = nullptr);
AsymptoticSample compare_thm11_b(const FieldPtr& field, const Ray& ray, double s, double c, const SolverSpec& spec,
                                 const Theorem1Constants* constants = nullptr);

// l_{v,x}(0,0): the offset limit of the straight-line operator image, by
// nested quadrature.  Requires v.x = 0 and 0 < |v| < c.
Vec l_free(const Field& field, const Vec& v, const Vec& x, double c,
           const LineQuadrature& q = functional_quadrature());
// |l/sqrt(1 - v^2/c^2) - PV v^ / c^2 + (1/|v|^2) int sigma F(sigma v^ + x, v) dsigma|
double free_line_gap(const Field& field, const Vec& v, const Vec& x, double c,
                 const LineQuadrature& q = functional_quadrature());

struct FreeLineFit {
  double constant = 0.0;  // max of lhs / sqrt(1 - s^2/c^2)
  std::vector<double> speeds, lhs, ratio;
};
// Calibration speeds 1 - s/c = 10^(-k/4), k = 1..k_max, restricted to s >= s_min.
FreeLineFit fit_free_line_constant(const Field& field, const std::vector<Ray>& rays, double c, double s_min,
                            int k_max = 16, const LineQuadrature& q = functional_quadrature());

}  // namespace emscat
