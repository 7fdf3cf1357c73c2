#pragma once

#include <cmath>

namespace emscat {

struct BoundParams {
  double c = 1.0;
  int d = 2;
  double alpha = 2.0;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double r = 0.5;       // 0 < r <= 1, r < c / sqrt(2)
  double x_norm = 0.0;  // |x_-|
  double v_norm = 0.0;  // |v_-|
  double T = HUGE_VAL;  // norm horizon

  double beta_tilde() const { return beta1 > beta2 ? beta1 : beta2; }
  // Checks everything except the speed.
  void validate() const;
  // validate() plus sqrt(2) r < v_norm < c.
  void validate_speed() const;
};

// Left-hand sides of the threshold equations; their roots are z1, z2.
double z1_equation(const BoundParams& p, double z);
double z2_equation(const BoundParams& p, double z);

// Roots on ]sqrt(2) r, c[ (z1, z) and ]0, c[ (z2); NoRoot without a sign change.
double threshold_z1(const BoundParams& p);
double threshold_z(const BoundParams& p);
double threshold_z2(const BoundParams& p);

struct OperatorBounds {
  double rho_T = NAN, rho = NAN;
  double lambda_T = NAN, lambda = NAN;
  double mu_T = NAN, mu = NAN;
};
// The _T variants are evaluated at p.T and are NaN when p.T > 0.
OperatorBounds operator_bounds(const BoundParams& p);
double mu_bound(const BoundParams& p);

// zeta_-, xi_- need t <= 0; zeta_+, xi_+ need t >= 0 (Range otherwise).
double zeta_minus(const BoundParams& p, double t);
double xi_minus(const BoundParams& p, double t);
double zeta_plus(const BoundParams& p, double t);
double xi_plus(const BoundParams& p, double t);

struct Envelopes {
  double zeta_minus, xi_minus, zeta_plus, xi_plus;
};
// Past pair at t_past <= 0, future pair at t_future >= 0.
Envelopes envelopes(const BoundParams& p, double t_past, double t_future);
// Bound on |int_{-inf}^t F| along admissible paths.
double force_integral_bound(const BoundParams& p);

struct ProximityConstants {
  double eps_a_prime, eps_a, eps_b;
};
ProximityConstants proximity_constants(const BoundParams& p);

struct Theorem1Constants {
  double z = NAN, z1 = NAN, z2 = NAN;
  double s1 = NAN, s2 = NAN;
  double C1 = NAN;
  double C2 = NAN;           // C_fit + explicit part
  double C2_explicit = NAN;
  double C_fit = 0.0;
  bool trivial = false;      // zero field: no thresholds, C1 = C2 = 0
};
// Uses c, d, alpha, betas, r, x_norm (v_norm is ignored).
Theorem1Constants theorem1_constants(const BoundParams& p, double c_fit = 0.0);

struct ConstantSet {
  double v_norm;
  double z1, z, z2;
  OperatorBounds ops;
  double zeta_minus0, xi_minus0, zeta_plus0, xi_plus0;
  ProximityConstants eps;
  Theorem1Constants thm;
};
ConstantSet constant_set(const BoundParams& p, double c_fit = 0.0);

// Radius in (0, min(1, c/sqrt 2)) minimising mu at p.v_norm subject to
// z1 <= v_norm; NotContractive when no admissible radius exists.
double best_contraction_radius(BoundParams p);
// Radius minimising s1 = max(z, z1) (v_norm ignored).
double best_threshold_radius(BoundParams p);

}  // namespace emscat
