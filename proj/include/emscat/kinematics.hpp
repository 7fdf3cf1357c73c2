#pragma once

#include "emscat/linalg.hpp"

namespace emscat {

class Field;

struct PhysicsParams {
  double c = 1.0;
  int d = 2;
  double alpha = 2.0;

  void validate() const;
};

// g(p) = p / sqrt(1 + |p|^2/c^2): impulse -> velocity, onto the open ball B_c.
Vec velocity_from_impulse(const Vec& p, double c);
// gamma(v) = v / sqrt(1 - |v|^2/c^2); throws Domain for |v| >= c.
Vec impulse_from_velocity(const Vec& v, double c);
// g(p + dp) - g(p) without cancellation when |dp| << |p|.
Vec velocity_increment(const Vec& p, const Vec& dp, double c);
// Dg(p): Jacobian of g.
Mat velocity_jacobian(const Vec& p, double c);

// 1/sqrt(1 - s^2/c^2); throws Domain for s >= c.
double lorentz_factor(double speed, double c);
// The factor 1/sqrt(1 + s^2/(4(c^2 - s^2))) shared by most bounds.
double bound_damping(double speed, double c);

double energy(const Vec& x, const Vec& v, const Field& field, double c);
// F(x, v) = -grad V(x) + B(x) v / c
Vec force(const Vec& x, const Vec& v, const Field& field, double c);

}  // namespace emscat
