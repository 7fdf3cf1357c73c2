#include "emscat/kinematics.hpp"

#include <cmath>
#include <string>

#include "emscat/errors.hpp"
#include "emscat/fields.hpp"

namespace emscat {

void PhysicsParams::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorCode::InvalidArgument, "c must be positive");
  if (d < 2 || d > kMaxDim) fail(ErrorCode::InvalidArgument, "d must lie in [2, " + std::to_string(kMaxDim) + "]");
  if (!(alpha > 1.0)) fail(ErrorCode::InvalidArgument, "alpha must exceed 1");
}

Vec velocity_from_impulse(const Vec& p, double c) {
  return p / std::sqrt(1.0 + p.squaredNorm() / (c * c));
}

Vec impulse_from_velocity(const Vec& v, double c) {
  const double q = 1.0 - v.squaredNorm() / (c * c);
  if (!(q > 0.0)) fail(ErrorCode::Domain, "speed must be below c");
  return v / std::sqrt(q);
}

Vec velocity_increment(const Vec& p, const Vec& dp, double c) {
  const double c2 = c * c;
  const double sp = std::sqrt(1.0 + p.squaredNorm() / c2);
  const Vec q = p + dp;
  const double sq = std::sqrt(1.0 + q.squaredNorm() / c2);
  const double num = 2.0 * p.dot(dp) + dp.squaredNorm();
  return dp / sq - p * (num / (c2 * sp * sq * (sp + sq)));
}

Mat velocity_jacobian(const Vec& p, double c) {
  const double c2 = c * c;
  const double s2 = 1.0 + p.squaredNorm() / c2;
  const double s = std::sqrt(s2);
  Mat j = Mat::Identity(p.size(), p.size()) / s;
  j -= (p * p.transpose()) / (c2 * s2 * s);
  return j;
}

double lorentz_factor(double speed, double c) {
  const double q = 1.0 - (speed / c) * (speed / c);
  if (!(q > 0.0)) fail(ErrorCode::Domain, "speed must be below c");
  return 1.0 / std::sqrt(q);
}

double bound_damping(double speed, double c) {
  const double c2 = c * c;
  const double s2 = speed * speed;
  if (!(s2 < c2)) fail(ErrorCode::Domain, "speed must be below c");
  return 1.0 / std::sqrt(1.0 + s2 / (4.0 * (c2 - s2)));
}

double energy(const Vec& x, const Vec& v, const Field& field, double c) {
  const Vec p = impulse_from_velocity(v, c);
  return c * c * std::sqrt(1.0 + p.squaredNorm() / (c * c)) + field.potential(x);
}

Vec force(const Vec& x, const Vec& v, const Field& field, double c) {
  Vec gv;
  Mat b;
  field.sample(x, gv, b);
  Vec f = -gv;
  if (b.size()) f.noalias() += (b * v) / c;
  return f;
}

}  // namespace emscat
