#include "emscat/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "emscat/errors.hpp"
#include "emscat/kinematics.hpp"
#include "emscat/quadrature.hpp"

namespace emscat {

namespace {

QuadOptions line_options(const LineQuadrature& q, double center, double length_scale) {
  QuadOptions o = q.options(center);
  o.scale = std::max(q.scale, length_scale);
  return o;
}

QuadOptions ray_options(const LineQuadrature& q, const Ray& ray) { return line_options(q, 0.0, ray.x.norm()); }

// F(p, u theta) for speed u: -grad V(p) + (u/c) B(p) theta.
Vec force_along(const Field& field, const Vec& p, const Vec& theta, double u_over_c) {
  Vec gv;
  Mat b;
  field.sample(p, gv, b);
  return -gv + u_over_c * (b * theta);
}

void check_ray(const Field& field, const Ray& ray) {
  if (ray.theta.size() != field.dim() || ray.x.size() != field.dim())
    fail(ErrorCode::InvalidArgument, "ray dimension does not match the field");
}

// int sigma F(sigma theta + x, u theta) dsigma
Vec first_moment(const Field& field, const Ray& ray, double u_over_c, const LineQuadrature& q) {
  return integrate(
             [&](double s) -> Vec { return s * force_along(field, ray.point(s), ray.theta, u_over_c); },
             -HUGE_VAL, HUGE_VAL, ray_options(q, ray))
      .value;
}

Vec force_line_integral(const Field& field, const Ray& ray, double u_over_c, const LineQuadrature& q) {
  return integrate([&](double s) -> Vec { return force_along(field, ray.point(s), ray.theta, u_over_c); },
                   -HUGE_VAL, HUGE_VAL, ray_options(q, ray))
      .value;
}

// int_{-inf}^0 int_{-inf}^tau G - int_0^inf int_tau^inf G, iterated.
template <class G>
Vec iterated_double(const G& g, double scale, const LineQuadrature& q) {
  QuadOptions inner = line_options(q, 0.0, scale);
  inner.rel_tol = std::max(q.rel_tol, 1e-13);
  QuadOptions outer = inner;
  auto past = [&](double tau) -> Vec { return integrate(g, -HUGE_VAL, tau, inner).value; };
  auto future = [&](double tau) -> Vec { return integrate(g, tau, HUGE_VAL, inner).value; };
  return integrate(past, -HUGE_VAL, 0.0, outer).value - integrate(future, 0.0, HUGE_VAL, outer).value;
}

}  // namespace

double ray_pv(const Field& field, const Ray& ray, const LineQuadrature& q) {
  check_ray(field, ray);
  return integrate([&](double s) { return field.potential(ray.point(s)); }, -HUGE_VAL, HUGE_VAL,
                   ray_options(q, ray))
      .value;
}

Vec ray_pgradv(const Field& field, const Ray& ray, const LineQuadrature& q) {
  check_ray(field, ray);
  return integrate([&](double s) -> Vec { return field.potential_gradient(ray.point(s)); }, -HUGE_VAL, HUGE_VAL,
                   ray_options(q, ray))
      .value;
}

namespace {
template <class M>
Mat integrate_matrix(const M& m, int d, const QuadOptions& o) {
  auto flat = [&](double s) -> StackVec {
    Mat b = m(s);
    StackVec out(d * d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) out(i * d + k) = b(i, k);
    return out;
  };
  StackVec v = integrate(flat, -HUGE_VAL, HUGE_VAL, o).value;
  Mat r(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) r(i, k) = v(i * d + k);
  return r;
}
}  // namespace

Mat ray_pb(const Field& field, const Ray& ray, const LineQuadrature& q) {
  check_ray(field, ray);
  const int d = field.dim();
  if (d * d > 4 * kMaxDim) fail(ErrorCode::InvalidArgument, "dimension too large for matrix transforms");
  return integrate_matrix([&](double s) { return field.magnetic(ray.point(s)); }, d, ray_options(q, ray));
}

Mat ray_pdb(const Field& field, const Ray& ray, int l, const LineQuadrature& q) {
  check_ray(field, ray);
  const int d = field.dim();
  if (l < 0 || l >= d) fail(ErrorCode::InvalidArgument, "derivative index out of range");
  if (d * d > 4 * kMaxDim) fail(ErrorCode::InvalidArgument, "dimension too large for matrix transforms");
  return integrate_matrix([&](double s) { return field.magnetic_derivative(ray.point(s), l); }, d,
                          ray_options(q, ray));
}

Vec w1(const Field& field, const Ray& ray, double c, const LineQuadrature& q) {
  (void)c;  // F(., c theta) carries B theta exactly
  check_ray(field, ray);
  return force_line_integral(field, ray, 1.0, q);
}

Vec w2(const Field& field, const Ray& ray, double c, const LineQuadrature& q) {
  (void)c;
  check_ray(field, ray);
  return -first_moment(field, ray, 1.0, q) + ray_pv(field, ray, q) * ray.theta;
}

Vec w3(const Field& field, const Ray& ray, const LineQuadrature& q) {
  check_ray(field, ray);
  return integrate([&](double s) -> Vec { return field.magnetic(ray.point(s)) * ray.theta; }, -HUGE_VAL, HUGE_VAL,
                   ray_options(q, ray))
      .value;
}

Vec w4(const Field& field, const Ray& ray, const LineQuadrature& q) {
  check_ray(field, ray);
  return -integrate([&](double s) -> Vec { return s * (field.magnetic(ray.point(s)) * ray.theta); }, -HUGE_VAL,
                    HUGE_VAL, ray_options(q, ray))
              .value;
}

Vec w2_iterated(const Field& field, const Ray& ray, double c, const LineQuadrature& q) {
  (void)c;
  check_ray(field, ray);
  auto g = [&](double s) -> Vec { return force_along(field, ray.point(s), ray.theta, 1.0); };
  return iterated_double(g, ray.x.norm(), q) + ray_pv(field, ray, q) * ray.theta;
}

Vec w4_iterated(const Field& field, const Ray& ray, const LineQuadrature& q) {
  check_ray(field, ray);
  auto g = [&](double s) -> Vec { return field.magnetic(ray.point(s)) * ray.theta; };
  return iterated_double(g, ray.x.norm(), q);
}

Vec w2_electric_part(const Field& field, const Ray& ray, const LineQuadrature& q) {
  check_ray(field, ray);
  Vec m = integrate([&](double s) -> Vec { return s * field.potential_gradient(ray.point(s)); }, -HUGE_VAL,
                    HUGE_VAL, ray_options(q, ray))
              .value;
  return m + ray_pv(field, ray, q) * ray.theta;
}

namespace {
struct TildeLine {
  double norm, s0;
  QuadOptions opt;
};

TildeLine tilde_line(const Field& field, const Vec& y, const Vec& x, const LineQuadrature& q) {
  if (y.size() != field.dim() || x.size() != field.dim())
    fail(ErrorCode::InvalidArgument, "argument dimension does not match the field");
  const double n2 = y.squaredNorm();
  if (!(n2 > 0.0)) fail(ErrorCode::ZeroDirection, "direction vector is zero");
  const double n = std::sqrt(n2);
  const double s0 = -x.dot(y) / n2;
  const double offset = (x + s0 * y).norm();
  QuadOptions o = q.options(s0);
  o.scale = std::max(q.scale, offset) / n;
  return TildeLine{n, s0, o};
}
}  // namespace

Vec w1_tilde(const Field& field, const Vec& y, const Vec& x, double c, const LineQuadrature& q) {
  (void)c;
  const TildeLine L = tilde_line(field, y, x, q);
  return integrate(
             [&](double s) -> Vec {
               Vec gv;
               Mat b;
               field.sample(x + s * y, gv, b);
               return -L.norm * gv + b * y;
             },
             -HUGE_VAL, HUGE_VAL, L.opt)
      .value;
}

Vec w3_tilde(const Field& field, const Vec& y, const Vec& x, const LineQuadrature& q) {
  const TildeLine L = tilde_line(field, y, x, q);
  return integrate([&](double s) -> Vec { return field.magnetic(x + s * y) * y; }, -HUGE_VAL, HUGE_VAL, L.opt)
      .value;
}

Vec w4_tilde(const Field& field, const Vec& y, const Vec& x, const LineQuadrature& q) {
  const TildeLine L = tilde_line(field, y, x, q);
  return -integrate([&](double s) -> Vec { return (s - L.s0) * (field.magnetic(x + s * y) * y); }, -HUGE_VAL,
                    HUGE_VAL, L.opt)
              .value;
}

SpeedSample compare_thm11(const FieldPtr& field, const Ray& ray, double s, double c, const SolverSpec& spec,
                              const Theorem1Constants* constants, const LineQuadrature& q) {
  check_ray(*field, ray);
  if (!(s > 0.0 && s < c)) fail(ErrorCode::Domain, "speed must lie in (0, c)");
  SpeedSample out;
  out.datum = scattering_data(field, c, s * ray.theta, ray.x, spec);
  const double gam = lorentz_factor(s, c);
  const double u = s / c;

  AsymptoticSample& a = out.a;
  a.ray = ray;
  a.s = s;
  a.lhs = force_line_integral(*field, ray, u, q);
  a.rhs = s * gam * out.datum.a;
  a.gap = (a.lhs - a.rhs).norm();

  AsymptoticSample& b = out.b;
  b.ray = ray;
  b.s = s;
  b.lhs = gam * out.datum.b;
  b.rhs = ray_pv(*field, ray, q) / (c * c) * ray.theta - first_moment(*field, ray, u, q) / (s * s);
  b.gap = (b.lhs - b.rhs).norm();

  if (constants) {
    a.envelope = constants->C1 * bound_damping(s, c);
    b.envelope = constants->C2 * std::sqrt(1.0 - u * u);
  }
  return out;
}

AsymptoticSample compare_thm11_a(const FieldPtr& field, const Ray& ray, double s, double c, const SolverSpec& spec,
                                 const Theorem1Constants* constants) {
  return compare_thm11(field, ray, s, c, spec, constants).a;
}

AsymptoticSample compare_thm11_b(const FieldPtr& field, const Ray& ray, double s, double c, const SolverSpec& spec,
                                 const Theorem1Constants* constants) {
  return compare_thm11(field, ray, s, c, spec, constants).b;
}

Vec l_free(const Field& field, const Vec& v, const Vec& x, double c, const LineQuadrature& q) {
  const int d = field.dim();
  if (v.size() != d || x.size() != d) fail(ErrorCode::InvalidArgument, "argument dimension does not match the field");
  const double speed = v.norm();
  if (!(speed > 0.0)) fail(ErrorCode::ZeroDirection, "velocity is zero");
  if (speed >= c) fail(ErrorCode::Domain, "speed must be below c");
  if (std::abs(v.dot(x)) > 1e-12 * speed * std::max(1.0, x.norm()))
    fail(ErrorCode::InvalidArgument, "l_free needs v.x = 0");
  const Vec gam = impulse_from_velocity(v, c);
  auto F = [&](double t) -> Vec { return force(v * t + x, v, field, c); };
  const double scale = (1.0 + x.norm()) / speed;
  QuadOptions inner = line_options(q, 0.0, scale);
  inner.rel_tol = std::max(q.rel_tol, 1e-13);
  QuadOptions outer = inner;
  const Vec phi_inf = integrate(F, -HUGE_VAL, HUGE_VAL, inner).value;
  const Vec gam_out = gam + phi_inf;
  auto past = [&](double tau) -> Vec {
    return velocity_increment(gam, integrate(F, -HUGE_VAL, tau, inner).value, c);
  };
  auto future = [&](double tau) -> Vec {
    return velocity_increment(gam_out, -integrate(F, tau, HUGE_VAL, inner).value, c);
  };
  return integrate(past, -HUGE_VAL, 0.0, outer).value + integrate(future, 0.0, HUGE_VAL, outer).value;
}

double free_line_gap(const Field& field, const Vec& v, const Vec& x, double c, const LineQuadrature& q) {
  const double speed = v.norm();
  const Vec l = l_free(field, v, x, c, q);
  const Ray ray{v / speed, x};
  const Vec expr = lorentz_factor(speed, c) * l - ray_pv(field, ray, q) / (c * c) * ray.theta +
                   first_moment(field, ray, speed / c, q) / (speed * speed);
  return expr.norm();
}

FreeLineFit fit_free_line_constant(const Field& field, const std::vector<Ray>& rays, double c, double s_min, int k_max,
                            const LineQuadrature& q) {
  FreeLineFit fit;
  for (const Ray& ray : rays) {
    for (int k = 1; k <= k_max; ++k) {
      const double s = c * (1.0 - std::pow(10.0, -k / 4.0));
      if (s < s_min) continue;
      const double lhs = free_line_gap(field, s * ray.theta, ray.x, c, q);
      const double ratio = lhs / std::sqrt(1.0 - (s / c) * (s / c));
      fit.speeds.push_back(s);
      fit.lhs.push_back(lhs);
      fit.ratio.push_back(ratio);
      fit.constant = std::max(fit.constant, ratio);
    }
  }
  return fit;
}

}  // namespace emscat
