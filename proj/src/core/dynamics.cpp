#include "emscat/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "emscat/errors.hpp"
#include "emscat/kinematics.hpp"
#include "emscat/quadrature.hpp"

namespace emscat {

namespace {

// Integral over segment [i, i+1] of samples g on a uniform grid, 4th order.
template <class T>
T segment_integral(const std::vector<T>& g, std::size_t i, double du) {
  const std::size_t n = g.size() - 1;
  if (i == 0) return (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]) * (du / 24.0);
  if (i == n - 1) return (g[n - 3] - 5.0 * g[n - 2] + 19.0 * g[n - 1] + 9.0 * g[n]) * (du / 24.0);
  return (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]) * (du / 24.0);
}

StackVec stack2(const Vec& a, const Vec& b) {
  StackVec s(a.size() + b.size());
  s << a, b;
  return s;
}

double angle_between(const Vec& w, const Vec& v) {
  const Vec vh = v.normalized();
  const double along = w.dot(vh);
  const double across = (w - along * vh).norm();
  return std::atan2(across, along);
}

}  // namespace

TimeGrid TimeGrid::make(const TimeGridSpec& spec, const Vec& v, const Vec& x) {
  if (spec.intervals < 8) fail(ErrorCode::InvalidArgument, "time grid needs at least 8 intervals");
  if (!(spec.half_width > 0.0)) fail(ErrorCode::InvalidArgument, "time grid half width must be positive");
  const double vn = v.norm();
  if (!(vn > 0.0)) fail(ErrorCode::InvalidArgument, "velocity must be nonzero");
  TimeGrid g;
  g.half_width = spec.half_width;
  g.tau0 = spec.tau0 > 0.0 ? spec.tau0 : 1.0 / vn;
  g.center = std::isnan(spec.center) ? -x.dot(v) / (vn * vn) : spec.center;
  const int n = spec.intervals;
  g.du = 2.0 * spec.half_width / n;
  g.u.resize(n + 1);
  g.t.resize(n + 1);
  g.dtdu.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double u = -spec.half_width + g.du * i;
    g.u[i] = u;
    g.t[i] = g.center + g.tau0 * std::sinh(u);
    g.dtdu[i] = g.tau0 * std::cosh(u);
  }
  return g;
}

std::size_t TimeGrid::locate(double s) const {
  const double u0 = std::asinh((s - center) / tau0);
  double k = std::floor((u0 + half_width) / du);
  const double last = static_cast<double>(t.size() - 2);
  k = std::clamp(k, 0.0, last);
  std::size_t i = static_cast<std::size_t>(k);
  // Guard against rounding at node boundaries.
  while (i > 0 && s < t[i]) --i;
  while (i + 2 < t.size() && s >= t[i + 1]) ++i;
  return i;
}

DeflectionPath::DeflectionPath(std::shared_ptr<const TimeGrid> g, int d) : grid(std::move(g)) {
  f.assign(grid->size(), Vec::Zero(d));
  h.assign(grid->size(), Vec::Zero(d));
}

namespace {
double interp_weight(const TimeGrid& g, std::size_t i, double s) {
  const double w = (s - g.t[i]) / (g.t[i + 1] - g.t[i]);
  return std::clamp(w, 0.0, 1.0);
}
}  // namespace

Vec DeflectionPath::h_at(double t) const {
  const std::size_t i = grid->locate(t);
  const double w = interp_weight(*grid, i, t);
  return (1.0 - w) * h[i] + w * h[i + 1];
}

Vec DeflectionPath::q_at(double t) const {
  const std::size_t i = grid->locate(t);
  const double w = interp_weight(*grid, i, t);
  const Vec q0 = f[i] - grid->t[i] * h[i];
  const Vec q1 = f[i + 1] - grid->t[i + 1] * h[i + 1];
  return (1.0 - w) * q0 + w * q1;
}

namespace {
template <class HF, class QF>
double sup_norm_T(const TimeGrid& g, double T, HF hval, QF qval) {
  double m = 0.0;
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n && g.t[i] <= T; ++i) m = std::max({m, hval(i).norm(), qval(i).norm()});
  if (T < g.t[0]) {
    m = std::max({m, hval(0).norm(), qval(0).norm()});
  } else if (T < g.t[n - 1]) {
    const std::size_t i = g.locate(T);
    const double w = interp_weight(g, i, T);
    m = std::max({m, ((1.0 - w) * hval(i) + w * hval(i + 1)).norm(), ((1.0 - w) * qval(i) + w * qval(i + 1)).norm()});
  }
  return m;
}
}  // namespace

double norm_T(const DeflectionPath& p, double T) {
  const TimeGrid& g = *p.grid;
  return sup_norm_T(
      g, T, [&](std::size_t i) -> Vec { return p.h[i]; },
      [&](std::size_t i) -> Vec { return p.f[i] - g.t[i] * p.h[i]; });
}

double distance_T(const DeflectionPath& a, const DeflectionPath& b, double T) {
  if (a.grid != b.grid && (a.size() != b.size() || a.grid->t != b.grid->t))
    fail(ErrorCode::InvalidArgument, "paths live on different grids");
  const TimeGrid& g = *a.grid;
  return sup_norm_T(
      g, T, [&](std::size_t i) -> Vec { return a.h[i] - b.h[i]; },
      [&](std::size_t i) -> Vec { return (a.f[i] - b.f[i]) - g.t[i] * (a.h[i] - b.h[i]); });
}

ScatteringProblem::ScatteringProblem(FieldPtr field, double c, const Vec& v, const Vec& x, const TimeGridSpec& gs,
                                     bool free_line_correction)
    : field_(std::move(field)), c_(c), v_(v), x_(x), corrected_(free_line_correction) {
  if (!field_) fail(ErrorCode::InvalidArgument, "field is null");
  if (!(c > 0.0)) fail(ErrorCode::InvalidArgument, "c must be positive");
  if (v.size() != field_->dim() || x.size() != field_->dim())
    fail(ErrorCode::InvalidArgument, "velocity/offset dimension does not match the field");
  if (!(v.norm() > 0.0)) fail(ErrorCode::InvalidArgument, "velocity must be nonzero");
  gamma_ = impulse_from_velocity(v, c);
  grid_ = std::make_shared<const TimeGrid>(TimeGrid::make(gs, v, x));
  const int d = field_->dim();
  const TimeGrid& g = *grid_;
  const std::size_t stride = std::max<std::size_t>(1, g.size() / 200);
  const Vec zero = Vec::Zero(d);
  for (std::size_t i = 0; i < g.size(); i += stride)
    force_scale_ = std::max(force_scale_, force_at(g.t[i], zero, zero).norm() * g.dtdu[i]);
  free_phi_ = Vec::Zero(d);
  free_moment_ = Vec::Zero(d);
  if (corrected_ && force_scale_ > 0.0) {
    QuadOptions o;
    o.rel_tol = 1e-13;
    o.abs_tol = 1e-17 * force_scale_;
    o.scale = g.tau0;
    o.center = g.center;
    o.max_intervals = 6000;
    o.throw_on_failure = false;
    const auto r = integrate(
        [&](double s) -> StackVec {
          const Vec F = force_at(s, zero, zero);
          return stack2(F, (s - g.center) * F);
        },
        -HUGE_VAL, HUGE_VAL, o);
    free_phi_ = r.value.head(d);
    free_moment_ = r.value.tail(d) + g.center * free_phi_;
  }
}

Vec ScatteringProblem::force_at(double t, const Vec& f, const Vec& h) const {
  return force(v_ * t + x_ + f, v_ + h, *field_, c_);
}

namespace {
QuadOptions tail_options(double scale, double force_scale) {
  QuadOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-18 * force_scale;
  o.scale = scale;
  o.max_intervals = 400;
  o.throw_on_failure = false;
  return o;
}
}  // namespace

StackVec ScatteringProblem::past_tail(double t0, const Vec& q, const Vec& h) const {
  const auto r = integrate(
      [&](double s) -> StackVec {
        const Vec F = force_at(s, q + s * h, h);
        return stack2(F, (t0 - s) * F);
      },
      -HUGE_VAL, t0, tail_options(std::max(std::abs(t0), grid_->tau0), force_scale_));
  return r.value;
}

StackVec ScatteringProblem::future_tail(double tN, const Vec& q, const Vec& h) const {
  const auto r = integrate(
      [&](double s) -> StackVec {
        const Vec F = force_at(s, q + s * h, h);
        return stack2(F, (s - tN) * F);
      },
      tN, HUGE_VAL, tail_options(std::max(std::abs(tN), grid_->tau0), force_scale_));
  return r.value;
}

OperatorImage apply_operator(const ScatteringProblem& prob, const DeflectionPath& path, bool linearized) {
  const TimeGrid& g = *prob.grid();
  if (path.grid->size() != g.size()) fail(ErrorCode::InvalidArgument, "path grid does not match the problem grid");
  const int d = prob.field().dim();
  const std::size_t n = g.size();
  const double c = prob.c();
  const Vec& gam = prob.gamma_v();
  const Mat dg0 = velocity_jacobian(gam, c);

  std::vector<Vec> G(n);
  for (std::size_t i = 0; i < n; ++i) G[i] = prob.force_at(g.t[i], path.f[i], path.h[i]) * g.dtdu[i];

  OperatorImage out;
  out.path = DeflectionPath(prob.grid(), d);
  out.phi.assign(n, Vec::Zero(d));

  const double t0 = g.t[0], tN = g.t[n - 1];
  const StackVec past = prob.past_tail(t0, path.f[0] - t0 * path.h[0], path.h[0]);
  out.phi[0] = past.head(d);
  for (std::size_t i = 0; i + 1 < n; ++i) out.phi[i + 1] = out.phi[i] + segment_integral(G, i, g.du);

  auto increment = [&](const Vec& phi) -> Vec {
    return linearized ? Vec(dg0 * phi) : velocity_increment(gam, phi, c);
  };
  std::vector<Vec> A2(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.path.h[i] = increment(out.phi[i]);
    A2[i] = out.path.h[i] * g.dtdu[i];
  }
  out.path.f[0] = dg0 * past.tail(d);
  for (std::size_t i = 0; i + 1 < n; ++i) out.path.f[i + 1] = out.path.f[i] + segment_integral(A2, i, g.du);

  const StackVec fut = prob.future_tail(tN, path.f[n - 1] - tN * path.h[n - 1], path.h[n - 1]);
  out.phi_inf = out.phi[n - 1] + fut.head(d);
  const Vec w_plus = fut.tail(d);
  if (linearized) {
    out.k = dg0 * out.phi_inf;
    out.l = out.path.f[n - 1] - out.k * tN - dg0 * w_plus;
  } else {
    const auto& corr = prob.operator_correction();
    const Vec phi_grid = out.phi_inf;
    out.phi_inf = phi_grid + corr.first;
    out.k = velocity_increment(gam, out.phi_inf, c);
    const Mat dg = velocity_jacobian(gam + phi_grid, c);
    out.l = out.path.f[n - 1] - velocity_increment(gam, phi_grid, c) * tN - dg * w_plus + corr.second;
  }
  out.H.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.H[i] = out.path.f[i] - out.k * g.t[i] - out.l;
  return out;
}

DeflectionPath zero_path(const ScatteringProblem& prob) { return DeflectionPath(prob.grid(), prob.field().dim()); }

DeflectionPath contraction_operator(const ScatteringProblem& prob, const DeflectionPath& path) {
  return apply_operator(prob, path).path;
}

const std::pair<Vec, Vec>& ScatteringProblem::operator_correction() const {
  std::call_once(op_once_, [&] {
    const int d = field_->dim();
    op_corr_ = {Vec::Zero(d), Vec::Zero(d)};
    if (!corrected_ || force_scale_ == 0.0) return;
    const OperatorImage lin = apply_operator(*this, zero_path(*this), true);
    const Mat dg0 = velocity_jacobian(gamma_, c_);
    op_corr_.first = free_phi_ - lin.phi_inf;
    op_corr_.second = -(dg0 * free_moment_) - lin.l;
  });
  return op_corr_;
}

namespace {

struct Rk4Run {
  std::vector<Vec> y, yd, P;
  Vec a, b, phi_inf_grid;
  std::vector<double> energy;
  double max_angle = 0.0;
};

// RK4 in u on (y, P = p - gamma(v)).  `linear_free` integrates the
// straight-line problem with the linearized velocity map instead.
Rk4Run rk4_run(const ScatteringProblem& prob, bool linear_free) {
  const TimeGrid& g = *prob.grid();
  const int d = prob.field().dim();
  const std::size_t n = g.size();
  const double c = prob.c();
  const Vec& v = prob.v();
  const Vec& gam = prob.gamma_v();
  const Mat dg0 = velocity_jacobian(gam, c);
  const Vec zero = Vec::Zero(d);

  auto ydot = [&](const Vec& P) -> Vec { return linear_free ? Vec(dg0 * P) : velocity_increment(gam, P, c); };
  auto rhs = [&](double u, const Vec& y, const Vec& P, Vec& dy, Vec& dP) {
    const double t = g.center + g.tau0 * std::sinh(u);
    const double j = g.tau0 * std::cosh(u);
    const Vec yd = ydot(P);
    const Vec F = linear_free ? prob.force_at(t, zero, zero) : prob.force_at(t, y, yd);
    dy = yd * j;
    dP = F * j;
  };

  Rk4Run run;
  run.y.resize(n);
  run.yd.resize(n);
  run.P.resize(n);
  const double t0 = g.t[0];
  const StackVec past = prob.past_tail(t0, zero, zero);
  Vec y = dg0 * past.tail(d);
  Vec P = past.head(d);
  // Start on the straight line consistent with the tail data.
  if (!linear_free) {
    const StackVec past2 = prob.past_tail(t0, y - t0 * ydot(P), ydot(P));
    P = past2.head(d);
    y = dg0 * past2.tail(d);
  }
  run.y[0] = y;
  run.P[0] = P;
  run.yd[0] = ydot(P);

  Vec k1y, k1p, k2y, k2p, k3y, k3p, k4y, k4p;
  const double h = g.du;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double u = g.u[i];
    rhs(u, y, P, k1y, k1p);
    rhs(u + 0.5 * h, y + 0.5 * h * k1y, P + 0.5 * h * k1p, k2y, k2p);
    rhs(u + 0.5 * h, y + 0.5 * h * k2y, P + 0.5 * h * k2p, k3y, k3p);
    rhs(g.u[i + 1], y + h * k3y, P + h * k3p, k4y, k4p);
    y += (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    P += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    if (!y.allFinite() || !P.allFinite()) fail(ErrorCode::StepFailure, "trajectory integration produced non-finite values");
    run.y[i + 1] = y;
    run.P[i + 1] = P;
    run.yd[i + 1] = ydot(P);
  }

  const double tN = g.t[n - 1];
  const StackVec fut = linear_free ? prob.future_tail(tN, zero, zero)
                                   : prob.future_tail(tN, y - tN * run.yd[n - 1], run.yd[n - 1]);
  run.phi_inf_grid = P + fut.head(d);
  const Vec w_plus = fut.tail(d);
  if (linear_free) {
    run.a = dg0 * run.phi_inf_grid;
    run.b = y - run.a * tN - dg0 * w_plus;
    return run;
  }
  run.a = velocity_increment(gam, run.phi_inf_grid, c);
  run.b = y - run.a * tN - velocity_jacobian(gam + run.phi_inf_grid, c) * w_plus;

  run.energy.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec xi = v * g.t[i] + prob.x() + run.y[i];
    const Vec vel = v + run.yd[i];
    if (!(vel.norm() < c)) fail(ErrorCode::StepFailure, "numerical speed reached c; refine the time grid");
    const Vec p = gam + run.P[i];
    run.energy[i] = c * c * std::sqrt(1.0 + p.squaredNorm() / (c * c)) + prob.field().potential(xi);
    run.max_angle = std::max(run.max_angle, angle_between(vel, v));
  }
  return run;
}

double relative_drift(const std::vector<double>& e) {
  double m = 0.0;
  for (double x : e) m = std::max(m, std::abs(x - e[0]));
  return e.empty() || e[0] == 0.0 ? m : m / std::abs(e[0]);
}

}  // namespace

const std::pair<Vec, Vec>& ScatteringProblem::ode_correction() const {
  std::call_once(ode_once_, [&] {
    const int d = field_->dim();
    ode_corr_ = {Vec::Zero(d), Vec::Zero(d)};
    if (!corrected_ || force_scale_ == 0.0) return;
    const Rk4Run lin = rk4_run(*this, true);
    const Mat dg0 = velocity_jacobian(gamma_, c_);
    ode_corr_.first = free_phi_ - lin.phi_inf_grid;
    ode_corr_.second = -(dg0 * free_moment_) - lin.b;
  });
  return ode_corr_;
}

TrajectoryResult integrate_trajectory(const ScatteringProblem& prob) {
  Rk4Run run = rk4_run(prob, false);
  TrajectoryResult out;
  out.path = DeflectionPath(prob.grid(), prob.field().dim());
  out.path.f = std::move(run.y);
  out.path.h = std::move(run.yd);
  const auto& corr = prob.ode_correction();
  out.a = velocity_increment(prob.gamma_v(), run.phi_inf_grid + corr.first, prob.c());
  out.b = run.b + corr.second;
  out.energy_drift = relative_drift(run.energy);
  out.max_angle = run.max_angle;
  out.energy = std::move(run.energy);
  return out;
}

void certify_contraction(const ScatteringProblem& prob, const PicardOptions& opt, PicardResult& out) {
  const Vec& v = prob.v();
  const Vec& x = prob.x();
  const double vn = v.norm();
  if (std::abs(v.dot(x)) > 1e-12 * vn * (1.0 + x.norm()))
    fail(ErrorCode::InvalidArgument, "contraction certificate needs v.x = 0");
  if (opt.beta1 < 0.0 || opt.beta2 < 0.0)
    fail(ErrorCode::NotContractive, "decay constants unknown; contraction cannot be certified");
  BoundParams p;
  p.c = prob.c();
  p.d = prob.field().dim();
  p.alpha = prob.field().alpha();
  p.beta1 = opt.beta1;
  p.beta2 = opt.beta2;
  p.x_norm = x.norm();
  p.v_norm = vn;
  const double rmax = std::min({1.0, p.c / std::sqrt(2.0), vn / std::sqrt(2.0)});
  if (opt.beta1 == 0.0 && opt.beta2 == 0.0) {
    out.r = opt.r > 0.0 ? opt.r : 0.5 * rmax;
    out.mu = 0.0;
    out.lambda = 0.0;
    return;
  }
  p.r = opt.r > 0.0 ? opt.r : best_contraction_radius(p);
  p.validate_speed();
  if (z1_equation(p, vn) < 0.0) fail(ErrorCode::NotContractive, "speed is below the threshold z1");
  const OperatorBounds ob = operator_bounds(p);
  out.r = p.r;
  out.mu = ob.mu;
  out.lambda = ob.lambda;
  if (!(ob.mu < 1.0)) fail(ErrorCode::NotContractive, "contraction bound mu = " + std::to_string(ob.mu) + " >= 1");
}

PicardResult solve_deflection_picard(const ScatteringProblem& prob, const PicardOptions& opt) {
  PicardResult res;
  bool certified = false;
  if (opt.require_certificate) {
    certify_contraction(prob, opt, res);
    certified = true;
  }
  DeflectionPath path = zero_path(prob);
  bool converged = false;
  for (int it = 1; it <= opt.max_iter; ++it) {
    OperatorImage img = apply_operator(prob, path);
    const double inc = distance_T(img.path, path);
    path = img.path;
    res.image = std::move(img);
    res.increments.push_back(inc);
    res.iterations = it;
    if (inc <= std::max(opt.tol, opt.rel_tol * norm_T(path))) {
      converged = true;
      break;
    }
  }
  if (!converged) fail(ErrorCode::NoConvergence, "Picard iteration hit max_iter without converging");
  const double floor = 100.0 * std::max(opt.tol, opt.rel_tol * norm_T(path));
  double ratio = 0.0;
  bool any = false;
  for (std::size_t i = 1; i < res.increments.size(); ++i)
    if (res.increments[i - 1] > floor) {
      ratio = std::max(ratio, res.increments[i] / res.increments[i - 1]);
      any = true;
    }
  res.measured_ratio = any ? ratio : 0.0;
  res.norm = norm_T(path);
  if (certified && res.norm <= res.r) path.r = res.r;
  res.path = std::move(path);
  return res;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::Picard: return "picard";
    case Method::Ode: return "ode";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "auto") return Method::Auto;
  if (s == "picard") return Method::Picard;
  if (s == "ode") return Method::Ode;
  fail(ErrorCode::Parse, "unknown method '" + s + "' (expected auto, picard or ode)");
}

ScatteringDatum scattering_data(FieldPtr field, double c, const Vec& v, const Vec& x, const SolverSpec& spec) {
  if (!field) fail(ErrorCode::InvalidArgument, "field is null");
  const double vn = v.norm();
  if (!(vn > 0.0)) fail(ErrorCode::InvalidArgument, "velocity must be nonzero");
  if (!(vn < c)) fail(ErrorCode::Domain, "speed must be below c");
  ScatteringDatum out;
  out.v = v;
  out.x_input = x;
  out.shift = x.dot(v) / (vn * vn);
  Vec xp = x - out.shift * v;
  xp -= (xp.dot(v) / (vn * vn)) * v;
  out.x = xp;

  ScatteringProblem prob(field, c, v, xp, spec.grid, spec.free_line_correction);
  Method m = spec.method;
  PicardResult cert;
  if (m == Method::Auto) {
    m = Method::Ode;
    if (spec.picard.beta1 >= 0.0 && spec.picard.beta2 >= 0.0) {
      try {
        certify_contraction(prob, spec.picard, cert);
        m = Method::Picard;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotContractive && e.code() != ErrorCode::Range) throw;
      }
    }
  }
  if (m == Method::Picard) {
    PicardResult pr = solve_deflection_picard(prob, spec.picard);
    out.a = pr.image.k;
    out.b = pr.image.l;
    out.iterations = pr.iterations;
    out.mu = pr.mu;
    out.r = pr.r;
    out.measured_ratio = pr.measured_ratio;
    const TimeGrid& g = *prob.grid();
    std::vector<double> e(g.size());
    double ang = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec p = prob.gamma_v() + pr.image.phi[i];
      const Vec xi = v * g.t[i] + xp + pr.path.f[i];
      e[i] = c * c * std::sqrt(1.0 + p.squaredNorm() / (c * c)) + field->potential(xi);
      ang = std::max(ang, angle_between(v + pr.path.h[i], v));
    }
    out.energy_drift = relative_drift(e);
    out.max_angle = ang;
  } else {
    TrajectoryResult tr = integrate_trajectory(prob);
    out.a = tr.a;
    out.b = tr.b;
    out.energy_drift = tr.energy_drift;
    out.max_angle = tr.max_angle;
    out.iterations = static_cast<int>(prob.grid()->size() - 1);
  }
  out.method = m;
  out.b += out.shift * out.a;
  return out;
}

}  // namespace emscat
