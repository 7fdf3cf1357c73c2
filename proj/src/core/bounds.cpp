#include "emscat/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "emscat/errors.hpp"

namespace emscat {

namespace {

const double kSqrt2 = std::sqrt(2.0);

double damping(const BoundParams& p, double v) {
  const double c2 = p.c * p.c;
  return 1.0 / std::sqrt(1.0 + v * v / (4.0 * (c2 - v * v)));
}

struct Terms {
  double D;   // 1/sqrt(1 + v^2/(4(c^2-v^2)))
  double a;   // v/sqrt2 - r
  double bx;  // 1 + |x|/sqrt2
  double w;   // v/sqrt2 + 1 - r
  double dd;  // d sqrt d
};

Terms terms(const BoundParams& p, double v) {
  return Terms{damping(p, v), v / kSqrt2 - p.r, 1.0 + p.x_norm / kSqrt2, v / kSqrt2 + 1.0 - p.r,
               p.d * std::sqrt(double(p.d))};
}

// Bisection to machine precision on [lo, hi] for an increasing function.
double bisect(const std::function<double(double)>& f, double lo, double hi, const char* what) {
  double flo = f(lo), fhi = f(hi);
  if (!(flo < 0.0 && fhi > 0.0)) {
    std::ostringstream os;
    os << what << ": no sign change on [" << lo << ", " << hi << "]";
    fail(ErrorCode::NoRoot, os.str());
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (fm < 0.0) lo = mid; else hi = mid;
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

double check_speed(const BoundParams& p) {
  p.validate_speed();
  return p.v_norm;
}

}  // namespace

void BoundParams::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorCode::Range, m); };
  if (!(c > 0.0) || !std::isfinite(c)) bad("c must be positive");
  if (d < 2) bad("d must be at least 2");
  if (!(alpha > 1.0)) bad("alpha must exceed 1");
  if (!(beta0 >= 0.0 && beta1 >= 0.0 && beta2 >= 0.0) || !std::isfinite(beta0 + beta1 + beta2))
    bad("decay constants must be finite and nonnegative");
  if (!(r > 0.0 && r <= 1.0)) bad("r must lie in (0, 1]");
  if (!(r < c / kSqrt2)) bad("r must be below c/sqrt(2)");
  if (!(x_norm >= 0.0) || !std::isfinite(x_norm)) bad("|x| must be finite and nonnegative");
}

void BoundParams::validate_speed() const {
  validate();
  if (!(v_norm > kSqrt2 * r)) fail(ErrorCode::Range, "|v| must exceed sqrt(2) r");
  if (!(v_norm < c)) fail(ErrorCode::Range, "|v| must be below c");
}

double z1_equation(const BoundParams& p, double z) {
  const double a = z / kSqrt2 - p.r;
  const double bx = 1.0 + p.x_norm / kSqrt2;
  return z / std::sqrt(1.0 - z * z / (p.c * p.c)) -
         std::pow(2.0, p.alpha + 5.0) * p.beta1 * p.d * (2.0 + p.r / p.c) / (p.alpha * a * std::pow(bx, p.alpha));
}

double z2_equation(const BoundParams& p, double z) {
  const double bx = 1.0 + p.x_norm / kSqrt2;
  return z / std::sqrt(1.0 - z * z / (p.c * p.c)) -
         32.0 * p.beta1 * p.d / (p.alpha * (z / kSqrt2) * std::pow(bx, p.alpha));
}

double threshold_z1(const BoundParams& p) {
  p.validate();
  const double lo = kSqrt2 * p.r * (1.0 + 1e-15) + 1e-13 * p.c, hi = p.c * (1.0 - 1e-15);
  return bisect([&](double z) { return z1_equation(p, z); }, lo, hi, "z1");
}

double threshold_z(const BoundParams& p) {
  p.validate();
  const double lo = kSqrt2 * p.r * (1.0 + 1e-15) + 1e-13 * p.c, hi = p.c * (1.0 - 1e-15);
  // mu decreases in |v|; bisect on -log(mu).
  return bisect(
      [&](double z) {
        BoundParams q = p;
        q.v_norm = z;
        return -std::log(mu_bound(q));
      },
      lo, hi, "z");
}

double threshold_z2(const BoundParams& p) {
  p.validate();
  return bisect([&](double z) { return z2_equation(p, z); }, 1e-13 * p.c, p.c * (1.0 - 1e-15), "z2");
}

double mu_bound(const BoundParams& p) {
  const double v = check_speed(p);
  const Terms t = terms(p, v);
  const double bt = p.beta_tilde();
  const double ic = 1.0 + 1.0 / p.c;
  return t.D * std::pow(2.0, 2.0 * p.alpha + 9.0) * 3.0 * p.d * p.d * p.d * bt * (1.0 + bt) * ic * ic * ic *
         t.w * t.w * t.w / (p.r * (p.alpha - 1.0) * std::pow(t.a, 4) * std::pow(t.bx, p.alpha - 1.0));
}

OperatorBounds operator_bounds(const BoundParams& p) {
  const double v = check_speed(p);
  const Terms t = terms(p, v);
  const double bt = p.beta_tilde();
  const double ic = 1.0 + 1.0 / p.c;
  const double am1 = p.alpha - 1.0;
  OperatorBounds o;
  o.rho = t.D * std::pow(2.0, p.alpha + 3.0) * t.dd * p.beta1 * (2.0 + p.r / p.c) * t.w /
          (am1 * t.a * t.a * std::pow(t.bx, am1));
  o.lambda = t.D * std::pow(2.0, 2.0 * p.alpha + 9.0) * 3.0 * p.d * p.d * p.d * bt * (1.0 + bt) * ic * ic * ic *
             t.w * t.w * t.w / (am1 * std::pow(t.a, 4) * std::pow(t.bx, am1));
  o.mu = o.lambda / p.r;
  if (p.T <= 0.0) {
    const double sh = std::pow(t.bx - t.a * p.T, am1);
    o.rho_T = t.D * std::pow(2.0, p.alpha + 2.0) * t.dd * p.beta1 * (2.0 + p.r / p.c) * t.w / (am1 * t.a * t.a * sh);
    o.lambda_T = t.D * std::pow(2.0, p.alpha + 4.0) * p.d * p.d * bt * ic * t.w * t.w / (am1 * t.a * t.a * t.a * sh);
    o.mu_T = o.lambda_T / p.r;
  }
  return o;
}

namespace {
double envelope_numerator(const BoundParams& p, const Terms& t) {
  return t.D * t.dd * p.beta1 * std::pow(2.0, p.alpha + 2.0) * (2.0 + p.r / p.c);
}
void need_past(double t) {
  if (t > 0.0) fail(ErrorCode::Range, "past envelope needs t <= 0");
}
void need_future(double t) {
  if (t < 0.0) fail(ErrorCode::Range, "future envelope needs t >= 0");
}
}  // namespace

double zeta_minus(const BoundParams& p, double t) {
  need_past(t);
  const Terms k = terms(p, check_speed(p));
  return envelope_numerator(p, k) / (p.alpha * k.a * std::pow(k.bx - k.a * t, p.alpha));
}

double xi_minus(const BoundParams& p, double t) {
  need_past(t);
  const Terms k = terms(p, check_speed(p));
  return envelope_numerator(p, k) / (p.alpha * (p.alpha - 1.0) * k.a * k.a * std::pow(k.bx - k.a * t, p.alpha - 1.0));
}

double zeta_plus(const BoundParams& p, double t) {
  need_future(t);
  const Terms k = terms(p, check_speed(p));
  return envelope_numerator(p, k) / (p.alpha * k.a * std::pow(k.bx + k.a * t, p.alpha));
}

double xi_plus(const BoundParams& p, double t) {
  need_future(t);
  const Terms k = terms(p, check_speed(p));
  return envelope_numerator(p, k) / (p.alpha * (p.alpha - 1.0) * k.a * k.a * std::pow(k.bx + k.a * t, p.alpha - 1.0));
}

Envelopes envelopes(const BoundParams& p, double t_past, double t_future) {
  return Envelopes{zeta_minus(p, t_past), xi_minus(p, t_past), zeta_plus(p, t_future), xi_plus(p, t_future)};
}

double force_integral_bound(const BoundParams& p) {
  const Terms t = terms(p, check_speed(p));
  return p.beta1 * p.d * std::pow(2.0, p.alpha + 3.0) * (2.0 + p.r / p.c) / (p.alpha * t.a * std::pow(t.bx, p.alpha));
}

ProximityConstants proximity_constants(const BoundParams& p) {
  const Terms t = terms(p, check_speed(p));
  const double rho = operator_bounds(p).rho;
  const double bt = p.beta_tilde();
  const double ic = 1.0 + 1.0 / p.c;
  ProximityConstants e;
  e.eps_a_prime = p.d * p.d * bt * ic * std::pow(2.0, p.alpha + 5.0) * t.w /
                  (p.alpha * t.a * t.a * std::pow(t.bx, p.alpha)) * rho * t.D;
  e.eps_a = std::pow(2.0, p.alpha + 5.0) * t.dd * bt * ic * t.w / (p.alpha * t.a * t.a * std::pow(t.bx, p.alpha)) * rho;
  e.eps_b = std::pow(2.0, 2.0 * p.alpha + 9.0) * p.d * p.d * p.d * bt * (1.0 + bt) * 3.0 * ic * ic * ic * t.w * t.w /
            ((p.alpha - 1.0) * std::pow(t.a, 4) * std::pow(t.bx, p.alpha - 1.0)) * rho * t.D;
  return e;
}

Theorem1Constants theorem1_constants(const BoundParams& p, double c_fit) {
  p.validate();
  Theorem1Constants k;
  k.C_fit = c_fit;
  if (p.beta_tilde() == 0.0 && p.beta1 == 0.0) {
    // No force: every threshold degenerates to its lower bracket.
    k.trivial = true;
    k.z = k.z1 = kSqrt2 * p.r;
    k.z2 = 0.0;
    k.s1 = k.s2 = kSqrt2 * p.r;
    k.C1 = 0.0;
    k.C2_explicit = 0.0;
    k.C2 = c_fit;
    return k;
  }
  k.z1 = threshold_z1(p);
  k.z = threshold_z(p);
  k.z2 = threshold_z2(p);
  k.s1 = std::max(k.z, k.z1);
  k.s2 = std::max({k.z, k.z1, k.z2});
  const double bt = p.beta_tilde();
  const double ic = 1.0 + 1.0 / p.c;
  const double bx = 1.0 + p.x_norm / kSqrt2;
  const double w = p.c / kSqrt2 + 1.0 - p.r;
  const double a1 = k.s1 / kSqrt2 - p.r;
  const double a2 = k.s2 / kSqrt2 - p.r;
  const double d = p.d;
  k.C1 = d * d * d * bt * bt * std::pow(2.0, 2.0 * p.alpha + 9.0) * ic * ic * p.c * w * w /
         (p.alpha * (p.alpha - 1.0) * std::pow(a1, 4) * std::pow(bx, 2.0 * p.alpha - 1.0));
  k.C2_explicit = 4.0 * d * d * d * d * std::sqrt(d) * bt * bt * (1.0 + bt) * std::pow(2.0, 3.0 * p.alpha + 15.0) *
                  std::pow(ic, 4) * w * w * w /
                  ((p.alpha - 1.0) * (p.alpha - 1.0) * std::pow(a2, 6) * std::pow(bx, 2.0 * p.alpha - 2.0));
  k.C2 = c_fit + k.C2_explicit;
  return k;
}

ConstantSet constant_set(const BoundParams& p, double c_fit) {
  ConstantSet s;
  s.v_norm = p.v_norm;
  s.thm = theorem1_constants(p, c_fit);
  s.z1 = s.thm.z1;
  s.z = s.thm.z;
  s.z2 = s.thm.z2;
  s.ops = operator_bounds(p);
  s.zeta_minus0 = zeta_minus(p, 0.0);
  s.xi_minus0 = xi_minus(p, 0.0);
  s.zeta_plus0 = zeta_plus(p, 0.0);
  s.xi_plus0 = xi_plus(p, 0.0);
  s.eps = proximity_constants(p);
  return s;
}

double best_contraction_radius(BoundParams p) {
  const double rmax = std::min({1.0, p.c / kSqrt2, p.v_norm / kSqrt2});
  if (!(rmax > 0.0) || !(p.v_norm < p.c)) fail(ErrorCode::Range, "no admissible radius for this speed");
  auto mu_at = [&](double r) {
    p.r = r;
    if (z1_equation(p, p.v_norm) < 0.0) return HUGE_VAL;  // |v| below z1(r)
    return mu_bound(p);
  };
  const int n = 400;
  double best_r = 0.0, best = HUGE_VAL;
  for (int k = 1; k < n; ++k) {
    const double r = rmax * k / n;
    const double m = mu_at(r);
    if (m < best) { best = m; best_r = r; }
  }
  if (!std::isfinite(best)) fail(ErrorCode::NotContractive, "speed is below z1 for every admissible radius");
  // Golden-section refinement on the bracketing cell.
  double lo = std::max(rmax / n * 0.5, best_r - rmax / n), hi = std::min(rmax * (1.0 - 0.5 / n), best_r + rmax / n);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = mu_at(x1), f2 = mu_at(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) { hi = x2; x2 = x1; f2 = f1; x1 = hi - g * (hi - lo); f1 = mu_at(x1); }
    else { lo = x1; x1 = x2; f1 = f2; x2 = lo + g * (hi - lo); f2 = mu_at(x2); }
  }
  const double rc = 0.5 * (lo + hi);
  return mu_at(rc) <= best ? rc : best_r;
}

double best_threshold_radius(BoundParams p) {
  const double rmax = std::min(1.0, p.c / kSqrt2);
  auto s1_at = [&](double r) {
    p.r = r;
    try {
      return std::max(threshold_z(p), threshold_z1(p));
    } catch (const Error&) {
      return HUGE_VAL;
    }
  };
  const int n = 200;
  double best_r = rmax * 0.5, best = HUGE_VAL;
  for (int k = 1; k < n; ++k) {
    const double r = rmax * k / n;
    const double s = s1_at(r);
    if (s < best) { best = s; best_r = r; }
  }
  if (!std::isfinite(best)) fail(ErrorCode::NoRoot, "no radius admits thresholds below c");
  double lo = std::max(rmax * 0.5 / n, best_r - rmax / n), hi = std::min(rmax * (1.0 - 0.5 / n), best_r + rmax / n);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = s1_at(x1), f2 = s1_at(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) { hi = x2; x2 = x1; f2 = f1; x1 = hi - g * (hi - lo); f1 = s1_at(x1); }
    else { lo = x1; x1 = x2; f1 = f2; x2 = lo + g * (hi - lo); f2 = s1_at(x2); }
  }
  const double rc = 0.5 * (lo + hi);
  return s1_at(rc) <= best ? rc : best_r;
}

}  // namespace emscat
