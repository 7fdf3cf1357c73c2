#include "emscat/bound_suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>

#include "emscat/bounds.hpp"
#include "emscat/csv.hpp"
#include "emscat/dynamics.hpp"
#include "emscat/errors.hpp"
#include "emscat/fields.hpp"
#include "emscat/kinematics.hpp"
#include "emscat/parallel.hpp"

namespace emscat {

namespace {

const double kSqrt2 = std::sqrt(2.0);
constexpr double kPi = 3.14159265358979323846;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

Vec random_unit(Rng& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec u(d);
  do {
    for (int i = 0; i < d; ++i) u(i) = n(rng);
  } while (u.norm() < 1e-12);
  return u / u.norm();
}

// A field family that is linear in its amplitude; `beta` holds the decay
// constants at amplitude 1.
struct Template {
  std::string name;
  std::function<FieldPtr(double)> make;
  std::array<double, 3> beta{};
};

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

std::vector<Template> build_templates() {
  std::vector<Template> t;
  t.push_back({"inverse-power-2d", [](double a) { return make_inverse_power_field(2, a, 2.0, vec2(0.3, -0.2)); }, {}});
  t.push_back({"inverse-power-3d", [](double a) { return make_inverse_power_field(3, a, 1.5, Vec::Zero(3)); }, {}});
  t.push_back(
      {"gaussian-2d", [](double a) { return make_gaussian_field(2, a, 1.5, 2.5, vec2(0.5, 0.5)); }, {}});
  t.push_back(
      {"gaussian-3d", [](double a) { return make_gaussian_field(3, a, 1.0, 2.0, vec3(0.0, 0.3, 0.0)); }, {}});
  t.push_back({"radial-magnetic-2d", [](double a) { return make_radial_magnetic_field(a, 2.0); }, {}});
  t.push_back({"localized-magnetic-3d",
               [](double a) {
                 LocalizedMagneticSpec s;
                 s.b0 = a;
                 s.moment = vec3(0.3, -0.5, 0.8);
                 s.center = vec3(0.2, 0.0, -0.1);
                 return make_localized_magnetic_field(s);
               },
               {}});
  t.push_back({"mixed-2d",
               [](double a) {
                 return make_sum_field({make_inverse_power_field(2, a, 2.0, vec2(0.3, -0.2)),
                                        make_radial_magnetic_field(0.7 * a, 2.0)});
               },
               {}});
  t.push_back({"mixed-3d",
               [](double a) {
                 LocalizedMagneticSpec s;
                 s.b0 = -0.5 * a;
                 s.moment = vec3(1.0, 0.0, 0.0);
                 s.center = Vec::Zero(3);
                 s.profile = Profile::Gaussian;
                 return make_sum_field({make_gaussian_field(3, a, 1.0, 2.0, vec3(0.0, 0.3, 0.0)),
                                        make_localized_magnetic_field(s)});
               },
               {}});
  for (auto& tp : t) {
    const DecayReport rep = verify_decay(*tp.make(1.0));
    if (!rep.pass) fail(ErrorCode::InvalidArgument, "template " + tp.name + " fails the decay check");
    tp.beta = rep.beta;
  }
  return t;
}

const std::vector<Template>& templates() {
  static std::once_flag once;
  static std::vector<Template> t;
  std::call_once(once, [] { t = build_templates(); });
  return t;
}

// Accumulates lhs <= rhs checks for one draw.
class Recorder {
 public:
  void check(const std::string& group, const std::string& name, double lhs, double rhs) {
    InequalityStats& s = row(group, name);
    ++s.checks;
    if (!(lhs <= rhs)) ++s.violations;
    double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? HUGE_VAL : 0.0);
    if (std::isnan(ratio)) ratio = HUGE_VAL;
    s.worst_ratio = std::max(s.worst_ratio, ratio);
  }
  std::vector<InequalityStats> rows;

 private:
  InequalityStats& row(const std::string& group, const std::string& name) {
    for (auto& r : rows)
      if (r.name == name && r.group == group) return r;
    rows.push_back(InequalityStats{group, name, 1, 0, 0, 0.0});
    return rows.back();
  }
};

struct Draw {
  FieldPtr field;
  BoundParams p;
  Vec v, x;
};

// Admissible parameters with |v| >= z1 (and mu < 1 when `contractive`).
Draw make_draw(Rng& rng, bool contractive, double margin) {
  const auto& pool = templates();
  const Template& tp = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  Draw dr;
  BoundParams& p = dr.p;
  p.c = std::exp(uniform(rng, std::log(0.5), std::log(2.0)));
  p.r = uniform(rng, 0.05, 0.95) * std::min(1.0, p.c / kSqrt2);
  p.x_norm = uniform(rng, 0.0, 4.0);
  const double unit_scale = std::max(tp.beta[1], tp.beta[2]);
  double amp = contractive ? std::pow(10.0, uniform(rng, -13.0, -9.0)) : std::pow(10.0, uniform(rng, -6.0, -2.0));
  amp /= unit_scale;
  if (uniform(rng, 0.0, 1.0) < 0.5) amp = -amp;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 40) fail(ErrorCode::NoRoot, "no admissible amplitude found for a bound-suite draw");
    dr.field = tp.make(amp);
    p.d = dr.field->dim();
    p.alpha = dr.field->alpha();
    p.beta0 = margin * std::abs(amp) * tp.beta[0];
    p.beta1 = margin * std::abs(amp) * tp.beta[1];
    p.beta2 = margin * std::abs(amp) * tp.beta[2];
    try {
      double lo = threshold_z1(p);
      if (contractive) lo = std::max(lo, threshold_z(p));
      if (lo < 0.98 * p.c) {
        p.v_norm = lo + uniform(rng, 0.0, 1.0) * (0.995 * p.c - lo);
        break;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoRoot) throw;
    }
    amp *= 0.1;
  }
  const Vec theta = random_unit(rng, p.d);
  Vec xr = random_unit(rng, p.d);
  xr -= xr.dot(theta) * theta;
  if (xr.norm() < 1e-8) xr = Vec::Zero(p.d);
  else xr.normalize();
  dr.v = p.v_norm * theta;
  dr.x = p.x_norm * xr;
  return dr;
}

TimeGridSpec grid_spec(int intervals) {
  TimeGridSpec g;
  g.intervals = intervals;
  return g;
}

// Random piecewise-linear path with max(sup|h|, sup|f - t h|) <= fraction * r.
DeflectionPath random_path(const ScatteringProblem& prob, double r, Rng& rng) {
  const TimeGrid& g = *prob.grid();
  const int d = prob.field().dim();
  DeflectionPath path(prob.grid(), d);
  const std::size_t n = g.size();
  std::vector<Vec> h(n, Vec::Zero(d)), q(n, Vec::Zero(d));
  const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
  if (kind == 0) {
    // Smooth: a few random modes in the grid variable.
    for (auto* arr : {&h, &q})
      for (int j = 0; j < d; ++j)
        for (int m = 1; m <= 3; ++m) {
          const double a = uniform(rng, -1.0, 1.0), ph = uniform(rng, 0.0, 2.0 * kPi);
          for (std::size_t i = 0; i < n; ++i)
            (*arr)[i](j) += a * std::sin(m * kPi * g.u[i] / g.half_width + ph);
        }
  } else if (kind == 1) {
    // Rough: independent node values.
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) {
        h[i](j) = uniform(rng, -1.0, 1.0);
        q[i](j) = uniform(rng, -1.0, 1.0);
      }
  } else {
    // Localized: a bump of random width near a random time.
    const double uc = uniform(rng, -3.0, 3.0), w = uniform(rng, 0.05, 2.0);
    const Vec dh = random_unit(rng, d), dq = random_unit(rng, d);
    for (std::size_t i = 0; i < n; ++i) {
      const double b = std::exp(-std::pow((g.u[i] - uc) / w, 2));
      h[i] = b * dh;
      q[i] = b * dq;
    }
  }
  double sh = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sh = std::max(sh, h[i].norm());
    sq = std::max(sq, q[i].norm());
  }
  const double fh = uniform(rng, 0.0, 0.999) * r / std::max(sh, 1e-300);
  const double fq = uniform(rng, 0.0, 0.999) * r / std::max(sq, 1e-300);
  for (std::size_t i = 0; i < n; ++i) {
    path.h[i] = fh * h[i];
    path.f[i] = fq * q[i] + g.t[i] * path.h[i];
  }
  return path;
}

// Second path: independent, or a small perturbation of the first.
DeflectionPath second_path(const ScatteringProblem& prob, const DeflectionPath& first, double r, Rng& rng) {
  if (uniform(rng, 0.0, 1.0) < 0.5) return random_path(prob, r, rng);
  const DeflectionPath pert = random_path(prob, r, rng);
  const double eps = std::pow(10.0, uniform(rng, -6.0, 0.0));
  DeflectionPath out = first;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.f[i] += eps * pert.f[i];
    out.h[i] += eps * pert.h[i];
  }
  const double nrm = norm_T(out);
  if (nrm > 0.999 * r) {
    const double s = 0.999 * r / nrm;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.f[i] *= s;
      out.h[i] *= s;
    }
  }
  return out;
}

double sup_over_segment(const std::function<double(double)>& fn) {
  double m = 0.0;
  for (int k = 0; k <= 64; ++k) m = std::max(m, fn(k / 64.0));
  return m;
}

void path_draw(Rng& rng, const BoundSuiteOptions& opt, Recorder& rec) {
  const Draw dr = make_draw(rng, false, opt.beta_margin);
  const BoundParams& p = dr.p;
  const Field& field = *dr.field;
  const double c = p.c;
  const int d = p.d;
  ScatteringProblem prob(dr.field, c, dr.v, dr.x, grid_spec(opt.grid_intervals));
  const TimeGrid& g = *prob.grid();
  const std::size_t n = g.size();

  const DeflectionPath p1 = random_path(prob, p.r, rng);
  const DeflectionPath p2 = second_path(prob, p1, p.r, rng);
  const OperatorImage a1 = apply_operator(prob, p1);
  const OperatorImage a2 = apply_operator(prob, p2);
  const OperatorBounds ob = operator_bounds(p);
  const double mu_printed = mu_bound(p);

  // Contraction-map bounds on the whole line and on random past horizons.
  rec.check("contraction", "image_norm", std::max(norm_T(a1.path), norm_T(a2.path)), ob.rho);
  const double dist = distance_T(p1, p2);
  if (dist > 0.0) rec.check("contraction", "lipschitz", distance_T(a1.path, a2.path), ob.lambda * dist);
  rec.check("contraction", "common_majorant", std::max(ob.rho / p.r, ob.lambda), mu_printed);
  std::size_t past_end = 0;
  while (past_end + 1 < n && g.t[past_end + 1] <= 0.0) ++past_end;
  for (int k = 0; k < 4; ++k) {
    const double T = k == 0 ? 0.0 : g.t[std::uniform_int_distribution<std::size_t>(0, past_end)(rng)];
    BoundParams pT = p;
    pT.T = T;
    const OperatorBounds obT = operator_bounds(pT);
    rec.check("contraction", "image_norm_past", std::max(norm_T(a1.path, T), norm_T(a2.path, T)), obT.rho_T);
    const double dT = distance_T(p1, p2, T);
    // dT = 0 (paths agree on the horizon): the causal images must agree too.
    rec.check("contraction", "lipschitz_past", distance_T(a1.path, a2.path, T), obT.lambda_T * dT);
    rec.check("contraction", "common_majorant_past", std::max(obT.rho_T / p.r, obT.lambda_T), obT.mu_T);
  }

  // Pointwise envelopes of the image.
  for (const OperatorImage* a : {&a1, &a2}) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = g.t[i];
      if (t <= 0.0) {
        rec.check("envelopes", "velocity_past", a->path.h[i].norm(), zeta_minus(p, t));
        rec.check("envelopes", "deflection_past", a->path.f[i].norm(), xi_minus(p, t));
      }
      if (t >= 0.0) {
        rec.check("envelopes", "remainder_velocity_future", (a->path.h[i] - a->k).norm(), zeta_plus(p, t));
        rec.check("envelopes", "remainder_future", a->H[i].norm(), xi_plus(p, t));
      }
    }
    rec.check("envelopes", "k_bound", a->k.norm(), 2.0 * zeta_minus(p, 0.0));
    rec.check("envelopes", "l_bound", a->l.norm(), 2.0 * xi_minus(p, 0.0));
  }

  // Force estimates at random points.
  const double b1 = p.beta1, b2 = p.beta2, alpha = p.alpha;
  for (int k = 0; k < 8; ++k) {
    const Vec x = (k == 0 ? 0.0 : std::pow(10.0, uniform(rng, -2.0, 2.0))) * random_unit(rng, d);
    const Vec y = uniform(rng, 0.0, 3.0 * c) * random_unit(rng, d);
    rec.check("force", "force_bound", force(x, y, field, c).norm(),
              2.0 * d * b1 * std::pow(1.0 + x.norm(), -(alpha + 1.0)) * (1.0 + y.norm() / c));
    const double dx = std::pow(10.0, uniform(rng, -4.0, 1.0)), dy = std::pow(10.0, uniform(rng, -4.0, 0.0));
    const Vec x2 = x + dx * random_unit(rng, d);
    const Vec y2 = y + dy * random_unit(rng, d);
    const double sx = sup_over_segment([&](double e) { return std::pow(1.0 + (e * x + (1 - e) * x2).norm(), -(alpha + 1.0)); });
    const double sxy = sup_over_segment([&](double e) {
      return (1.0 + (e * y + (1 - e) * y2).norm() / c) * std::pow(1.0 + (e * x + (1 - e) * x2).norm(), -(alpha + 2.0));
    });
    const double rhs = 2.0 * d * b1 / c * sx * (y - y2).norm() + 2.0 * d * std::sqrt(double(d)) * b2 * sxy * (x - x2).norm();
    rec.check("force", "force_lipschitz", (force(x, y, field, c) - force(x2, y2, field, c)).norm(), rhs);
  }

  // Path growth and the distance lower bound, at nodes and beyond the grid.
  const double pn = norm_T(p1);
  auto at_time = [&](double s) {
    rec.check("force", "path_offset", p1.f_at(s).norm(), (1.0 + std::abs(s)) * pn);
    rec.check("force", "path_velocity", p1.h_at(s).norm(), pn);
    rec.check("force", "distance_growth", 1.0 + p.x_norm / kSqrt2 + (p.v_norm / kSqrt2 - p.r) * std::abs(s),
              2.0 * (1.0 + (dr.x + dr.v * s + p1.f_at(s)).norm()));
  };
  for (std::size_t i = 0; i < n; i += 7) at_time(g.t[i]);
  for (int k = 0; k < 8; ++k) at_time(uniform(rng, -2.0, 2.0) * g.t[n - 1]);

  // Force integrals along the perturbed paths.
  const double fib = force_integral_bound(p);
  for (const OperatorImage* a : {&a1, &a2}) {
    double m = a->phi_inf.norm();
    for (const Vec& ph : a->phi) m = std::max(m, ph.norm());
    rec.check("force", "force_integral", m, fib);
  }
  const Vec gam = impulse_from_velocity(dr.v, c);
  for (int k = 0; k < 16; ++k) {
    auto idx = [&] { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    const std::size_t it = idx(), itau = idx();
    const bool minus_inf = uniform(rng, 0.0, 1.0) < 0.25;
    const std::size_t isig = std::uniform_int_distribution<std::size_t>(0, itau)(rng);
    const double e1 = uniform(rng, -1.0, 1.0), e2 = uniform(rng, -1.0, 1.0);
    const double beta = uniform(rng, 0.05, 3.0);
    const Vec phi2 = a2.phi[itau] - (minus_inf ? Vec::Zero(d) : a2.phi[isig]);
    const Vec z = gam + e1 * a1.phi[it] + e2 * phi2;
    const double v2 = p.v_norm * p.v_norm;
    rec.check("force", "impulse_damping", std::pow(1.0 + z.squaredNorm() / (c * c), -beta),
              std::pow(1.0 + v2 / (4.0 * (c * c - v2)), -beta));
  }
}

void solution_draw(Rng& rng, const BoundSuiteOptions& opt, Recorder& rec) {
  const Draw dr = make_draw(rng, true, opt.beta_margin);
  const BoundParams& p = dr.p;
  const double c = p.c;
  ScatteringProblem prob(dr.field, c, dr.v, dr.x, grid_spec(opt.grid_intervals));
  const TimeGrid& g = *prob.grid();
  const std::size_t n = g.size();

  PicardOptions po;
  po.beta1 = p.beta1;
  po.beta2 = p.beta2;
  po.r = p.r;
  const PicardResult fixed = solve_deflection_picard(prob, po);
  const OperatorImage free = apply_operator(prob, zero_path(prob));
  const ProximityConstants eps = proximity_constants(p);
  const double gam = lorentz_factor(p.v_norm, c);
  const Vec& phi_free = free.phi_inf;  // int F(x + v s, v) ds

  rec.check("proximity", "k_proximity", (fixed.image.k - free.k).norm(), eps.eps_a_prime);
  rec.check("proximity", "k_scaled_proximity", (gam * fixed.image.k - phi_free).norm(), eps.eps_a);
  rec.check("proximity", "l_proximity", (fixed.image.l - free.l).norm(), eps.eps_b);

  // The integrated trajectory as an independent solution.
  const TrajectoryResult tr = integrate_trajectory(prob);
  const Vec k_free = velocity_increment(prob.gamma_v(), phi_free, c);
  rec.check("solution", "radius", norm_T(tr.path), p.r);
  rec.check("solution", "a_proximity", (tr.a - k_free).norm(), eps.eps_a_prime);
  rec.check("solution", "a_scaled_proximity", (gam * tr.a - phi_free).norm(), eps.eps_a);
  rec.check("solution", "b_proximity", (tr.b - free.l).norm(), eps.eps_b);
  rec.check("solution", "a_bound", tr.a.norm(), 2.0 * zeta_minus(p, 0.0));
  rec.check("solution", "b_bound", tr.b.norm(), 2.0 * xi_minus(p, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = g.t[i];
    if (t <= 0.0) {
      rec.check("solution", "velocity_past", tr.path.h[i].norm(), zeta_minus(p, t));
      rec.check("solution", "deflection_past", tr.path.f[i].norm(), xi_minus(p, t));
    }
    if (t >= 0.0) {
      rec.check("solution", "remainder_velocity_future", (tr.path.h[i] - tr.a).norm(), zeta_plus(p, t));
      rec.check("solution", "remainder_future", (tr.path.f[i] - tr.a * t - tr.b).norm(), xi_plus(p, t));
    }
  }
}

}  // namespace

bool BoundSuiteReport::pass() const { return violations() == 0 && !rows.empty(); }

long BoundSuiteReport::violations() const {
  long v = 0;
  for (const auto& r : rows) v += r.violations;
  return v;
}

BoundSuiteReport run_bound_suite(const BoundSuiteOptions& opt) {
  if (opt.draws < 1) fail(ErrorCode::InvalidArgument, "bound suite needs at least one draw");
  templates();
  BoundSuiteReport rep;
  auto run_kind = [&](std::uint64_t kind, void (*fn)(Rng&, const BoundSuiteOptions&, Recorder&)) {
    std::vector<Recorder> per(static_cast<std::size_t>(opt.draws));
    parallel_for(per.size(), opt.threads, [&](std::size_t k) {
      std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                        static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(k)};
      Rng rng(seq);
      fn(rng, opt, per[k]);
    });
    std::vector<InequalityStats> merged;
    for (const Recorder& r : per)
      for (const InequalityStats& s : r.rows) {
        auto it = std::find_if(merged.begin(), merged.end(),
                               [&](const InequalityStats& m) { return m.group == s.group && m.name == s.name; });
        if (it == merged.end()) {
          merged.push_back(s);
        } else {
          it->draws += s.draws;
          it->checks += s.checks;
          it->violations += s.violations;
          it->worst_ratio = std::max(it->worst_ratio, s.worst_ratio);
        }
      }
    rep.rows.insert(rep.rows.end(), merged.begin(), merged.end());
  };
  if (opt.path_draws) run_kind(1, path_draw);
  if (opt.solution_draws) run_kind(2, solution_draw);
  return rep;
}

std::string bound_suite_csv(const BoundSuiteReport& rep) {
  std::ostringstream os;
  os << "group,name,draws,checks,violations,worst_ratio\n";
  for (const auto& r : rep.rows)
    os << r.group << ',' << r.name << ',' << r.draws << ',' << r.checks << ',' << r.violations << ','
       << format_double(r.worst_ratio) << '\n';
  return os.str();
}

}  // namespace emscat
