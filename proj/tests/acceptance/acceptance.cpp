// Acceptance suite: one PASS/FAIL line per criterion.
//   emscat_acceptance [--criterion N]... [--configs DIR]
// Exit status 0 when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "emscat/asymptotics.hpp"
#include "emscat/bound_suite.hpp"
#include "emscat/config.hpp"
#include "emscat/csv.hpp"
#include "emscat/dynamics.hpp"
#include "emscat/errors.hpp"
#include "emscat/experiments.hpp"
#include "emscat/fields.hpp"
#include "emscat/reconstruct.hpp"
#include "emscat/xray.hpp"

#ifndef EMSCAT_CONFIG_DIR
#define EMSCAT_CONFIG_DIR "configs"
#endif

using namespace emscat;
namespace fs = std::filesystem;

namespace {

std::string g_configs = EMSCAT_CONFIG_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Vec gaussian_vec(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = n(rng);
  return v;
}

Ray random_ray(std::mt19937_64& rng, int d, double scale = 1.0) {
  return project_to_ray(gaussian_vec(rng, d), scale * gaussian_vec(rng, d));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("emscat_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

// Rows of a CSV file with a header line, as numbers (nan allowed).
std::vector<std::vector<std::string>> csv_rows(const fs::path& path) {
  std::istringstream in(read_text_file(path.string()));
  std::string line;
  std::vector<std::vector<std::string>> rows;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(split(line, ','));
  return rows;
}

double num(const std::string& s) { return s == "nan" ? NAN : parse_double(trim(s)); }

FieldPtr mixed_field_2d() {
  return make_sum_field({make_gaussian_field(2, 0.2, 1.5, 2.0, vec({0.3, -0.2})), make_radial_magnetic_field(0.2, 2.0)});
}

FieldPtr mixed_field_3d() {
  LocalizedMagneticSpec m;
  m.d = 3;
  m.b0 = 0.4;
  m.moment = vec({0.2, -0.6, 0.5});
  m.center = vec({0.1, -0.2, 0.3});
  m.kappa = 2.0;
  return make_sum_field({make_gaussian_field(3, 0.3, 1.2, 2.0, vec({-0.2, 0.1, 0.0})),
                         make_localized_magnetic_field(m)});
}

SolverSpec ode_spec(int intervals) {
  SolverSpec s;
  s.method = Method::Ode;
  s.grid.intervals = intervals;
  return s;
}

SolverSpec picard_spec(const Field& f, int intervals) {
  const DecayReport r = verify_decay(f);
  SolverSpec s;
  s.method = Method::Picard;
  s.grid.intervals = intervals;
  s.picard.beta1 = 1.02 * r.beta[1];
  s.picard.beta2 = 1.02 * r.beta[2];
  return s;
}

// 1. Zero field: a_sc = b_sc = 0 to 1e-10 for 100 random (v, x).
Outcome zero_field_identity() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> speed(0.05, 0.999);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 3;
    const double c = std::exp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
    Vec v = gaussian_vec(rng, d);
    v *= c * speed(rng) / v.norm();
    const Vec x = 3.0 * gaussian_vec(rng, d);
    SolverSpec s = ode_spec(400);
    if (k % 2) {
      s.method = Method::Picard;
      s.picard.beta1 = s.picard.beta2 = 0.0;
    }
    const ScatteringDatum dt = scattering_data(make_zero_field(d), c, v, x, s);
    worst = std::max({worst, sup_norm(dt.a), sup_norm(dt.b)});
  }
  return {worst <= 1e-10, "max |a_sc|, |b_sc| = " + fmt(worst) + " over 100 draws (tol 1e-10)"};
}

// 2. Energy drift and |v + a_sc| - |v| below 1e-8 on every dynamics run.
Outcome conservation() {
  struct Case {
    FieldPtr field;
    bool picard;
  };
  const std::vector<Case> cases{{mixed_field_2d(), false},
                                {mixed_field_3d(), false},
                                {make_inverse_power_field(2, 0.3, 2.0, vec({0.2, 0.1})), false},
                                {make_gaussian_field(2, 1e-10, 1.5, 2.0, vec({0.3, -0.2})), true}};
  std::mt19937_64 rng(202);
  double drift = 0.0, speed_err = 0.0;
  int runs = 0;
  for (const Case& cs : cases) {
    const int d = cs.field->dim();
    for (double s : {0.5, 0.9, 0.99, 0.999}) {
      if (cs.picard && s < 0.99) continue;
      for (int k = 0; k < 3; ++k) {
        Vec v = gaussian_vec(rng, d);
        v *= s / v.norm();
        Vec x = gaussian_vec(rng, d);
        x -= x.dot(v) / v.squaredNorm() * v;
        if (cs.picard) x *= 0.5 / x.norm();
        const SolverSpec spec = cs.picard ? picard_spec(*cs.field, 4000) : ode_spec(2000);
        const ScatteringDatum dt = scattering_data(cs.field, 1.0, v, x, spec);
        drift = std::max(drift, dt.energy_drift);
        speed_err = std::max(speed_err, std::abs((v + dt.a).norm() - v.norm()));
        ++runs;
      }
    }
  }
  return {drift < 1e-8 && speed_err < 1e-8, "max relative energy drift " + fmt(drift) + ", max ||v+a_sc|-|v|| " +
                                                fmt(speed_err) + " over " + std::to_string(runs) +
                                                " runs (tol 1e-8)"};
}

// 3. Picard vs ODE below 1e-6 for >= 20 points with certified mu < 0.5.
Outcome method_agreement() {
  const std::vector<FieldPtr> fields{make_gaussian_field(2, 1e-10, 1.5, 2.0, vec({0.3, -0.2})),
                                     make_inverse_power_field(2, 1e-10, 2.0, vec({0.0, 0.0})),
                                     make_radial_magnetic_field(1e-10, 2.0),
                                     make_gaussian_field(3, 1e-10, 1.2, 2.0, vec({0.1, 0.0, -0.2}))};
  int points = 0;
  double worst_abs = 0.0, worst_rel = 0.0, worst_mu = 0.0;
  for (const FieldPtr& f : fields) {
    const int d = f->dim();
    const SolverSpec p = picard_spec(*f, 4000);
    for (double s : {0.99, 0.995, 0.999}) {
      for (double q : {-0.5, 0.25, 0.5}) {
        const Vec v = s * unit(d, 0), x = q * unit(d, 1);
        PicardResult cert;
        try {
          certify_contraction(ScatteringProblem(f, 1.0, v, x, p.grid), p.picard, cert);
        } catch (const Error&) {
          continue;
        }
        if (!(cert.mu < 0.5)) continue;
        const ScatteringDatum a = scattering_data(f, 1.0, v, x, p);
        const ScatteringDatum b = scattering_data(f, 1.0, v, x, ode_spec(4000));
        const double da = (a.a - b.a).norm(), db = (a.b - b.b).norm();
        worst_abs = std::max({worst_abs, da, db});
        worst_rel = std::max(worst_rel, std::hypot(da, db) / std::hypot(b.a.norm(), b.b.norm()));
        worst_mu = std::max(worst_mu, a.mu);
        ++points;
      }
    }
  }
  const bool pass = points >= 20 && worst_abs < 1e-6 && worst_rel < 1e-6;
  return {pass, std::to_string(points) + " points with mu <= " + fmt(worst_mu) + ": max |diff| " + fmt(worst_abs) +
                    ", max relative diff " + fmt(worst_rel) + " (need >= 20 points, tol 1e-6)"};
}

// 4. Randomized bound suite: 1000 draws, no violations.
Outcome bound_suite() {
  BoundSuiteOptions o;
  o.draws = 1000;
  const BoundSuiteReport r = run_bound_suite(o);
  double worst = 0.0;
  long checks = 0;
  int min_draws = r.rows.empty() ? 0 : r.rows.front().draws;
  for (const auto& row : r.rows) {
    worst = std::max(worst, row.worst_ratio);
    checks += row.checks;
    min_draws = std::min(min_draws, row.draws);
  }
  return {r.pass() && r.violations() == 0 && min_draws >= 1000,
          std::to_string(r.rows.size()) + " inequalities, >= " + std::to_string(min_draws) + " draws each, " +
                                               std::to_string(checks) + " checks, " +
                                               std::to_string(r.violations()) + " violations, worst lhs/rhs " +
                                               fmt(worst)};
}

// 5. High-energy sweep of the demo configuration.
Outcome sweep() {
  const fs::path dir = scratch("sweep");
  RunOptions o;
  o.out_dir = dir.string();
  const RunResult run = run_experiment("sweep", Config::load(g_configs + "/sweep_demo.cfg"), o);
  const auto rows = csv_rows(dir / "sweep_ray0.csv");
  bool ok = run.exit_code == 0 && rows.size() == 3;
  double prev_a = HUGE_VAL, prev_b = HUGE_VAL, ratio_lo = HUGE_VAL, ratio_hi = 0.0, slack = 0.0;
  for (const auto& r : rows) {
    const double s = num(r[0]), ga = num(r[1]), ea = num(r[2]), gb = num(r[3]), eb = num(r[4]);
    ok = ok && std::isfinite(ea) && std::isfinite(eb) && ga <= ea && gb <= eb && ga < prev_a && gb < prev_b;
    prev_a = ga;
    prev_b = gb;
    const double ratio = ga / std::sqrt(1.0 - s * s);
    ratio_lo = std::min(ratio_lo, ratio);
    ratio_hi = std::max(ratio_hi, ratio);
    slack = std::max({slack, ga / ea, gb / eb});
  }
  // The scaled gap must not grow along the sweep.
  ok = ok && ratio_hi <= 2.0 * ratio_lo;
  fs::remove_all(dir);
  return {ok, "gaps under envelopes (max gap/envelope " + fmt(slack) + "), decreasing; gap_a/sqrt(1-s^2) in [" +
                  fmt(ratio_lo) + ", " + fmt(ratio_hi) + "]"};
}

// 6. Reconstruction of V and B_12 from the demo configuration.
Outcome reconstruction() {
  const fs::path dir = scratch("reconstruct");
  RunOptions o;
  o.out_dir = dir.string();
  const RunResult run = run_experiment("reconstruct", Config::load(g_configs + "/reconstruct_demo.cfg"), o);
  const auto rows = csv_rows(dir / "reconstruct.csv");
  bool ok = run.exit_code == 0 && rows.size() == 6;
  std::vector<double> ev, eb;
  std::string detail;
  for (const auto& r : rows) {
    const double s = num(r[0]), e = num(r[2]);
    (trim(r[1]) == "v" ? ev : eb).push_back(e);
    if (std::abs(s - 0.99) < 1e-12) ok = ok && e < 0.10;
    detail += (detail.empty() ? "" : ", ") + std::string(trim(r[1]) == "v" ? "V" : "B12") + "@" + fmt(s) + " " + fmt(e);
  }
  for (const auto* e : {&ev, &eb}) {
    ok = ok && e->size() == 3;
    for (std::size_t i = 1; i < e->size(); ++i) ok = ok && (*e)[i] < (*e)[i - 1];
  }
  fs::remove_all(dir);
  return {ok, "relative L2 errors " + detail + " (tol 0.10 at s=0.99, strictly decreasing)"};
}

// 7. Radial fields are invisible to w4 (magnetic, d=2) and w2 (electric).
Outcome nonuniqueness() {
  const NonuniquenessReport m =
      nonuniqueness_demo(NonuniqueKind::Magnetic2d, make_radial_magnetic_field(0.5, 2.0),
                         make_gaussian_field(2, 0.3, 1.2, 2.0, vec({0.4, -0.3})), 500, 20240611);
  const NonuniquenessReport e =
      nonuniqueness_demo(NonuniqueKind::Electric, make_inverse_power_field(2, 0.5, 2.0, vec({0.0, 0.0})),
                         mixed_field_2d(), 500, 20240611);
  const bool ok = m.rays == 500 && e.rays == 500 && m.max_kernel_functional < 1e-8 && m.max_witness > 0.0 &&
                  e.max_kernel_functional < 1e-8 && e.max_witness > 0.0;
  return {ok, "magnetic: max|w4| " + fmt(m.max_kernel_functional) + ", max|w3| " + fmt(m.max_witness) +
                  "; electric: max|w2| " + fmt(e.max_kernel_functional) + ", max|w1| " + fmt(e.max_witness) +
                  " (500 rays each, tol 1e-8)"};
}

// 8. Identity suites on 200 random rays, and PB cross-formula agreement.
Outcome identities() {
  const FieldPtr f = mixed_field_3d();
  std::mt19937_64 rng(808);
  double odd_w1 = 0.0, even_w2 = 0.0, odd_w2 = 0.0, printed_parity = 0.0, reversal = 0.0, magnetic = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Ray r = random_ray(rng, 3);
    const Vec a1 = w1(*f, r, 1.0), b1 = w1(*f, r.reversed(), 1.0);
    odd_w1 = std::max(odd_w1, (w3(*f, r) - 0.5 * (a1 - b1)).norm());
    const Vec a2 = w2(*f, r, 1.0), b2 = w2(*f, r.reversed(), 1.0);
    const Vec m4 = w4(*f, r), el = w2_electric_part(*f, r);
    even_w2 = std::max(even_w2, (m4 - 0.5 * (a2 + b2)).norm());
    odd_w2 = std::max(odd_w2, (el - 0.5 * (a2 - b2)).norm());
    printed_parity = std::max(printed_parity, (m4 - 0.5 * (a2 - b2)).norm());
    reversal = std::max({reversal, (w3(*f, r.reversed()) + w3(*f, r)).norm(),
                         (ray_pgradv(*f, r.reversed()) - ray_pgradv(*f, r)).norm()});
    for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
      magnetic = std::max(magnetic, w4_identity_residual(*f, r, i, j));
  }
  // PB_{1,3} on rays with directions in span(e1, e3).
  const RaySampler s1 = w1_sampler(f, 1.0);
  const TildeSampler t1 = w1_tilde_sampler(f, 1.0);
  double cross = 0.0;
  std::uniform_real_distribution<double> phi(0.0, 2.0 * M_PI);
  for (int k = 0; k < 200; ++k) {
    const double p = phi(rng);
    const Vec theta = vec({std::cos(p), 0.0, std::sin(p)});
    Vec x = gaussian_vec(rng, 3);
    x -= x.dot(theta) * theta;
    const Ray r = make_ray(theta, x);
    const double direct = ray_pb(*f, r)(0, 2);
    const double plane = pb_from_w1_plane(s1, r, 0, 2), deriv = pb_from_w1_derivative(t1, r, 0, 2);
    cross = std::max({cross, std::abs(plane - direct), std::abs(deriv - direct), std::abs(plane - deriv)});
  }
  const double worst = std::max({odd_w1, even_w2, odd_w2, reversal, magnetic, cross});
  return {worst < 1e-5, "w3 vs odd w1 " + fmt(odd_w1) + ", w4 vs even w2 " + fmt(even_w2) + ", electric vs odd w2 " +
                            fmt(odd_w2) + ", reversal " + fmt(reversal) + ", w4~ identity " + fmt(magnetic) +
                            ", PB cross-formula " + fmt(cross) + " (tol 1e-5; w4 vs odd w2 would be " +
                            fmt(printed_parity) + ")"};
}

// 9. d = 3 Fourier data of dB from w4~: orthogonal to p, within 5% of a direct transform.
Outcome fourier() {
  LocalizedMagneticSpec m;
  m.d = 3;
  m.b0 = 0.5;
  m.moment = vec({0.3, -0.4, 0.6});
  m.center = vec({0.1, 0.0, -0.1});
  m.profile = Profile::Gaussian;
  m.width = 1.0;
  const FieldPtr f = make_localized_magnetic_field(m);
  const TildeSampler t4 = w4_tilde_sampler(f);
  FourierPlaneOptions o;
  o.nodes = 48;
  o.extent = 6.0;
  const std::vector<Vec> ps{vec({0.4, -0.3, 0.5}), vec({1.0, 0.3, 0.0}), vec({0.0, 0.7, 0.7}),
                            vec({-0.5, 0.8, 0.2}), vec({1.2, 0.6, -0.9})};
  double worst_rel = 0.0, worst_dot = 0.0;
  bool ok = true;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const int l = static_cast<int>(k % 3);
    const CVec3 fw = fourier_b_derivs_from_w4(t4, ps[k], l, o);
    const CVec3 fd = fourier_b_derivs_direct(*f, ps[k], l, m.center, 6.0, 64);
    double scale = 0.0, err = 0.0;
    std::complex<double> dot = 0.0;
    for (int i = 0; i < 3; ++i) {
      scale = std::max(scale, std::abs(fd[i]));
      err = std::max(err, std::abs(fw[i] - fd[i]));
      dot += fw[i] * ps[k](i);
    }
    const double rel = err / scale, rel_dot = std::abs(dot) / (scale * ps[k].norm());
    worst_rel = std::max(worst_rel, rel);
    worst_dot = std::max(worst_dot, rel_dot);
    // Orthogonality is exact up to the plane quadrature; 1e-6 relative bounds its error here.
    ok = ok && rel < 0.05 && rel_dot < 1e-6;
  }
  return {ok, "5 frequencies: max relative deviation from direct transform " + fmt(worst_rel) +
                  ", max |p.F|/(|F||p|) " + fmt(worst_dot) + " (tol 5%, 1e-6)"};
}

// 10. X-ray transform of gaussians and filtered back-projection.
Outcome xray_core() {
  std::mt19937_64 rng(1010);
  double worst = 0.0;
  LineQuadrature q;
  q.abs_tol = 1e-14;
  q.rel_tol = 1e-12;
  for (int d : {2, 3, 4}) {
    const Vec c = 0.3 * gaussian_vec(rng, d);
    const double v0 = 0.8, w = 1.1;
    const FieldPtr f = make_gaussian_field(d, v0, w, 2.0, c);
    const ScalarFn v = [&](const Vec& x) { return f->potential(x); };
    for (int k = 0; k < 100; ++k) {
      const Ray r = random_ray(rng, d, 1.5);
      const Vec off = (r.x - c) - (r.x - c).dot(r.theta) * r.theta;
      const double exact = v0 * w * std::sqrt(M_PI) * std::exp(-off.squaredNorm() / (w * w));
      worst = std::max(worst, std::abs(xray_transform(v, r, 2.0, q) - exact));
    }
  }
  // Two-bump phantom sampled from exact line integrals.
  auto phantom = [](double u, double v) {
    return std::exp(-((u - 0.8) * (u - 0.8) + (v + 0.4) * (v + 0.4)) / 0.81) -
           0.6 * std::exp(-((u + 1.0) * (u + 1.0) + (v - 0.7) * (v - 0.7)) / 0.36);
  };
  auto line = [](double phi, double qq) {
    const double nx = -std::sin(phi), ny = std::cos(phi);
    const double d1 = nx * 0.8 - ny * 0.4 - qq, d2 = -nx * 1.0 + ny * 0.7 - qq;
    return 0.9 * std::sqrt(M_PI) * std::exp(-d1 * d1 / 0.81) - 0.6 * 0.6 * std::sqrt(M_PI) * std::exp(-d2 * d2 / 0.36);
  };
  Sinogram s(uniform_angles(120), uniform_offsets(129, 6.0), 1, 6.0);
  for (std::size_t i = 0; i < s.angles.size(); ++i)
    for (std::size_t j = 0; j < s.offsets.size(); ++j) s.at(i, j) = line(s.angles[i], s.offsets[j]);
  FbpOptions fo;
  fo.resolution = 129;
  fo.extent = 3.0;
  const double fbp = relative_l2_error(invert_xray_2d(s, 0, fo), sample_grid(phantom, 3.0, 129));
  return {worst < 1e-8 && fbp < 0.05, "gaussian transform max error " + fmt(worst) + " (tol 1e-8), FBP relative L2 " +
                                           fmt(fbp) + " (tol 5%)"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // runtime limit, 0: none
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c{
      {1, "zero-field identity", 60, zero_field_identity},
      {2, "conservation", 0, conservation},
      {3, "Picard/ODE agreement", 60, method_agreement},
      {4, "bound suite", 300, bound_suite},
      {5, "high-energy sweep", 300, sweep},
      {6, "reconstruction", 600, reconstruction},
      {7, "non-uniqueness", 60, nonuniqueness},
      {8, "identity suites", 0, identities},
      {9, "d=3 Fourier check", 600, fourier},
      {10, "X-ray core", 0, xray_core},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else if (a == "--configs" && i + 1 < argc) {
      g_configs = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]... [--configs DIR]\n", argv[0]);
      return 2;
    }
  }
  bool all = true;
  for (const Criterion& c : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt(secs) + " s";
    if (c.budget_s > 0.0) {
      timing += " of " + fmt(c.budget_s) + " s";
      if (secs > c.budget_s) o.pass = false;
    }
    std::printf("criterion %2d %s: %s; %s [%s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
