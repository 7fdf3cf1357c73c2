#pragma once

#include <memory>
#include <mutex>
#include <utility>
#include <string>
#include <vector>

#include "emscat/bounds.hpp"
#include "emscat/fields.hpp"
#include "emscat/linalg.hpp"

namespace emscat {

// Graded grid t_i = center + tau0 * sinh(u_i), u_i uniform on [-U, U].
struct TimeGridSpec {
  int intervals = 4000;
  double half_width = 8.0;  // U
  double tau0 = 0.0;        // 0: 1/|v|
  double center = NAN;      // NaN: time of closest approach to the origin
};

struct TimeGrid {
  double center = 0.0, tau0 = 1.0, half_width = 8.0, du = 0.0;
  std::vector<double> u, t, dtdu;

  static TimeGrid make(const TimeGridSpec& spec, const Vec& v, const Vec& x);
  std::size_t size() const { return t.size(); }
  // Index i with t_i <= s < t_{i+1}, clamped to [0, N-1].
  std::size_t locate(double s) const;
};

// Deflection candidate (f, h).  Between nodes h and q = f - t h are linear,
// so the norm sup is attained at nodes; outside the grid the path continues
// as the straight line with the end values of (q, h).
struct DeflectionPath {
  std::shared_ptr<const TimeGrid> grid;
  std::vector<Vec> f, h;
  double r = NAN;  // certified radius, NaN when not certified
  double T = HUGE_VAL;

  DeflectionPath() = default;
  DeflectionPath(std::shared_ptr<const TimeGrid> g, int d);
  int dim() const { return f.empty() ? 0 : static_cast<int>(f[0].size()); }
  std::size_t size() const { return f.size(); }
  Vec h_at(double t) const;
  Vec q_at(double t) const;
  Vec f_at(double t) const { return q_at(t) + t * h_at(t); }
};

// max(sup |h|, sup |f - t h|) over t <= T.
double norm_T(const DeflectionPath& p, double T = HUGE_VAL);
// norm_T(a - b); the paths must share a grid.
double distance_T(const DeflectionPath& a, const DeflectionPath& b, double T = HUGE_VAL);

// Fixed data of one scattering problem: field, (v, x), grid and the
// straight-line correction that removes the first-order grid error.
class ScatteringProblem {
 public:
  ScatteringProblem(FieldPtr field, double c, const Vec& v, const Vec& x, const TimeGridSpec& grid = {},
                    bool free_line_correction = true);

  const Field& field() const { return *field_; }
  const FieldPtr& field_ptr() const { return field_; }
  double c() const { return c_; }
  const Vec& v() const { return v_; }
  const Vec& x() const { return x_; }
  const Vec& gamma_v() const { return gamma_; }
  const std::shared_ptr<const TimeGrid>& grid() const { return grid_; }
  bool corrected() const { return corrected_; }

  Vec force_at(double t, const Vec& f, const Vec& h) const;
  // int_{-inf}^{t0} of [F, (t0 - s) F] along the line q + s h (stacked).
  StackVec past_tail(double t0, const Vec& q, const Vec& h) const;
  // int_{tN}^{inf} of [F, (s - tN) F] along the line q + s h (stacked).
  StackVec future_tail(double tN, const Vec& q, const Vec& h) const;
  // Straight-line integrals int F(v s + x, v) ds and int s F(v s + x, v) ds.
  const Vec& free_force_integral() const { return free_phi_; }
  const Vec& free_moment() const { return free_moment_; }
  // Exact minus grid values of (Phi_inf, l) for the straight line, for the
  // operator and for the RK4 integrator; zero when uncorrected.  Computed
  // once on first use (thread-safe).
  const std::pair<Vec, Vec>& operator_correction() const;
  const std::pair<Vec, Vec>& ode_correction() const;
  // Typical |F| along the line times tau0; sets absolute quadrature floors.
  double force_scale() const { return force_scale_; }

 private:
  FieldPtr field_;
  double c_;
  Vec v_, x_, gamma_;
  std::shared_ptr<const TimeGrid> grid_;
  bool corrected_;
  double force_scale_ = 0.0;
  Vec free_phi_, free_moment_;
  mutable std::once_flag op_once_, ode_once_;
  mutable std::pair<Vec, Vec> op_corr_, ode_corr_;
};

struct OperatorImage {
  DeflectionPath path;  // (A^1, A^2)
  std::vector<Vec> phi;  // int_{-inf}^{t_i} F
  Vec phi_inf;           // int F over R
  Vec k, l;              // asymptotes of A^1 = k t + l + H
  std::vector<Vec> H;    // A^1 - k t - l at the nodes
};

// One application of the contraction operator.  `linearized` replaces
// g(gamma + Phi) - v by Dg(gamma) Phi (used for the straight-line correction).
OperatorImage apply_operator(const ScatteringProblem& prob, const DeflectionPath& path, bool linearized = false);
DeflectionPath contraction_operator(const ScatteringProblem& prob, const DeflectionPath& path);
DeflectionPath zero_path(const ScatteringProblem& prob);

struct PicardOptions {
  double tol = 1e-15;     // absolute floor on the increment
  double rel_tol = 1e-13;  // relative to the path norm
  int max_iter = 100;
  double r = 0.0;         // 0: radius minimising mu
  double beta1 = -1.0, beta2 = -1.0;  // decay constants; negative: unknown
  bool require_certificate = true;
};

struct PicardResult {
  DeflectionPath path;
  OperatorImage image;  // image of the fixed point
  int iterations = 0;
  std::vector<double> increments;
  double mu = NAN;              // contraction bound at the chosen r
  double lambda = NAN;
  double measured_ratio = NAN;  // max ratio of successive increments
  double r = NAN;
  double norm = NAN;
};

// Contraction bound check for (v, x) with v.x = 0; fills mu, lambda and r.
// Throws NotContractive when no admissible radius gives mu < 1.
void certify_contraction(const ScatteringProblem& prob, const PicardOptions& opt, PicardResult& out);
PicardResult solve_deflection_picard(const ScatteringProblem& prob, const PicardOptions& opt = {});

struct TrajectoryResult {
  DeflectionPath path;  // y and its derivative
  Vec a, b;
  double energy_drift = 0.0;
  double max_angle = 0.0;
  std::vector<double> energy;
};

// RK4 in the grid variable u on (y, p - gamma(v)); general x allowed.
TrajectoryResult integrate_trajectory(const ScatteringProblem& prob);

enum class Method { Auto, Picard, Ode };
const char* method_name(Method m);
Method parse_method(const std::string& s);

struct SolverSpec {
  Method method = Method::Auto;
  TimeGridSpec grid;
  PicardOptions picard;
  bool free_line_correction = true;
};

struct ScatteringDatum {
  Vec v, x;  // x is the orthogonal offset actually solved for
  Vec x_input;
  double shift = 0.0;  // x_input = x + shift * v
  Vec a, b;
  double energy_drift = NAN;
  double max_angle = NAN;
  Method method = Method::Ode;
  int iterations = 0;
  double mu = NAN;
  double r = NAN;
  double measured_ratio = NAN;
};

// a_sc, b_sc for arbitrary x: solves at the orthogonal offset and shifts time.
ScatteringDatum scattering_data(FieldPtr field, double c, const Vec& v, const Vec& x, const SolverSpec& spec = {});

}  // namespace emscat
