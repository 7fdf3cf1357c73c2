#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emscat/config.hpp"
#include "emscat/dynamics.hpp"
#include "emscat/field_config.hpp"
#include "emscat/kinematics.hpp"
#include "emscat/xray.hpp"

namespace emscat {

// Rays (phi_i, q_j) of a plane through `origin` with orthonormal tangents
// e1, e2: phi_i = span * i / angles, q_j uniform on [-extent, extent].
// A non-empty `theta` (with `x`, d numbers per ray) lists rays explicitly
// and replaces the grid.
struct RayGridSpec {
  int angles = 4;
  int offsets = 3;
  double extent = 1.0;
  double span = 2.0 * 3.14159265358979323846;
  std::vector<double> origin, e1, e2;  // empty: origin and the first two coordinate vectors
  std::vector<double> theta, x;
};

struct BoundsSpec {
  double r = 0.0;                       // 0: radius minimising the speed thresholds
  std::vector<double> beta;             // empty: sampled from the field
  double beta_margin = 1.0;             // factor applied to sampled constants
  std::optional<double> c_fit;          // empty: fitted on the experiment rays
  int c_fit_points = 16;
  double c1_scale = 1.0, c2_scale = 1.0;
  double x_norm = 0.0;                  // constants subcommand only
  double decay_r_max = 1e3;
};

struct ReconstructSpec {
  int angles = 120;
  int offsets = 129;
  double extent = 8.0;
  int resolution = 129;
  double grid_extent = 0.0;             // 0: extent / sqrt 2
  std::vector<std::string> targets{"v", "b"};
  int axis1 = 1, axis2 = 2;             // 1-based coordinate axes spanning the plane
  std::vector<double> plane_point;      // empty: origin
  bool systematic = false;
  std::optional<double> tolerance;      // nonzero exit when an error exceeds it
};

struct NonuniqueSpec {
  std::string kind = "magnetic";        // magnetic | electric
  int rays = 500;
  double tolerance = 1e-8;
};

struct VerifySpec {
  int draws = 1000;
  int grid_intervals = 400;
};

struct ExperimentConfig {
  PhysicsParams physics;
  std::optional<FieldSpec> field;
  std::optional<FieldSpec> base;
  RayGridSpec rays;
  std::vector<double> speeds{0.9, 0.99, 0.999};  // fractions of c
  SolverSpec solver;
  double quad_abs_tol = 1e-30, quad_rel_tol = 1e-13;
  BoundsSpec bounds;
  ReconstructSpec reconstruct;
  NonuniqueSpec nonunique;
  VerifySpec verify;
  std::uint64_t seed = 20240611;
  int threads = 1;
  std::string output_dir = ".";

  // Reads every known section with defaults; unknown keys are a Parse error.
  static ExperimentConfig from_config(const Config& cfg);
  // All keys, defaults included.
  Config to_config() const;
  void validate() const;
};

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

struct RunResult {
  int exit_code = 0;                 // 0: every check passed
  std::vector<std::string> files;    // written, in order
  std::string summary;               // human-readable report
};

// Subcommands: sweep, reconstruct, demo-nonunique, constants, verify-bounds.
RunResult run_experiment(const std::string& command, const ExperimentConfig& cfg, const RunOptions& opt = {});
RunResult run_experiment(const std::string& command, const Config& cfg, const RunOptions& opt = {});
const std::vector<std::string>& experiment_commands();

// Rays of the grid, angle-major.
std::vector<Ray> ray_grid(const RayGridSpec& spec, int d);

}  // namespace emscat
