#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace emscat {

// Randomized checks of the explicit a-priori inequalities.
//
// Path draws: a field from a pool of decaying templates with random
// amplitude, admissible (c, r, |x|, |v| >= z1) and two random piecewise-linear
// paths in M_{inf,r}; checks the operator bounds (group "contraction"), the
// pointwise envelopes of the operator image ("envelopes") and the force and
// geometry estimates ("force").
//
// Solution draws: amplitudes small enough that mu < 1; the fixed point
// (Picard, group "proximity") and the integrated trajectory (ODE, group
// "solution") are compared with the proximity constants and envelopes.
//
// Draw k of each kind uses a generator seeded from (seed, kind, k), so the
// report does not depend on the thread count.
struct BoundSuiteOptions {
  int draws = 1000;  // per draw kind
  std::uint64_t seed = 20240611;
  int grid_intervals = 400;
  int threads = 1;
  double beta_margin = 1.02;  // sampled decay constants are inflated by this factor
  bool path_draws = true;
  bool solution_draws = true;
};

struct InequalityStats {
  std::string group;
  std::string name;
  int draws = 0;
  long checks = 0;  // pointwise bounds are checked several times per draw
  long violations = 0;
  double worst_ratio = 0.0;  // max lhs / rhs
};

struct BoundSuiteReport {
  std::vector<InequalityStats> rows;
  bool pass() const;
  long violations() const;
};

BoundSuiteReport run_bound_suite(const BoundSuiteOptions& opt = {});
// group,name,draws,checks,violations,worst_ratio
std::string bound_suite_csv(const BoundSuiteReport& rep);

}  // namespace emscat
