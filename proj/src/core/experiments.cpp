#include "emscat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "emscat/asymptotics.hpp"
#include "emscat/bound_suite.hpp"
#include "emscat/bounds.hpp"
#include "emscat/csv.hpp"
#include "emscat/errors.hpp"
#include "emscat/parallel.hpp"
#include "emscat/reconstruct.hpp"

namespace emscat {

namespace {

const double kSqrt2 = std::sqrt(2.0);

Vec to_vec(const std::vector<double>& v, int d, const Vec& fallback) {
  if (v.empty()) return fallback;
  if (static_cast<int>(v.size()) != d) fail(ErrorCode::InvalidArgument, "vector has the wrong dimension");
  Vec out(d);
  for (int i = 0; i < d; ++i) out(i) = v[i];
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (const std::string& part : split(s, ',')) {
    const std::string t = trim(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::string join_list(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

// Config values cannot hold newlines or '#'.
std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& ch : out)
    if (ch == '\n' || ch == '\r' || ch == '#') ch = ' ';
  return trim(out);
}

std::string vec_key(const std::string& name, int i) { return name + "_" + std::to_string(i + 1); }

// Right-aligned columns; cells keep their 17-digit values.
std::string aligned_csv(const std::vector<std::vector<std::string>>& table) {
  if (table.empty()) return {};
  std::vector<std::size_t> width(table[0].size(), 0);
  for (const auto& row : table)
    for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
  std::string out;
  for (const auto& row : table) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ",";
      out += std::string(width[j] - row[j].size(), ' ') + row[j];
    }
    out += "\n";
  }
  return out;
}

class Outputs {
 public:
  Outputs(const std::string& dir, RunResult& res) : dir_(dir), res_(res) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(ErrorCode::Io, "cannot create output directory '" + dir_ + "': " + ec.message());
  }
  void write(const std::string& name, const std::string& content) {
    const std::string path = (std::filesystem::path(dir_) / name).string();
    write_text_file(path, content);
    res_.files.push_back(path);
  }

 private:
  std::string dir_;
  RunResult& res_;
};

struct DecayConstants {
  std::array<double, 3> beta{};
  bool sampled = false;
};

DecayConstants decay_constants(const Field& field, const BoundsSpec& b) {
  DecayConstants out;
  if (!b.beta.empty()) {
    if (b.beta.size() != 3) fail(ErrorCode::InvalidArgument, "bounds.beta needs three values (beta0, beta1, beta2)");
    for (int i = 0; i < 3; ++i) out.beta[i] = b.beta[i];
    return out;
  }
  DecaySampling ds;
  ds.r_max = b.decay_r_max;
  const DecayReport rep = verify_decay(field, ds);
  if (!rep.pass) fail(ErrorCode::InvalidArgument, "field fails the decay check: " + rep.message);
  for (int i = 0; i < 3; ++i) out.beta[i] = b.beta_margin * rep.beta[i];
  out.sampled = true;
  return out;
}

BoundParams base_params(const ExperimentConfig& cfg, const Field& field, const DecayConstants& dc, double x_norm) {
  BoundParams p;
  p.c = cfg.physics.c;
  p.d = field.dim();
  p.alpha = field.alpha();
  p.beta0 = dc.beta[0];
  p.beta1 = dc.beta[1];
  p.beta2 = dc.beta[2];
  p.x_norm = x_norm;
  const bool trivial = p.beta1 == 0.0 && p.beta2 == 0.0;
  if (cfg.bounds.r > 0.0) p.r = cfg.bounds.r;
  else if (trivial) p.r = 0.5 * std::min(1.0, p.c / kSqrt2);
  else p.r = best_threshold_radius(p);
  return p;
}

LineQuadrature quadrature(const ExperimentConfig& cfg) {
  LineQuadrature q = functional_quadrature();
  q.abs_tol = cfg.quad_abs_tol;
  q.rel_tol = cfg.quad_rel_tol;
  return q;
}

FieldPtr require_field(const ExperimentConfig& cfg) {
  if (!cfg.field) fail(ErrorCode::Parse, "missing key 'field.family'");
  return build_field(*cfg.field);
}

// Thread count and output location do not affect results and stay out of
// the sidecar, so outputs are identical across runs.
void echo_config(Config& meta, const ExperimentConfig& cfg) {
  const Config full = cfg.to_config();
  for (const auto& [k, v] : full.entries())
    if (k != "run.threads" && k != "output.dir") meta.set("config." + k, v);
}

// ---------------------------------------------------------------- sweep

RunResult cmd_sweep(const ExperimentConfig& cfg) {
  RunResult res;
  const FieldPtr field = require_field(cfg);
  const int d = field->dim();
  const double c = cfg.physics.c;
  const std::vector<Ray> rays = ray_grid(cfg.rays, d);
  const LineQuadrature q = quadrature(cfg);
  const DecayConstants dc = decay_constants(*field, cfg.bounds);

  // Constants per ray (they depend on |x|).
  struct RayConstants {
    BoundParams p;
    Theorem1Constants k;
    std::string error;
  };
  std::vector<RayConstants> rc(rays.size());
  double s2_max = 0.0;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    try {
      rc[i].p = base_params(cfg, *field, dc, rays[i].x.norm());
      rc[i].k = theorem1_constants(rc[i].p);
      if (!rc[i].k.trivial) s2_max = std::max(s2_max, rc[i].k.s2);
    } catch (const Error& e) {
      rc[i].error = e.what();
    }
  }
  double c_fit = 0.0;
  bool fitted = false;
  if (cfg.bounds.c_fit) {
    c_fit = *cfg.bounds.c_fit;
  } else if (s2_max > 0.0) {
    c_fit = fit_free_line_constant(*field, rays, c, s2_max, cfg.bounds.c_fit_points, q).constant;
    fitted = true;
  }
  for (auto& r : rc) {
    if (!r.error.empty()) continue;
    r.k = theorem1_constants(r.p, c_fit);
    r.k.C1 *= cfg.bounds.c1_scale;
    r.k.C2 *= cfg.bounds.c2_scale;
  }

  SolverSpec spec = cfg.solver;
  spec.picard.beta1 = dc.beta[1];
  spec.picard.beta2 = dc.beta[2];

  const std::size_t ns = cfg.speeds.size();
  struct Row {
    SpeedSample sample;
    bool ok = false;
    bool a_applies = false, b_applies = false;
    std::string error;
  };
  std::vector<Row> rows(rays.size() * ns);
  parallel_for(rows.size(), cfg.threads, [&](std::size_t k) {
    const std::size_t ir = k / ns, is = k % ns;
    const double s = cfg.speeds[is] * c;
    Row& row = rows[k];
    try {
      const RayConstants& r = rc[ir];
      row.sample = compare_thm11(field, rays[ir], s, c, spec, r.error.empty() ? &r.k : nullptr, q);
      if (r.error.empty()) {
        row.a_applies = r.k.trivial || s >= r.k.s1;
        row.b_applies = r.k.trivial || s >= r.k.s2;
        if (!row.a_applies) row.sample.a.envelope = NAN;
        if (!row.b_applies) row.sample.b.envelope = NAN;
      }
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
  });

  Outputs out(cfg.output_dir, res);
  std::string results = "s";
  for (const char* name : {"theta", "x", "a_sc", "b_sc"})
    for (int i = 0; i < d; ++i) results += "," + vec_key(name, i);
  results += ",energy_drift,method,iters,mu\n";
  long violations = 0, failures = 0, checked = 0, not_applicable = 0;
  double max_drift = 0.0;
  Config meta;
  echo_config(meta, cfg);
  for (std::size_t ir = 0; ir < rays.size(); ++ir) {
    std::string sweep = "s,gap_a,envelope_a,gap_b,envelope_b\n";
    for (std::size_t is = 0; is < ns; ++is) {
      const Row& row = rows[ir * ns + is];
      const double s = cfg.speeds[is] * c;
      const std::string rid = "ray" + std::to_string(ir) + ".s" + std::to_string(is);
      if (!row.ok) {
        ++failures;
        meta.set("error." + rid, sanitize(row.error));
        sweep += format_double(s) + ",nan,nan,nan,nan\n";
        results += format_double(s);
        for (int i = 0; i < d; ++i) results += "," + format_double(rays[ir].theta(i));
        for (int i = 0; i < d; ++i) results += "," + format_double(rays[ir].x(i));
        for (int i = 0; i < 2 * d; ++i) results += ",nan";
        results += ",nan,failed,0,nan\n";
        continue;
      }
      const SpeedSample& t = row.sample;
      const ScatteringDatum& dt = t.datum;
      results += format_double(s);
      for (int i = 0; i < d; ++i) results += "," + format_double(rays[ir].theta(i));
      for (int i = 0; i < d; ++i) results += "," + format_double(rays[ir].x(i));
      for (int i = 0; i < d; ++i) results += "," + format_double(dt.a(i));
      for (int i = 0; i < d; ++i) results += "," + format_double(dt.b(i));
      results += "," + format_double(dt.energy_drift) + "," + method_name(dt.method) + "," +
                 std::to_string(dt.iterations) + "," + format_double(dt.mu) + "\n";
      sweep += format_double(s) + "," + format_double(t.a.gap) + "," + format_double(t.a.envelope) + "," +
               format_double(t.b.gap) + "," + format_double(t.b.envelope) + "\n";
      if (std::isfinite(dt.energy_drift)) max_drift = std::max(max_drift, dt.energy_drift);
      for (const auto& [applies, smp] : {std::pair{row.a_applies, &t.a}, std::pair{row.b_applies, &t.b}}) {
        if (!applies) {
          ++not_applicable;
          continue;
        }
        ++checked;
        if (!(smp->gap <= smp->envelope)) ++violations;
      }
    }
    out.write("sweep_ray" + std::to_string(ir) + ".csv", sweep);
  }
  for (std::size_t ir = 0; ir < rays.size(); ++ir) {
    const std::string p = "constants.ray" + std::to_string(ir) + ".";
    if (!rc[ir].error.empty()) {
      ++failures;
      meta.set("error.ray" + std::to_string(ir) + ".constants", sanitize(rc[ir].error));
      continue;
    }
    meta.set(p + "r", rc[ir].p.r);
    meta.set(p + "s1", rc[ir].k.s1);
    meta.set(p + "s2", rc[ir].k.s2);
    meta.set(p + "c1", rc[ir].k.C1);
    meta.set(p + "c2", rc[ir].k.C2);
  }
  meta.set("decay.beta0", dc.beta[0]);
  meta.set("decay.beta1", dc.beta[1]);
  meta.set("decay.beta2", dc.beta[2]);
  meta.set("decay.sampled", dc.sampled);
  meta.set("result.c_fit", c_fit);
  meta.set("result.c_fit_fitted", fitted);
  meta.set("result.rays", static_cast<long long>(rays.size()));
  meta.set("result.checked", static_cast<long long>(checked));
  meta.set("result.not_applicable", static_cast<long long>(not_applicable));
  meta.set("result.violations", static_cast<long long>(violations));
  meta.set("result.failures", static_cast<long long>(failures));
  meta.set("result.max_energy_drift", max_drift);
  out.write("results.csv", results);
  out.write("sweep.meta", meta.serialize());
  res.exit_code = (violations == 0 && failures == 0) ? 0 : 1;
  std::ostringstream os;
  os << "sweep: " << rays.size() << " rays x " << ns << " speeds, " << checked << " envelope checks, " << violations
     << " violations, " << failures << " failures, " << not_applicable << " below the speed thresholds\n";
  res.summary = os.str();
  return res;
}

// ---------------------------------------------------------------- reconstruct

RunResult cmd_reconstruct(const ExperimentConfig& cfg) {
  RunResult res;
  const FieldPtr field = require_field(cfg);
  const int d = field->dim();
  const ReconstructSpec& rs = cfg.reconstruct;
  const int i1 = rs.axis1 - 1, i2 = rs.axis2 - 1;
  if (i1 < 0 || i2 < 0 || i1 >= d || i2 >= d || i1 == i2)
    fail(ErrorCode::InvalidArgument, "reconstruct.axes must name two distinct coordinates in 1..d");
  const PlaneRestriction plane(to_vec(rs.plane_point, d, Vec::Zero(d)), unit(d, i1), unit(d, i2));
  ReconstructOptions ro;
  ro.resolution = rs.resolution;
  ro.grid_extent = rs.grid_extent;
  ro.threads = cfg.threads;
  ro.systematic = rs.systematic;

  Outputs out(cfg.output_dir, res);
  Config meta;
  echo_config(meta, cfg);
  std::string table = "s,target,relative_error,systematic,path_difference,curl_residual,max_energy_drift\n";
  bool over = false;
  for (std::size_t is = 0; is < cfg.speeds.size(); ++is) {
    PlaneDataSpec ps;
    ps.angles = rs.angles;
    ps.offsets = rs.offsets;
    ps.extent = rs.extent;
    ps.s = cfg.speeds[is];
    ps.c = cfg.physics.c;
    ps.solver = cfg.solver;
    ps.threads = cfg.threads;
    const PlaneDataset data = simulate_plane_dataset(field, plane, ps);
    for (const std::string& target : rs.targets) {
      ReconstructionReport rep;
      std::string tag;
      if (target == "v") {
        rep = reconstruct_v(field, data, ro);
        tag = "v";
      } else {
        rep = reconstruct_b(field, data, i1, i2, ro);
        tag = "b_" + std::to_string(rs.axis1) + "_" + std::to_string(rs.axis2);
      }
      const std::string stem = "reconstruct_" + tag + "_s" + std::to_string(is);
      out.write(stem + "_estimate.csv", grid_csv(rep.estimate));
      out.write(stem + "_truth.csv", grid_csv(rep.truth));
      table += format_double(data.spec.s) + "," + tag + "," + format_double(rep.relative_error) + "," +
               format_double(rep.systematic) + "," + format_double(rep.path_difference) + "," +
               format_double(rep.curl_residual) + "," + format_double(data.max_energy_drift) + "\n";
      const std::string p = "result." + tag + ".s" + std::to_string(is) + ".";
      meta.set(p + "speed", data.spec.s);
      meta.set(p + "target", sanitize(rep.target));
      meta.set(p + "pipeline", sanitize(rep.pipeline));
      meta.set(p + "relative_error", rep.relative_error);
      meta.set(p + "systematic", rep.systematic);
      if (std::isfinite(rep.path_difference)) meta.set(p + "path_difference", rep.path_difference);
      if (std::isfinite(rep.curl_residual)) meta.set(p + "curl_residual", rep.curl_residual);
      meta.set(p + "max_energy_drift", data.max_energy_drift);
      if (rs.tolerance && !(rep.relative_error <= *rs.tolerance)) over = true;
      res.summary += "s/c " + format_double(data.spec.s) + " " + tag +
                     ": relative L2 error " + format_double(rep.relative_error) + "\n";
    }
  }
  out.write("reconstruct.csv", table);
  out.write("reconstruct.meta", meta.serialize());
  res.exit_code = over ? 1 : 0;
  return res;
}

// ---------------------------------------------------------------- demo-nonunique

RunResult cmd_demo_nonunique(const ExperimentConfig& cfg) {
  RunResult res;
  const FieldPtr kernel = require_field(cfg);
  if (!cfg.base) fail(ErrorCode::Parse, "missing key 'base.family'");
  const FieldPtr base = build_field(*cfg.base);
  const NonuniqueKind kind = cfg.nonunique.kind == "electric" ? NonuniqueKind::Electric : NonuniqueKind::Magnetic2d;
  const NonuniquenessReport rep = nonuniqueness_demo(kind, kernel, base, cfg.nonunique.rays, cfg.seed, cfg.physics.c);
  Outputs out(cfg.output_dir, res);
  std::string csv = "kind,rays,max_kernel_functional,max_witness,max_pair_difference,max_pair_w1_difference\n";
  csv += cfg.nonunique.kind + "," + std::to_string(rep.rays) + "," + format_double(rep.max_kernel_functional) + "," +
         format_double(rep.max_witness) + "," + format_double(rep.max_pair_difference) + "," +
         format_double(rep.max_pair_w1_difference) + "\n";
  Config meta;
  echo_config(meta, cfg);
  const char* kernel_name = kind == NonuniqueKind::Electric ? "w2" : "w4";
  const char* witness_name = kind == NonuniqueKind::Electric ? "w1" : "w3";
  meta.set("result.kernel_functional", std::string(kernel_name));
  meta.set("result.witness_functional", std::string(witness_name));
  meta.set("result.max_kernel_functional", rep.max_kernel_functional);
  meta.set("result.max_witness", rep.max_witness);
  meta.set("result.max_pair_difference", rep.max_pair_difference);
  meta.set("result.max_pair_w1_difference", rep.max_pair_w1_difference);
  const bool pass = rep.max_kernel_functional < cfg.nonunique.tolerance;
  meta.set("result.pass", pass);
  out.write("nonunique.csv", csv);
  out.write("nonunique.meta", meta.serialize());
  res.exit_code = pass ? 0 : 1;
  res.summary = std::string("max |") + kernel_name + "| = " + format_double(rep.max_kernel_functional) + ", max |" +
                witness_name + "| = " + format_double(rep.max_witness) + " over " + std::to_string(rep.rays) +
                " rays\n";
  return res;
}

// ---------------------------------------------------------------- constants

RunResult cmd_constants(const ExperimentConfig& cfg) {
  RunResult res;
  const FieldPtr field = require_field(cfg);
  const double c = cfg.physics.c;
  const DecayConstants dc = decay_constants(*field, cfg.bounds);
  const BoundParams base = base_params(cfg, *field, dc, cfg.bounds.x_norm);
  double c_fit = cfg.bounds.c_fit.value_or(0.0);
  const bool trivial = base.beta1 == 0.0 && base.beta2 == 0.0;
  if (!cfg.bounds.c_fit && !trivial && !cfg.speeds.empty()) {
    const Theorem1Constants k0 = theorem1_constants(base);
    const int d = field->dim();
    const Ray ray{unit(d, 0), base.x_norm * unit(d, 1)};
    c_fit = fit_free_line_constant(*field, {ray}, c, k0.s2, cfg.bounds.c_fit_points, quadrature(cfg)).constant;
  }
  const std::vector<std::string> header{"s",        "v_norm",      "r",           "z1",          "z",
                                        "z2",       "s1",          "s2",          "rho",         "lambda",
                                        "mu",       "zeta_minus0", "xi_minus0",   "zeta_plus0",  "xi_plus0",
                                        "eps_a_prime", "eps_a",    "eps_b",       "C1",          "C2_explicit",
                                        "C_fit",    "C2",          "z1_residual", "z2_residual"};
  std::vector<std::vector<std::string>> table{header};
  for (double frac : cfg.speeds) {
    BoundParams p = base;
    p.v_norm = frac * c;
    std::vector<double> v(header.size(), NAN);
    v[0] = frac;
    v[1] = p.v_norm;
    v[2] = p.r;
    auto guarded = [](auto&& fn) {
      try {
        fn();
      } catch (const Error&) {
      }
    };
    guarded([&] {
      const Theorem1Constants k = theorem1_constants(p, c_fit);
      v[3] = k.z1;
      v[4] = k.z;
      v[5] = k.z2;
      v[6] = k.s1;
      v[7] = k.s2;
      v[18] = k.C1;
      v[19] = k.C2_explicit;
      v[20] = k.C_fit;
      v[21] = k.C2;
      if (!k.trivial) {
        v[22] = z1_equation(p, k.z1);
        v[23] = z2_equation(p, k.z2);
      }
    });
    guarded([&] {
      const OperatorBounds ob = operator_bounds(p);
      v[8] = ob.rho;
      v[9] = ob.lambda;
      v[10] = ob.mu;
    });
    guarded([&] {
      const Envelopes e = envelopes(p, 0.0, 0.0);
      v[11] = e.zeta_minus;
      v[12] = e.xi_minus;
      v[13] = e.zeta_plus;
      v[14] = e.xi_plus;
    });
    guarded([&] {
      const ProximityConstants e = proximity_constants(p);
      v[15] = e.eps_a_prime;
      v[16] = e.eps_a;
      v[17] = e.eps_b;
    });
    std::vector<std::string> row;
    for (double x : v) row.push_back(format_double(x));
    table.push_back(row);
  }
  Outputs out(cfg.output_dir, res);
  res.summary = aligned_csv(table);
  out.write("constants.csv", res.summary);
  Config meta;
  echo_config(meta, cfg);
  meta.set("decay.beta0", dc.beta[0]);
  meta.set("decay.beta1", dc.beta[1]);
  meta.set("decay.beta2", dc.beta[2]);
  meta.set("result.c_fit", c_fit);
  out.write("constants.meta", meta.serialize());
  return res;
}

// ---------------------------------------------------------------- verify-bounds

RunResult cmd_verify_bounds(const ExperimentConfig& cfg) {
  RunResult res;
  BoundSuiteOptions bo;
  bo.draws = cfg.verify.draws;
  bo.seed = cfg.seed;
  bo.grid_intervals = cfg.verify.grid_intervals;
  bo.threads = cfg.threads;
  const BoundSuiteReport rep = run_bound_suite(bo);
  Outputs out(cfg.output_dir, res);
  out.write("bound_suite.csv", bound_suite_csv(rep));
  Config meta;
  echo_config(meta, cfg);
  meta.set("result.inequalities", static_cast<long long>(rep.rows.size()));
  meta.set("result.violations", static_cast<long long>(rep.violations()));
  meta.set("result.pass", rep.pass());
  out.write("bound_suite.meta", meta.serialize());
  res.exit_code = rep.pass() ? 0 : 1;
  res.summary = std::to_string(rep.rows.size()) + " inequalities, " + std::to_string(bo.draws) +
                " draws per kind, " + std::to_string(rep.violations()) + " violations\n";
  return res;
}

}  // namespace

std::vector<Ray> ray_grid(const RayGridSpec& spec, int d) {
  std::vector<Ray> rays;
  if (!spec.theta.empty()) {
    if (spec.theta.size() % d != 0 || spec.x.size() != spec.theta.size())
      fail(ErrorCode::InvalidArgument, "rays.theta and rays.x need d numbers per ray");
    for (std::size_t k = 0; k < spec.theta.size(); k += d) {
      Vec th(d), x(d);
      for (int i = 0; i < d; ++i) {
        th(i) = spec.theta[k + i];
        x(i) = spec.x[k + i];
      }
      rays.push_back(make_ray(th, x));
    }
    return rays;
  }
  const PlaneRestriction plane(to_vec(spec.origin, d, Vec::Zero(d)), to_vec(spec.e1, d, unit(d, 0)),
                               to_vec(spec.e2, d, unit(d, 1)));
  const std::vector<double> phi = uniform_angles(spec.angles, spec.span);
  const std::vector<double> q = uniform_offsets(spec.offsets, spec.extent);
  for (double a : phi)
    for (double o : q) rays.push_back(plane.embed_ray(a, o));
  return rays;
}

ExperimentConfig ExperimentConfig::from_config(const Config& c) {
  ExperimentConfig e;
  e.physics.c = c.get_double("physics.c", 1.0);
  e.physics.d = static_cast<int>(c.get_int("physics.d", 2));
  if (c.has("field.family")) e.field = read_field_spec(c, "field", e.physics.d);
  if (c.has("base.family")) e.base = read_field_spec(c, "base", e.physics.d);
  if (e.field) e.physics.alpha = build_field(*e.field)->alpha();

  RayGridSpec& r = e.rays;
  r.theta = c.get_doubles("rays.theta", {});
  r.x = c.get_doubles("rays.x", {});
  if (r.theta.empty()) {
    r.angles = static_cast<int>(c.get_int("rays.angles", r.angles));
    r.offsets = static_cast<int>(c.get_int("rays.offsets", r.offsets));
    r.extent = c.get_double("rays.extent", r.extent);
    r.span = c.get_double("rays.span", r.span);
    r.origin = c.get_doubles("rays.origin", {});
    r.e1 = c.get_doubles("rays.e1", {});
    r.e2 = c.get_doubles("rays.e2", {});
  }
  e.speeds = c.get_doubles("speeds.fractions", e.speeds);

  SolverSpec& s = e.solver;
  s.method = parse_method(c.get_string("solver.method", "auto"));
  s.grid.intervals = static_cast<int>(c.get_int("solver.intervals", s.grid.intervals));
  s.grid.half_width = c.get_double("solver.half_width", s.grid.half_width);
  s.picard.tol = c.get_double("solver.tol", s.picard.tol);
  s.picard.rel_tol = c.get_double("solver.rel_tol", s.picard.rel_tol);
  s.picard.max_iter = static_cast<int>(c.get_int("solver.max_iter", s.picard.max_iter));
  e.quad_abs_tol = c.get_double("quadrature.abs_tol", e.quad_abs_tol);
  e.quad_rel_tol = c.get_double("quadrature.rel_tol", e.quad_rel_tol);

  BoundsSpec& b = e.bounds;
  b.r = c.get_double("bounds.r", b.r);
  b.beta = c.get_doubles("bounds.beta", {});
  b.beta_margin = c.get_double("bounds.beta_margin", b.beta_margin);
  const std::string fit = c.get_string("bounds.c_fit", "auto");
  if (fit != "auto") b.c_fit = c.get_double("bounds.c_fit");
  b.c_fit_points = static_cast<int>(c.get_int("bounds.c_fit_points", b.c_fit_points));
  b.c1_scale = c.get_double("bounds.c1_scale", b.c1_scale);
  b.c2_scale = c.get_double("bounds.c2_scale", b.c2_scale);
  b.x_norm = c.get_double("bounds.x_norm", b.x_norm);
  b.decay_r_max = c.get_double("bounds.decay_r_max", b.decay_r_max);

  ReconstructSpec& rs = e.reconstruct;
  rs.angles = static_cast<int>(c.get_int("reconstruct.angles", rs.angles));
  rs.offsets = static_cast<int>(c.get_int("reconstruct.offsets", rs.offsets));
  rs.extent = c.get_double("reconstruct.extent", rs.extent);
  rs.resolution = static_cast<int>(c.get_int("reconstruct.resolution", rs.resolution));
  rs.grid_extent = c.get_double("reconstruct.grid_extent", rs.grid_extent);
  if (c.has("reconstruct.targets")) rs.targets = split_list(c.get_string("reconstruct.targets"));
  const std::vector<double> axes = c.get_doubles("reconstruct.axes", {1.0, 2.0});
  if (axes.size() != 2 || axes[0] != std::floor(axes[0]) || axes[1] != std::floor(axes[1]))
    fail(ErrorCode::Parse, "key 'reconstruct.axes': expected two coordinate indices");
  rs.axis1 = static_cast<int>(axes[0]);
  rs.axis2 = static_cast<int>(axes[1]);
  rs.plane_point = c.get_doubles("reconstruct.plane_point", {});
  rs.systematic = c.get_bool("reconstruct.systematic", rs.systematic);
  if (c.has("reconstruct.tolerance")) rs.tolerance = c.get_double("reconstruct.tolerance");

  e.nonunique.kind = c.get_string("nonunique.kind", e.nonunique.kind);
  e.nonunique.rays = static_cast<int>(c.get_int("nonunique.rays", e.nonunique.rays));
  e.nonunique.tolerance = c.get_double("nonunique.tolerance", e.nonunique.tolerance);

  e.verify.draws = static_cast<int>(c.get_int("verify.draws", e.verify.draws));
  e.verify.grid_intervals = static_cast<int>(c.get_int("verify.grid_intervals", e.verify.grid_intervals));

  e.seed = c.get_u64("run.seed", e.seed);
  e.threads = static_cast<int>(c.get_int("run.threads", e.threads));
  e.output_dir = c.get_string("output.dir", e.output_dir);

  c.reject_unused();
  e.validate();
  return e;
}

Config ExperimentConfig::to_config() const {
  Config c;
  c.set("physics.c", physics.c);
  c.set("physics.d", physics.d);
  if (field) write_field_spec(c, "field", *field);
  if (base) write_field_spec(c, "base", *base);
  if (!rays.theta.empty()) {
    c.set("rays.theta", rays.theta);
    c.set("rays.x", rays.x);
  } else {
    c.set("rays.angles", rays.angles);
    c.set("rays.offsets", rays.offsets);
    c.set("rays.extent", rays.extent);
    c.set("rays.span", rays.span);
    if (!rays.origin.empty()) c.set("rays.origin", rays.origin);
    if (!rays.e1.empty()) c.set("rays.e1", rays.e1);
    if (!rays.e2.empty()) c.set("rays.e2", rays.e2);
  }
  c.set("speeds.fractions", speeds);
  c.set("solver.method", std::string(method_name(solver.method)));
  c.set("solver.intervals", solver.grid.intervals);
  c.set("solver.half_width", solver.grid.half_width);
  c.set("solver.tol", solver.picard.tol);
  c.set("solver.rel_tol", solver.picard.rel_tol);
  c.set("solver.max_iter", solver.picard.max_iter);
  c.set("quadrature.abs_tol", quad_abs_tol);
  c.set("quadrature.rel_tol", quad_rel_tol);
  c.set("bounds.r", bounds.r);
  if (!bounds.beta.empty()) c.set("bounds.beta", bounds.beta);
  c.set("bounds.beta_margin", bounds.beta_margin);
  if (bounds.c_fit) c.set("bounds.c_fit", *bounds.c_fit);
  else c.set("bounds.c_fit", std::string("auto"));
  c.set("bounds.c_fit_points", bounds.c_fit_points);
  c.set("bounds.c1_scale", bounds.c1_scale);
  c.set("bounds.c2_scale", bounds.c2_scale);
  c.set("bounds.x_norm", bounds.x_norm);
  c.set("bounds.decay_r_max", bounds.decay_r_max);
  c.set("reconstruct.angles", reconstruct.angles);
  c.set("reconstruct.offsets", reconstruct.offsets);
  c.set("reconstruct.extent", reconstruct.extent);
  c.set("reconstruct.resolution", reconstruct.resolution);
  c.set("reconstruct.grid_extent", reconstruct.grid_extent);
  c.set("reconstruct.targets", join_list(reconstruct.targets));
  c.set("reconstruct.axes", std::vector<double>{double(reconstruct.axis1), double(reconstruct.axis2)});
  if (!reconstruct.plane_point.empty()) c.set("reconstruct.plane_point", reconstruct.plane_point);
  c.set("reconstruct.systematic", reconstruct.systematic);
  if (reconstruct.tolerance) c.set("reconstruct.tolerance", *reconstruct.tolerance);
  c.set("nonunique.kind", nonunique.kind);
  c.set("nonunique.rays", nonunique.rays);
  c.set("nonunique.tolerance", nonunique.tolerance);
  c.set("verify.draws", verify.draws);
  c.set("verify.grid_intervals", verify.grid_intervals);
  c.set_u64("run.seed", seed);
  c.set("run.threads", threads);
  c.set("output.dir", output_dir);
  return c;
}

void ExperimentConfig::validate() const {
  physics.validate();
  auto bad = [](const std::string& what) { fail(ErrorCode::Parse, what); };
  if (field && field->d != physics.d) bad("field dimension differs from physics.d");
  for (double s : speeds)
    if (!(s > 0.0 && s < 1.0)) bad("key 'speeds.fractions': speeds must lie strictly between 0 and 1");
  if (rays.theta.empty()) {
    if (rays.angles < 2 || rays.offsets < 2) bad("keys 'rays.angles', 'rays.offsets': grid counts must be at least 2");
    if (!(rays.extent > 0.0)) bad("key 'rays.extent': must be positive");
    if (!(rays.span > 0.0)) bad("key 'rays.span': must be positive");
  } else if (rays.theta.size() % physics.d != 0 || rays.x.size() != rays.theta.size()) {
    bad("keys 'rays.theta', 'rays.x': need physics.d numbers per ray");
  }
  if (solver.grid.intervals < 2) bad("key 'solver.intervals': must be at least 2");
  if (!(solver.grid.half_width > 0.0)) bad("key 'solver.half_width': must be positive");
  if (solver.picard.max_iter < 1) bad("key 'solver.max_iter': must be at least 1");
  if (!(quad_abs_tol >= 0.0) || !(quad_rel_tol > 0.0)) bad("quadrature tolerances must be positive");
  if (bounds.r < 0.0) bad("key 'bounds.r': must be nonnegative");
  if (!bounds.beta.empty() && bounds.beta.size() != 3) bad("key 'bounds.beta': expected beta0, beta1, beta2");
  if (!(bounds.beta_margin >= 1.0)) bad("key 'bounds.beta_margin': must be at least 1");
  if (bounds.c_fit_points < 1) bad("key 'bounds.c_fit_points': must be at least 1");
  if (!(bounds.c1_scale > 0.0) || !(bounds.c2_scale > 0.0)) bad("envelope scales must be positive");
  if (!(bounds.x_norm >= 0.0)) bad("key 'bounds.x_norm': must be nonnegative");
  if (!(bounds.decay_r_max > 1.0)) bad("key 'bounds.decay_r_max': must exceed 1");
  if (reconstruct.angles < 2 || reconstruct.offsets < 2 || reconstruct.resolution < 2)
    bad("reconstruct grid counts must be at least 2");
  if (!(reconstruct.extent > 0.0)) bad("key 'reconstruct.extent': must be positive");
  for (const std::string& t : reconstruct.targets)
    if (t != "v" && t != "b") bad("key 'reconstruct.targets': expected v and/or b, got '" + t + "'");
  if (nonunique.kind != "magnetic" && nonunique.kind != "electric")
    bad("key 'nonunique.kind': expected magnetic or electric");
  if (nonunique.rays < 1) bad("key 'nonunique.rays': must be at least 1");
  if (verify.draws < 1) bad("key 'verify.draws': must be at least 1");
  if (verify.grid_intervals < 2) bad("key 'verify.grid_intervals': must be at least 2");
  if (threads < 1) bad("key 'run.threads': must be at least 1");
  if (output_dir.empty()) bad("key 'output.dir': must not be empty");
}

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> cmds{"sweep", "reconstruct", "demo-nonunique", "constants", "verify-bounds"};
  return cmds;
}

RunResult run_experiment(const std::string& command, const ExperimentConfig& base, const RunOptions& opt) {
  ExperimentConfig cfg = base;
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  if (opt.threads) cfg.threads = *opt.threads;
  if (opt.seed) cfg.seed = *opt.seed;
  cfg.validate();
  if (command == "sweep") return cmd_sweep(cfg);
  if (command == "reconstruct") return cmd_reconstruct(cfg);
  if (command == "demo-nonunique") return cmd_demo_nonunique(cfg);
  if (command == "constants") return cmd_constants(cfg);
  if (command == "verify-bounds") return cmd_verify_bounds(cfg);
  fail(ErrorCode::InvalidArgument, "unknown command '" + command + "'");
}

RunResult run_experiment(const std::string& command, const Config& cfg, const RunOptions& opt) {
  return run_experiment(command, ExperimentConfig::from_config(cfg), opt);
}

}  // namespace emscat
