#include <algorithm>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "emscat/csv.hpp"
#include "emscat/errors.hpp"
#include "emscat/experiments.hpp"

using namespace emscat;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("emscat_test_experiments_" + name);
  fs::remove_all(p);
  return p;
}

RunOptions at(const fs::path& dir) {
  RunOptions o;
  o.out_dir = dir.string();
  return o;
}

const char* kZeroSweep =
    "physics.d = 2\n"
    "field.family = zero\n"
    "rays.angles = 3\n"
    "rays.offsets = 2\n"
    "speeds.fractions = 0.9, 0.99\n"
    "solver.intervals = 200\n";

const char* kWeakSweep =
    "physics.d = 2\n"
    "field.family = inverse-power\n"
    "field.v0 = 1e-10\n"
    "rays.theta = 1, 0\n"
    "rays.x = 0, 0.5\n"
    "speeds.fractions = 0.9, 0.99, 0.999\n"
    "solver.method = picard\n"
    "solver.intervals = 1000\n"
    "bounds.c_fit_points = 8\n";

}  // namespace

TEST_CASE("experiment config round trips through the key-value form") {
  const ExperimentConfig e = ExperimentConfig::from_config(Config::parse(kWeakSweep));
  CHECK(e.physics.d == 2);
  CHECK(e.solver.method == Method::Picard);
  CHECK(e.rays.theta == std::vector<double>{1.0, 0.0});
  const Config c = e.to_config();
  const ExperimentConfig r = ExperimentConfig::from_config(c);
  CHECK(r.to_config() == c);
  CHECK(c.has("quadrature.abs_tol"));
  CHECK(c.has("verify.draws"));
}

TEST_CASE("unknown keys and bad values are rejected with the key name") {
  auto message = [](const std::string& text) {
    try {
      ExperimentConfig::from_config(Config::parse(text));
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("physics.d = 2\nphysics.typo = 1\n").find("physics.typo") != std::string::npos);
  CHECK(message("physics.d = 2\nspeeds.fractions = 0.9, 1.2\n").find("speeds") != std::string::npos);
  CHECK(message("physics.d = 2\nsolver.method = euler\n").find("euler") != std::string::npos);
  CHECK(message("physics.d = 2\nfield.family = gaussian\n").find("field.v0") != std::string::npos);
  CHECK(message("physics.d = 2\nrays.theta = 1, 0\n") != "");
}

TEST_CASE("ray grids are orthonormal rays in the configured plane") {
  RayGridSpec s;
  s.angles = 4;
  s.offsets = 3;
  s.extent = 2.0;
  const std::vector<Ray> rays = ray_grid(s, 3);
  CHECK(rays.size() == 12);
  for (const Ray& r : rays) {
    CHECK(std::abs(r.theta.norm() - 1.0) < 1e-14);
    CHECK(std::abs(r.theta.dot(r.x)) < 1e-14);
    CHECK(r.theta(2) == 0.0);
    CHECK(r.x.norm() <= 2.0 + 1e-14);
  }
  s.theta = {0.0, 1.0, 0.0};
  s.x = {0.5, 0.0, 0.0};
  const std::vector<Ray> one = ray_grid(s, 3);
  CHECK(one.size() == 1);
  CHECK(one[0].x(0) == 0.5);
}

TEST_CASE("zero-field sweep passes and writes its files") {
  const fs::path dir = scratch("zero");
  const RunResult r = run_experiment("sweep", Config::parse(kZeroSweep), at(dir));
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "results.csv"));
  CHECK(fs::exists(dir / "sweep.meta"));
  CHECK(fs::exists(dir / "sweep_ray0.csv"));
  const std::string results = read_text_file((dir / "results.csv").string());
  CHECK(results.rfind("s,theta_1,theta_2,x_1,x_2,a_sc_1,a_sc_2,b_sc_1,b_sc_2,energy_drift,method,iters,mu\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("weak-field sweep stays under the envelopes; shrunk envelopes are caught") {
  const fs::path dir = scratch("weak");
  const RunResult r = run_experiment("sweep", Config::parse(kWeakSweep), at(dir));
  INFO(r.summary);
  CHECK(r.exit_code == 0);
  Config tight = Config::parse(kWeakSweep);
  tight.set("bounds.c1_scale", 1e-12);
  CHECK(run_experiment("sweep", tight, at(dir)).exit_code == 1);
  fs::remove_all(dir);
}

TEST_CASE("outputs do not depend on the thread count") {
  const fs::path a = scratch("t1"), b = scratch("t3");
  Config c = Config::parse(kZeroSweep);
  RunOptions oa = at(a), ob = at(b);
  oa.threads = 1;
  ob.threads = 3;
  run_experiment("sweep", c, oa);
  run_experiment("sweep", c, ob);
  for (const char* f : {"results.csv", "sweep.meta", "sweep_ray1.csv"})
    CHECK(read_text_file((a / f).string()) == read_text_file((b / f).string()));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("constants with no speeds writes only the header") {
  const fs::path dir = scratch("constants");
  Config c = Config::parse("physics.d = 2\nfield.family = inverse-power\nfield.v0 = 1e-10\nspeeds.fractions =\n");
  const RunResult r = run_experiment("constants", c, at(dir));
  CHECK(r.exit_code == 0);
  const std::string text = read_text_file((dir / "constants.csv").string());
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(text.find("C1") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("non-uniqueness demo passes for a radial magnetic field") {
  const fs::path dir = scratch("nonunique");
  Config c = Config::parse(
      "physics.d = 2\n"
      "field.family = radial-magnetic\nfield.b0 = 0.5\n"
      "base.family = gaussian\nbase.v0 = 0.3\nbase.center = 0.4, -0.3\n"
      "nonunique.kind = magnetic\nnonunique.rays = 30\n");
  const RunResult r = run_experiment("demo-nonunique", c, at(dir));
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "nonunique.csv"));
  // An off-centre potential is visible to w2.
  Config bad = Config::parse(
      "physics.d = 2\n"
      "field.family = gaussian\nfield.v0 = 0.3\nfield.center = 0.5, 0\n"
      "base.family = radial-magnetic\nbase.b0 = 0.2\n"
      "nonunique.kind = electric\nnonunique.rays = 10\n");
  CHECK(run_experiment("demo-nonunique", bad, at(dir)).exit_code == 1);
  fs::remove_all(dir);
}

TEST_CASE("verify-bounds with a few draws") {
  const fs::path dir = scratch("verify");
  const RunResult r = run_experiment("verify-bounds", Config::parse("verify.draws = 5\n"), at(dir));
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "bound_suite.csv"));
  fs::remove_all(dir);
}

TEST_CASE("unknown commands are rejected") {
  CHECK_THROWS_AS(run_experiment("launch", Config::parse("physics.d = 2\n")), Error);
  CHECK(experiment_commands().size() == 5);
}
