#include "emscat/emscat.h"

#include <cstring>
#include <new>
#include <string>

#include "emscat/asymptotics.hpp"
#include "emscat/config.hpp"
#include "emscat/errors.hpp"
#include "emscat/experiments.hpp"
#include "emscat/field_config.hpp"
#include "emscat/fields.hpp"
#include "emscat/kinematics.hpp"

struct emscat_field {
  emscat::FieldPtr field;
};

struct emscat_config {
  emscat::Config cfg;
};

struct emscat_run {
  emscat::RunResult result;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_text;

int set_error(int status, const std::string& msg) {
  g_error = msg;
  return status;
}

template <class F>
int guarded(F&& fn) {
  g_error.clear();
  try {
    fn();
    return EMSCAT_OK;
  } catch (const emscat::Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(EMSCAT_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(EMSCAT_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(EMSCAT_E_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (!p) emscat::fail(emscat::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

emscat::Vec read_vec(const double* p, int d, const char* what) {
  require(p, what);
  emscat::Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = p[i];
  return v;
}

void check_dim(int d) {
  if (d < 2 || d > emscat::kMaxDim) emscat::fail(emscat::ErrorCode::InvalidArgument, "dimension out of range");
}

const emscat::Field& field_of(const emscat_field* f) {
  require(f, "field");
  return *f->field;
}

void emit(emscat_field** out, emscat::FieldPtr f) {
  require(out, "out");
  *out = new emscat_field{std::move(f)};
}

}  // namespace

extern "C" {

const char* emscat_version(void) { return "0.1.0"; }

const char* emscat_status_name(int status) {
  if (status == EMSCAT_OK) return "Ok";
  if (status == EMSCAT_E_INTERNAL) return "Internal";
  if (status >= EMSCAT_E_INVALID_ARGUMENT && status <= EMSCAT_E_IO)
    return emscat::error_code_name(static_cast<emscat::ErrorCode>(status));
  return "Unknown";
}

const char* emscat_last_error(void) { return g_error.c_str(); }

int emscat_field_zero(int d, double alpha, emscat_field** out) {
  return guarded([&] {
    check_dim(d);
    emit(out, emscat::make_zero_field(d, alpha));
  });
}

int emscat_field_inverse_power(int d, double v0, double alpha, const double* center, emscat_field** out) {
  return guarded([&] {
    check_dim(d);
    const emscat::Vec c = center ? read_vec(center, d, "center") : emscat::Vec::Zero(d);
    emit(out, emscat::make_inverse_power_field(d, v0, alpha, c));
  });
}

int emscat_field_gaussian(int d, double v0, double width, double alpha, const double* center, emscat_field** out) {
  return guarded([&] {
    check_dim(d);
    const emscat::Vec c = center ? read_vec(center, d, "center") : emscat::Vec::Zero(d);
    emit(out, emscat::make_gaussian_field(d, v0, width, alpha, c));
  });
}

int emscat_field_radial_magnetic(double b0, double sigma, emscat_field** out) {
  return guarded([&] { emit(out, emscat::make_radial_magnetic_field(b0, sigma)); });
}

int emscat_field_from_config(const emscat_config* cfg, const char* prefix, int d, emscat_field** out) {
  return guarded([&] {
    require(cfg, "config");
    require(prefix, "prefix");
    check_dim(d);
    emit(out, emscat::build_field(emscat::read_field_spec(cfg->cfg, prefix, d)));
  });
}

int emscat_field_sum(const emscat_field* const* parts, size_t n, emscat_field** out) {
  return guarded([&] {
    require(parts, "parts");
    std::vector<emscat::FieldPtr> v;
    for (size_t i = 0; i < n; ++i) {
      require(parts[i], "field");
      v.push_back(parts[i]->field);
    }
    emit(out, emscat::make_sum_field(v));
  });
}

void emscat_field_free(emscat_field* field) { delete field; }

int emscat_field_dim(const emscat_field* field, int* d) {
  return guarded([&] {
    require(d, "d");
    *d = field_of(field).dim();
  });
}

int emscat_field_alpha(const emscat_field* field, double* alpha) {
  return guarded([&] {
    require(alpha, "alpha");
    *alpha = field_of(field).alpha();
  });
}

int emscat_field_potential(const emscat_field* field, const double* x, double* v) {
  return guarded([&] {
    const emscat::Field& f = field_of(field);
    require(v, "v");
    *v = f.potential(read_vec(x, f.dim(), "x"));
  });
}

int emscat_field_gradient(const emscat_field* field, const double* x, double* grad) {
  return guarded([&] {
    const emscat::Field& f = field_of(field);
    require(grad, "grad");
    const emscat::Vec g = f.potential_gradient(read_vec(x, f.dim(), "x"));
    for (int i = 0; i < f.dim(); ++i) grad[i] = g(i);
  });
}

int emscat_field_magnetic(const emscat_field* field, const double* x, double* b) {
  return guarded([&] {
    const emscat::Field& f = field_of(field);
    require(b, "b");
    const int d = f.dim();
    const emscat::Mat m = f.has_magnetic() ? f.magnetic(read_vec(x, d, "x")) : emscat::Mat::Zero(d, d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) b[i * d + k] = m(i, k);
  });
}

int emscat_field_decay(const emscat_field* field, double beta[3], int* pass) {
  return guarded([&] {
    require(beta, "beta");
    require(pass, "pass");
    const emscat::DecayReport rep = emscat::verify_decay(field_of(field));
    for (int i = 0; i < 3; ++i) beta[i] = rep.beta[i];
    *pass = rep.pass ? 1 : 0;
  });
}

int emscat_scattering_data(const emscat_field* field, double c, const double* v, const double* x, int method,
                           int intervals, double* a_sc, double* b_sc, double* energy_drift) {
  return guarded([&] {
    require(field, "field");
    const int d = field->field->dim();
    require(a_sc, "a_sc");
    require(b_sc, "b_sc");
    emscat::SolverSpec spec;
    switch (method) {
      case EMSCAT_METHOD_AUTO: spec.method = emscat::Method::Auto; break;
      case EMSCAT_METHOD_PICARD: spec.method = emscat::Method::Picard; break;
      case EMSCAT_METHOD_ODE: spec.method = emscat::Method::Ode; break;
      default: emscat::fail(emscat::ErrorCode::InvalidArgument, "unknown method");
    }
    if (intervals > 0) spec.grid.intervals = intervals;
    const emscat::ScatteringDatum dt =
        emscat::scattering_data(field->field, c, read_vec(v, d, "v"), read_vec(x, d, "x"), spec);
    for (int i = 0; i < d; ++i) {
      a_sc[i] = dt.a(i);
      b_sc[i] = dt.b(i);
    }
    if (energy_drift) *energy_drift = dt.energy_drift;
  });
}

int emscat_functional(const emscat_field* field, int which, const double* theta, const double* x, double c,
                      double* out) {
  return guarded([&] {
    const emscat::Field& f = field_of(field);
    require(out, "out");
    const int d = f.dim();
    const emscat::Ray ray = emscat::make_ray(read_vec(theta, d, "theta"), read_vec(x, d, "x"));
    emscat::Vec w;
    switch (which) {
      case 1: w = emscat::w1(f, ray, c); break;
      case 2: w = emscat::w2(f, ray, c); break;
      case 3: w = emscat::w3(f, ray); break;
      case 4: w = emscat::w4(f, ray); break;
      default: emscat::fail(emscat::ErrorCode::InvalidArgument, "functional index must be 1..4");
    }
    for (int i = 0; i < d; ++i) out[i] = w(i);
  });
}

int emscat_xray_potential(const emscat_field* field, const double* theta, const double* x, double* out) {
  return guarded([&] {
    const emscat::Field& f = field_of(field);
    require(out, "out");
    const int d = f.dim();
    *out = emscat::ray_pv(f, emscat::make_ray(read_vec(theta, d, "theta"), read_vec(x, d, "x")));
  });
}

int emscat_config_parse(const char* text, emscat_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new emscat_config{emscat::Config::parse(text)};
  });
}

int emscat_config_load(const char* path, emscat_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new emscat_config{emscat::Config::load(path)};
  });
}

void emscat_config_free(emscat_config* cfg) { delete cfg; }

int emscat_config_set(emscat_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    cfg->cfg.set(key, std::string(value));
  });
}

int emscat_config_get(const emscat_config* cfg, const char* key, char* buf, size_t size, size_t* needed) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    const std::string v = cfg->cfg.get_string(key);
    if (needed) *needed = v.size() + 1;
    if (!buf || size < v.size() + 1) emscat::fail(emscat::ErrorCode::Range, "buffer too small");
    std::memcpy(buf, v.c_str(), v.size() + 1);
  });
}

int emscat_config_serialize(const emscat_config* cfg, const char** text) {
  return guarded([&] {
    require(cfg, "config");
    require(text, "text");
    g_text = cfg->cfg.serialize();
    *text = g_text.c_str();
  });
}

int emscat_run_experiment(const char* command, const emscat_config* cfg, const char* out_dir, int threads,
                          int has_seed, uint64_t seed, emscat_run** out) {
  return guarded([&] {
    require(command, "command");
    require(cfg, "config");
    require(out, "out");
    emscat::RunOptions opt;
    if (out_dir) opt.out_dir = std::string(out_dir);
    if (threads > 0) opt.threads = threads;
    if (has_seed) opt.seed = seed;
    *out = new emscat_run{emscat::run_experiment(command, cfg->cfg, opt)};
  });
}

int emscat_run_exit_code(const emscat_run* run, int* exit_code) {
  return guarded([&] {
    require(run, "run");
    require(exit_code, "exit_code");
    *exit_code = run->result.exit_code;
  });
}

int emscat_run_summary(const emscat_run* run, const char** text) {
  return guarded([&] {
    require(run, "run");
    require(text, "text");
    *text = run->result.summary.c_str();
  });
}

int emscat_run_file_count(const emscat_run* run, size_t* n) {
  return guarded([&] {
    require(run, "run");
    require(n, "n");
    *n = run->result.files.size();
  });
}

int emscat_run_file(const emscat_run* run, size_t i, const char** path) {
  return guarded([&] {
    require(run, "run");
    require(path, "path");
    if (i >= run->result.files.size()) emscat::fail(emscat::ErrorCode::Range, "file index out of range");
    *path = run->result.files[i].c_str();
  });
}

void emscat_run_free(emscat_run* run) { delete run; }

}  // extern "C"
