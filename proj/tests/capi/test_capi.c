/* C API smoke and contract tests, compiled as C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "emscat/emscat.h"

static int failures = 0;

#define EXPECT(cond)                                                 \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

#define EXPECT_OK(call) EXPECT((call) == EMSCAT_OK)

static void test_status_and_errors(void) {
  emscat_field* f = NULL;
  EXPECT(strcmp(emscat_status_name(EMSCAT_OK), "Ok") == 0);
  EXPECT(strcmp(emscat_status_name(12345), "Unknown") == 0);
  EXPECT(emscat_version()[0] != '\0');
  EXPECT(emscat_field_zero(1, 2.0, &f) == EMSCAT_E_INVALID_ARGUMENT);
  EXPECT(f == NULL);
  EXPECT(strlen(emscat_last_error()) > 0);
  EXPECT(emscat_field_zero(2, 2.0, NULL) == EMSCAT_E_INVALID_ARGUMENT);
  EXPECT_OK(emscat_field_zero(2, 2.0, &f));
  EXPECT(emscat_last_error()[0] == '\0');
  emscat_field_free(f);
  emscat_field_free(NULL);
}

static void test_fields(void) {
  const double center[2] = {0.0, 0.0};
  const double x[2] = {1.0, 0.0};
  emscat_field *v = NULL, *m = NULL, *s = NULL;
  double pot = 0.0, grad[2], b[4], beta[3];
  int d = 0, pass = 0;
  EXPECT_OK(emscat_field_inverse_power(2, 0.5, 2.0, center, &v));
  EXPECT_OK(emscat_field_dim(v, &d));
  EXPECT(d == 2);
  EXPECT_OK(emscat_field_potential(v, x, &pot));
  EXPECT(fabs(pot - 0.25) < 1e-15);
  EXPECT_OK(emscat_field_gradient(v, x, grad));
  EXPECT(fabs(grad[0] + 0.25) < 1e-15);
  EXPECT_OK(emscat_field_radial_magnetic(0.5, 2.0, &m));
  {
    /* B_12 = b0 (2 xi + 2 t xi'), xi = (1 + t)^-2, t = 1/4 */
    const double h[2] = {0.5, 0.0};
    EXPECT_OK(emscat_field_magnetic(m, h, b));
    EXPECT(fabs(b[1] - 0.384) < 1e-14);
  }
  EXPECT(b[0] == 0.0 && fabs(b[1] + b[2]) < 1e-15);
  {
    const emscat_field* parts[2] = {v, m};
    EXPECT_OK(emscat_field_sum(parts, 2, &s));
  }
  emscat_field_free(v);
  emscat_field_free(m);
  EXPECT_OK(emscat_field_potential(s, x, &pot));
  EXPECT(fabs(pot - 0.25) < 1e-15);
  EXPECT_OK(emscat_field_decay(s, beta, &pass));
  EXPECT(pass == 1 && beta[0] > 0.0);
  emscat_field_free(s);
}

static void test_scattering(void) {
  emscat_field* z = NULL;
  const double v[2] = {0.9, 0.0}, x[2] = {0.0, 0.5};
  double a[2] = {1, 1}, bb[2] = {1, 1}, drift = -1.0, w[2];
  EXPECT_OK(emscat_field_zero(2, 2.0, &z));
  EXPECT_OK(emscat_scattering_data(z, 1.0, v, x, EMSCAT_METHOD_ODE, 200, a, bb, &drift));
  EXPECT(a[0] == 0.0 && a[1] == 0.0 && bb[0] == 0.0 && bb[1] == 0.0);
  {
    const double fast[2] = {1.0, 0.0};
    EXPECT(emscat_scattering_data(z, 1.0, fast, x, EMSCAT_METHOD_ODE, 200, a, bb, NULL) == EMSCAT_E_DOMAIN);
  }
  EXPECT(emscat_scattering_data(z, 1.0, v, x, 7, 200, a, bb, NULL) == EMSCAT_E_INVALID_ARGUMENT);
  EXPECT(emscat_functional(z, 5, v, x, 1.0, w) == EMSCAT_E_INVALID_ARGUMENT);
  emscat_field_free(z);

  {
    emscat_field* g = NULL;
    const double c[2] = {0.0, 0.0}, theta[2] = {1.0, 0.0};
    double p = 0.0;
    EXPECT_OK(emscat_field_gaussian(2, 0.7, 1.3, 2.0, c, &g));
    EXPECT_OK(emscat_xray_potential(g, theta, x, &p));
    EXPECT(fabs(p - 0.7 * 1.3 * sqrt(3.14159265358979323846) * exp(-0.25 / (1.3 * 1.3))) < 1e-10);
    EXPECT_OK(emscat_functional(g, 1, theta, x, 1.0, w));
    EXPECT(fabs(w[0]) < 1e-12 && w[1] > 0.0);
    EXPECT_OK(emscat_scattering_data(g, 1.0, v, x, EMSCAT_METHOD_ODE, 1000, a, bb, &drift));
    EXPECT(drift < 1e-8);
    EXPECT(fabs(sqrt((v[0] + a[0]) * (v[0] + a[0]) + a[1] * a[1]) - 0.9) < 1e-8);
    EXPECT(emscat_xray_potential(g, v, x, &p) == EMSCAT_E_INVALID_ARGUMENT);
    emscat_field_free(g);
  }
}

static void test_config_and_runs(void) {
  emscat_config* cfg = NULL;
  char buf[64];
  size_t needed = 0, n = 0;
  const char* text = NULL;
  emscat_run* run = NULL;
  int code = -1;
  EXPECT_OK(emscat_config_parse("physics.d = 2\nfield.family = zero\nspeeds.fractions = 0.9\n"
                                "rays.angles = 2\nrays.offsets = 2\nsolver.intervals = 100\n",
                                &cfg));
  EXPECT_OK(emscat_config_get(cfg, "field.family", buf, sizeof buf, &needed));
  EXPECT(strcmp(buf, "zero") == 0 && needed == 5);
  EXPECT(emscat_config_get(cfg, "field.family", buf, 2, &needed) == EMSCAT_E_RANGE);
  EXPECT(needed == 5);
  EXPECT(emscat_config_get(cfg, "field.v0", buf, sizeof buf, &needed) == EMSCAT_E_PARSE);
  EXPECT(strstr(emscat_last_error(), "field.v0") != NULL);
  EXPECT_OK(emscat_config_set(cfg, "output.dir", "capi_out"));
  EXPECT_OK(emscat_config_serialize(cfg, &text));
  EXPECT(strstr(text, "output.dir = capi_out") != NULL);

  {
    emscat_field* f = NULL;
    EXPECT_OK(emscat_field_from_config(cfg, "field", 2, &f));
    emscat_field_free(f);
  }

  EXPECT_OK(emscat_run_experiment("sweep", cfg, NULL, 2, 0, 0, &run));
  EXPECT_OK(emscat_run_exit_code(run, &code));
  EXPECT(code == 0);
  EXPECT_OK(emscat_run_file_count(run, &n));
  EXPECT(n >= 3);
  EXPECT_OK(emscat_run_summary(run, &text));
  EXPECT(strlen(text) > 0);
  {
    const char* path = NULL;
    EXPECT_OK(emscat_run_file(run, 0, &path));
    EXPECT(strstr(path, "capi_out") != NULL);
    EXPECT(emscat_run_file(run, n, &path) == EMSCAT_E_RANGE);
  }
  emscat_run_free(run);
  EXPECT(emscat_run_experiment("launch", cfg, NULL, 0, 0, 0, &run) != EMSCAT_OK);
  emscat_config_free(cfg);

  EXPECT(emscat_config_parse("a.b = 1\na.b = 2\n", &cfg) == EMSCAT_E_PARSE);
  EXPECT(emscat_config_load("/nonexistent/emscat.cfg", &cfg) == EMSCAT_E_IO);
}

int main(void) {
  test_status_and_errors();
  test_fields();
  test_scattering();
  test_config_and_runs();
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
