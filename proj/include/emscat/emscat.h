#ifndef EMSCAT_H
#define EMSCAT_H

#include <stddef.h>
#include <stdint.h>

#if defined(EMSCAT_BUILDING_LIBRARY)
#define EMSCAT_API __attribute__((visibility("default")))
#else
#define EMSCAT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; every function returns one.  The message of the last failure
   on the calling thread is available from emscat_last_error(). */
typedef enum emscat_status {
  EMSCAT_OK = 0,
  EMSCAT_E_INVALID_ARGUMENT = 1,
  EMSCAT_E_DOMAIN = 2,
  EMSCAT_E_ZERO_DIRECTION = 3,
  EMSCAT_E_RANGE = 4,
  EMSCAT_E_NO_ROOT = 5,
  EMSCAT_E_NOT_CONTRACTIVE = 6,
  EMSCAT_E_NO_CONVERGENCE = 7,
  EMSCAT_E_QUADRATURE = 8,
  EMSCAT_E_STEP_FAILURE = 9,
  EMSCAT_E_COVERAGE = 10,
  EMSCAT_E_OFF_MANIFOLD = 11,
  EMSCAT_E_STEP_UNDERFLOW = 12,
  EMSCAT_E_PARSE = 13,
  EMSCAT_E_IO = 14,
  EMSCAT_E_INTERNAL = 99
} emscat_status;

typedef enum emscat_method { EMSCAT_METHOD_AUTO = 0, EMSCAT_METHOD_PICARD = 1, EMSCAT_METHOD_ODE = 2 } emscat_method;

typedef struct emscat_field emscat_field;
typedef struct emscat_config emscat_config;
typedef struct emscat_run emscat_run;

EMSCAT_API const char* emscat_version(void);
EMSCAT_API const char* emscat_status_name(int status);
/* Empty string when the last call on this thread succeeded. */
EMSCAT_API const char* emscat_last_error(void);

/* Fields.  Vectors have `d` entries, matrices d*d entries in row-major order. */
EMSCAT_API int emscat_field_zero(int d, double alpha, emscat_field** out);
EMSCAT_API int emscat_field_inverse_power(int d, double v0, double alpha, const double* center, emscat_field** out);
EMSCAT_API int emscat_field_gaussian(int d, double v0, double width, double alpha, const double* center,
                                     emscat_field** out);
EMSCAT_API int emscat_field_radial_magnetic(double b0, double sigma, emscat_field** out);
/* Field from the `<prefix>.*` keys of a configuration, dimension `d`. */
EMSCAT_API int emscat_field_from_config(const emscat_config* cfg, const char* prefix, int d, emscat_field** out);
/* Sum of `n` fields; the inputs stay owned by the caller. */
EMSCAT_API int emscat_field_sum(const emscat_field* const* parts, size_t n, emscat_field** out);
EMSCAT_API void emscat_field_free(emscat_field* field);

EMSCAT_API int emscat_field_dim(const emscat_field* field, int* d);
EMSCAT_API int emscat_field_alpha(const emscat_field* field, double* alpha);
EMSCAT_API int emscat_field_potential(const emscat_field* field, const double* x, double* v);
EMSCAT_API int emscat_field_gradient(const emscat_field* field, const double* x, double* grad);
EMSCAT_API int emscat_field_magnetic(const emscat_field* field, const double* x, double* b);
/* Sampled decay constants beta0, beta1, beta2; *pass is 0 when the field
   fails the decay check. */
EMSCAT_API int emscat_field_decay(const emscat_field* field, double beta[3], int* pass);

/* Scattering data for incoming velocity v and offset x (|v| < c). */
EMSCAT_API int emscat_scattering_data(const emscat_field* field, double c, const double* v, const double* x,
                                      int method, int intervals, double* a_sc, double* b_sc, double* energy_drift);

/* Line functionals on the ray {t theta + x}, theta unit and orthogonal to x.
   which = 1..4 selects w1..w4; c is used by w1 and w2 only. */
EMSCAT_API int emscat_functional(const emscat_field* field, int which, const double* theta, const double* x,
                                 double c, double* out);
/* Integral of the potential along the ray. */
EMSCAT_API int emscat_xray_potential(const emscat_field* field, const double* theta, const double* x, double* out);

/* Configuration: flat `section.key = value` text. */
EMSCAT_API int emscat_config_parse(const char* text, emscat_config** out);
EMSCAT_API int emscat_config_load(const char* path, emscat_config** out);
EMSCAT_API void emscat_config_free(emscat_config* cfg);
EMSCAT_API int emscat_config_set(emscat_config* cfg, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated); *needed receives the length
   including the terminator.  EMSCAT_E_RANGE when buf is too small. */
EMSCAT_API int emscat_config_get(const emscat_config* cfg, const char* key, char* buf, size_t size, size_t* needed);
/* Serialized text, valid until the next call on this thread. */
EMSCAT_API int emscat_config_serialize(const emscat_config* cfg, const char** text);

/* Experiments: command is sweep, reconstruct, demo-nonunique, constants or
   verify-bounds.  out_dir may be NULL, threads <= 0 and has_seed = 0 keep the
   configured values. */
EMSCAT_API int emscat_run_experiment(const char* command, const emscat_config* cfg, const char* out_dir, int threads,
                                     int has_seed, uint64_t seed, emscat_run** out);
EMSCAT_API int emscat_run_exit_code(const emscat_run* run, int* exit_code);
EMSCAT_API int emscat_run_summary(const emscat_run* run, const char** text);
EMSCAT_API int emscat_run_file_count(const emscat_run* run, size_t* n);
EMSCAT_API int emscat_run_file(const emscat_run* run, size_t i, const char** path);
EMSCAT_API void emscat_run_free(emscat_run* run);

#ifdef __cplusplus
}
#endif

#endif
