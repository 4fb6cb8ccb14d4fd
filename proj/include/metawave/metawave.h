#ifndef METAWAVE_METAWAVE_H
#define METAWAVE_METAWAVE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(METAWAVE_BUILDING)
#define MW_API __declspec(dllexport)
#else
#define MW_API __declspec(dllimport)
#endif
#else
#define MW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mw_status {
  MW_OK = 0,
  MW_ERR_PARAMETER = 1,
  MW_ERR_CONFIG = 2,
  MW_ERR_DEGENERATE = 3,
  MW_ERR_GEOMETRY = 4,
  MW_ERR_RESOURCE = 5,
  MW_ERR_SOLVER = 6,
  MW_ERR_ACCURACY = 7,
  MW_ERR_RESONANCE = 8,
  MW_ERR_CONSISTENCY = 9,
  MW_ERR_INTERNAL = 10
} mw_status;

typedef enum mw_geometry {
  MW_SIGMA1 = 1,
  MW_SIGMA2 = 2,
  MW_SIGMA3 = 3,
  MW_SIGMA4 = 4
} mw_geometry;

typedef struct mw_complex {
  double re;
  double im;
} mw_complex;

typedef struct mw_coefficients {
  mw_complex R;
  mw_complex T;
  mw_complex R_M;
  mw_complex T_M;
} mw_coefficients;

/* Opaque handles. */
typedef struct mw_config mw_config;
typedef struct mw_report mw_report;

MW_API const char *mw_version(void);
MW_API const char *mw_status_name(mw_status s);

/* Message of the last failing call on this thread ("" if none). */
MW_API const char *mw_last_error(void);

/* Process exit code for a status: 0 ok, 1 config/parameter, 2 otherwise. */
MW_API int mw_exit_code(mw_status s);

/* Slab coefficients. The slab occupies x1 in (-L, 0); units eps0 = mu0 = 1,
   so k0 = omega. */
MW_API mw_status mw_closed_form_coeffs(mw_geometry g, double k0, double L, double alpha,
                                       mw_complex gamma, mw_coefficients *out);
MW_API mw_status mw_interface_oracle(mw_complex a_M, mw_complex k_M, double k0,
                                     double L, mw_coefficients *out);

/* Random lossless comparison of the closed forms with the interface
   system. Reports the largest componentwise deviation and the largest
   | |R|^2 + |T|^2 - 1 |. */
MW_API mw_status mw_check_slab_oracle(int draws, uint64_t seed, double *max_deviation,
                                      double *max_energy_defect);

/* Configuration. Unknown keys, type errors and violated preconditions are
   rejected here. */
MW_API mw_status mw_config_load(const char *path, mw_config **out);
MW_API mw_status mw_config_parse(const char *json_text, mw_config **out);
MW_API mw_status mw_config_default(mw_config **out);
MW_API mw_status mw_config_set_out(mw_config *cfg, const char *dir);
/* Canonical JSON; release with mw_string_free. */
MW_API mw_status mw_config_to_json(const mw_config *cfg, char **out);
MW_API mw_status mw_config_fingerprint(const mw_config *cfg, char **out);
MW_API void mw_config_free(mw_config *cfg);

/* Runs one stage: "coeffs", "cell", "mu-sweep", "solve-fine",
   "solve-hmm", "run" or "sweep". Artifacts go to the config's output
   directory when write_files is nonzero. A report is returned whenever
   the stage started; module failures are recorded inside it and reflected
   by mw_report_status. */
MW_API mw_status mw_run(const mw_config *cfg, const char *stage, int threads,
                        int write_files, mw_report **out);
MW_API mw_status mw_report_status(const mw_report *r);
MW_API mw_status mw_report_to_json(const mw_report *r, char **out);
MW_API mw_status mw_report_timings_json(const mw_report *r, char **out);
MW_API void mw_report_free(mw_report *r);

MW_API void mw_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif
