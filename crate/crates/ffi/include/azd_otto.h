#ifndef AZD_OTTO_H
#define AZD_OTTO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define AZD_MODE_AZD 0

#define AZD_MODE_MARKOVIAN 1

#define AZD_OBSERVABLE_POWER 0

#define AZD_OBSERVABLE_COOLING_RATE 1

#define AZD_REGIME_ENGINE 0

#define AZD_REGIME_REFRIGERATOR 1

#define AZD_REGIME_HEAT_DISTRIBUTOR 2

#define AZD_REGIME_OTHER 3

// Opaque spectral model handle.
typedef struct AzdSpectralModel AzdSpectralModel;

// Opaque sweep result handle.
typedef struct AzdSweepResult AzdSweepResult;

typedef struct AzdQuadrature {
  double rel_tol;
  double abs_tol;
  double window_halfwidth_factor;
  size_t max_subdivisions;
} AzdQuadrature;

typedef int32_t AzdStatus;

typedef struct AzdStrokeSummary {
  double duration;
  size_t n_cp;
  size_t n_dc;
  double p1_final;
} AzdStrokeSummary;

// Shared machine and protocol parameters. Durations are absolute.
typedef struct AzdCycleParams {
  double omega_c;
  double omega_h;
  double beta_h;
  double beta_c;
  double tau_u1;
  double tau_u2;
  double tau_cp;
  double tau_dc;
  double lambda_bar;
  double epsilon;
  size_t max_windows;
  // `AZD_MODE_AZD` or `AZD_MODE_MARKOVIAN`.
  int32_t mode;
} AzdCycleParams;

// Cycle thermodynamics; `eta` and `cop` are NaN when undefined.
typedef struct AzdCycleReport {
  double q_h;
  double q_c;
  double e_ab;
  double e_cd;
  double work;
  double tau_h;
  double tau_c;
  double tau_total;
  double power;
  double eta;
  double kappa;
  double cop;
  int32_t regime;
  size_t n_dc_hot;
  size_t n_dc_cold;
} AzdCycleReport;

// One sweep row; absent values are NaN and absent counts are -1.
typedef struct AzdSweepRow {
  double tau_cp;
  double value;
  double baseline;
  double qa_ratio;
  int64_t n_dc_hot;
  int64_t n_dc_cold;
  bool converged;
} AzdSweepRow;

#define AZD_OK 0

// A parameter or configuration was rejected.
#define AZD_ERR_INVALID 2

// A thermalization stroke, limit cycle or sweep did not converge.
#define AZD_ERR_CONVERGENCE 3

// An integral did not reach its tolerance.
#define AZD_ERR_QUADRATURE 4

// A required pointer argument was null.
#define AZD_ERR_NULL 5

// The library panicked; this indicates a bug.
#define AZD_ERR_PANIC 6

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *azd_version(void);

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next library call on the same thread.
const char *azd_last_error_message(void);

struct AzdQuadrature azd_quadrature_default(void);

// Creates a Lorentzian bath model.
//
// # Safety
// `out_model` must be valid for writes.
AzdStatus azd_lorentzian_new(double gamma0,
                             double width,
                             double detuning,
                             double beta,
                             double omega_ref,
                             struct AzdSpectralModel **out_model);

// Creates a super-Ohmic bath model.
//
// # Safety
// `out_model` must be valid for writes.
AzdStatus azd_super_ohmic_new(double gamma0,
                              double width,
                              double detuning,
                              double ohmic_exponent,
                              double beta,
                              double omega_ref,
                              struct AzdSpectralModel **out_model);

// Releases a model; NULL is ignored.
//
// # Safety
// `model` must come from a constructor of this library and not be used
// afterwards.
void azd_spectral_model_free(struct AzdSpectralModel *model);

// `G(nu)`.
//
// # Safety
// `model` must be a live handle and `out_value` valid for writes.
AzdStatus azd_spectral_density(const struct AzdSpectralModel *model, double nu, double *out_value);

// `R(omega, t)`; `q` may be NULL for defaults.
//
// # Safety
// `model` must be a live handle, `q` NULL or valid, `out_value` valid for
// writes.
AzdStatus azd_response_coefficient(const struct AzdSpectralModel *model,
                                   double omega,
                                   double t,
                                   const struct AzdQuadrature *q,
                                   double *out_value);

// `2 * integral_0^T R(omega, t) dt`; `q` may be NULL for defaults.
//
// # Safety
// As for `azd_response_coefficient`.
AzdStatus azd_accumulated_rate(const struct AzdSpectralModel *model,
                               double omega,
                               double duration,
                               const struct AzdQuadrature *q,
                               double *out_value);

// `pi G(omega)`.
//
// # Safety
// `model` must be a live handle and `out_value` valid for writes.
AzdStatus azd_markovian_rate(const struct AzdSpectralModel *model, double omega, double *out_value);

// Ground and excited populations of the Gibbs state.
//
// # Safety
// `out_p1` and `out_p2` must be valid for writes.
AzdStatus azd_gibbs_state(double omega, double beta, double *out_p1, double *out_p2);

// Windowed thermalization stroke from ground population `p1_initial`
// towards the Gibbs state at `(omega, target_beta)`.
//
// # Safety
// `model` must be a live handle, `q` NULL or valid, `out_summary` valid for
// writes.
AzdStatus azd_thermalization_stroke(const struct AzdSpectralModel *model,
                                    double p1_initial,
                                    double omega,
                                    double tau_cp,
                                    double tau_dc,
                                    double lambda_bar,
                                    size_t max_windows,
                                    double epsilon,
                                    double target_beta,
                                    const struct AzdQuadrature *q,
                                    struct AzdStrokeSummary *out_summary);

// Runs the limit cycle. The bath handles supply spectral shapes; they are
// re-anchored to `(omega_h, beta_h)` and `(omega_c, beta_c)`.
//
// # Safety
// `params`, `hot`, `cold` must be valid, `q` NULL or valid, `out_report`
// valid for writes.
AzdStatus azd_run_limit_cycle(const struct AzdCycleParams *params,
                              const struct AzdSpectralModel *hot,
                              const struct AzdSpectralModel *cold,
                              const struct AzdQuadrature *q,
                              struct AzdCycleReport *out_report);

// Advantage-ratio sweep over `grid` (absolute `tau_cp` values, strictly
// increasing). `params.tau_cp` and `params.mode` are ignored.
//
// # Safety
// `params`, `hot`, `cold` must be valid, `grid` must point to `grid_len`
// doubles, `q` NULL or valid, `out_result` valid for writes.
AzdStatus azd_qa_sweep(const struct AzdCycleParams *params,
                       const struct AzdSpectralModel *hot,
                       const struct AzdSpectralModel *cold,
                       const double *grid,
                       size_t grid_len,
                       int32_t observable,
                       const struct AzdQuadrature *q,
                       struct AzdSweepResult **out_result);

// Number of rows; 0 for NULL.
//
// # Safety
// `result` must be NULL or a live handle.
size_t azd_sweep_result_len(const struct AzdSweepResult *result);

// Copies row `index` into `out_row`.
//
// # Safety
// `result` must be a live handle and `out_row` valid for writes.
AzdStatus azd_sweep_result_row(const struct AzdSweepResult *result,
                               size_t index,
                               struct AzdSweepRow *out_row);

// Releases a sweep result; NULL is ignored.
//
// # Safety
// `result` must come from `azd_qa_sweep` and not be used afterwards.
void azd_sweep_result_free(struct AzdSweepResult *result);

// Copies the last error message into `buf` (NUL-terminated, truncated to
// `len`). Returns the full message length without the terminator, or 0
// when there is no error.
//
// # Safety
// `buf` must be NULL or valid for `len` bytes.
size_t azd_copy_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AZD_OTTO_H */
