/* C interface to the duffgrape library.
 *
 * All functions return a dg_status; on failure dg_last_error() describes the
 * problem (thread-local, valid until the next call on the same thread).
 * Objects are opaque handles released with the matching *_destroy call. */
#ifndef DUFFGRAPE_H
#define DUFFGRAPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DG_API __declspec(dllexport)
#else
#define DG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dg_status {
  DG_OK = 0,
  DG_INVALID_ARGUMENT = 1,
  DG_NOT_CONVERGED = 2,
  DG_NUMERICAL_ERROR = 3,
  DG_IO_ERROR = 4,
  DG_INTERNAL_ERROR = 5
} dg_status;

typedef struct dg_model dg_model;
typedef struct dg_result dg_result;

DG_API const char* dg_version(void);
DG_API const char* dg_last_error(void);

/* ---- oscillator ---------------------------------------------------------- */

typedef struct dg_oscillator {
  double delta;
  double omega0;
  int levels;
  int buffer_levels;
  int basis_levels;
} dg_oscillator;

DG_API void dg_oscillator_default(dg_oscillator* spec);

DG_API dg_status dg_model_create(const dg_oscillator* spec, dg_model** out);
DG_API void dg_model_destroy(dg_model* model);
DG_API int dg_model_dim(const dg_model* model);
/* Eigenenergies of the truncated Hamiltonian, ascending; `cap` >= dim. */
DG_API dg_status dg_model_energies(const dg_model* model, double* out, size_t cap);
/* Rotating-wave transition frequencies w + delta n for n = 0..n_max. */
DG_API dg_status dg_transition_frequencies(const dg_model* model, int n_max, double* out, size_t cap);
DG_API dg_status dg_rwa_exact_ratio(const dg_oscillator* spec, int n_max, double* out, size_t cap);

/* ---- dynamics / gradient -------------------------------------------------- */

DG_API dg_status dg_transfer_fidelity(const dg_model* model, const double* amplitudes, size_t n_slices,
                                      double total_time, int initial_level, int target_level, double* fidelity);
/* First-order GRAPE gradient, one entry per slice. */
DG_API dg_status dg_gradient(const dg_model* model, const double* amplitudes, size_t n_slices, double total_time,
                             int initial_level, int target_level, double* gradient_out);

/* ---- optimizer ------------------------------------------------------------ */

typedef struct dg_grape_config {
  int initial_level;
  int target_level;
  double total_time;
  int n_slices;
  double fidelity_goal;
  int max_iterations;
  double step_size;
  double momentum;
  int escape_boost_iters;
  int restarts;
  uint64_t seed;
} dg_grape_config;

DG_API void dg_grape_config_default(dg_grape_config* config);

/* Returns DG_NOT_CONVERGED (with *out set) when the goal was not reached. */
DG_API dg_status dg_optimize(const dg_model* model, const dg_grape_config* config, dg_result** out);
DG_API void dg_result_destroy(dg_result* result);
DG_API double dg_result_fidelity(const dg_result* result);
DG_API int dg_result_converged(const dg_result* result);
DG_API int dg_result_iterations(const dg_result* result);
DG_API size_t dg_result_slices(const dg_result* result);
DG_API dg_status dg_result_amplitudes(const dg_result* result, double* out, size_t cap);

/* ---- experiment jobs (write artifacts + manifest.json into output_dir) ----- */

/* `config_json` is echoed verbatim into manifest.json; it may be NULL. */

typedef struct dg_prepare_job {
  dg_oscillator oscillator;
  dg_grape_config grape; /* initial_level is forced to 0 */
} dg_prepare_job;

/* Default pulse duration for preparing |target> from |0>. */
DG_API double dg_default_preparation_time(int target_level);

DG_API dg_status dg_run_prepare(const dg_prepare_job* job, const char* output_dir, const char* config_json);

typedef struct dg_sweep_options {
  double fidelity_goal;
  double t_lo;
  double t_hi;
  double time_tolerance;
  double max_slice_width;
  int min_slices;
  int max_iterations;
  int restarts;
  uint64_t seed;
  int jobs;
} dg_sweep_options;

DG_API void dg_sweep_options_default(dg_sweep_options* options);

DG_API dg_status dg_run_scaling(const dg_oscillator* base, const double* deltas, size_t n_deltas, int initial_level,
                                int target_level, const dg_sweep_options* options, const char* output_dir,
                                const char* config_json);
DG_API dg_status dg_run_baseline(const dg_oscillator* base, const double* deltas, size_t n_deltas,
                                 const dg_sweep_options* options, const char* output_dir, const char* config_json);
DG_API dg_status dg_run_error_vs_time(const dg_oscillator* spec, const double* times, size_t n_times,
                                      int initial_level, int target_level, const dg_sweep_options* options,
                                      const char* output_dir, const char* config_json);
DG_API dg_status dg_run_spectrum_check(const double* deltas, size_t n_deltas, double omega0, int n_max,
                                       const char* output_dir, const char* config_json);

/* Re-propagates the pulse stored in a result.json and reports its fidelity. */
DG_API dg_status dg_replay_result(const char* result_json_path, double* fidelity);

#ifdef __cplusplus
}
#endif

#endif /* DUFFGRAPE_H */
