/*
 * C interface to the log-Gaussian Cox process library: intensity
 * specifications, Poisson point process simulation, inducing point
 * selection, MCMC posterior sampling, prediction and evaluation.
 *
 * All objects are opaque handles created and destroyed through this
 * interface. Functions return LGCP_OK on success; on failure
 * lgcp_last_error() describes the problem (the message is thread-local).
 */
#ifndef LGCP_H
#define LGCP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LGCP_API __declspec(dllexport)
#else
#define LGCP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lgcp_status {
  LGCP_OK = 0,
  LGCP_ERROR_INVALID_ARGUMENT = 1,
  LGCP_ERROR_DATA = 2,
  LGCP_ERROR_NUMERICAL = 3,
  LGCP_ERROR_IO = 4,
  LGCP_ERROR_INTERNAL = 5
} lgcp_status;

LGCP_API const char* lgcp_last_error(void);
LGCP_API const char* lgcp_version(void);

typedef struct lgcp_intensity lgcp_intensity;
typedef struct lgcp_dataset lgcp_dataset;
typedef struct lgcp_selection lgcp_selection;
typedef struct lgcp_samples lgcp_samples;
typedef struct lgcp_estimate lgcp_estimate;

/* -------- intensity specifications -------- */

/* lambda(t) = 2 exp(-t/15) + exp(-((t-25)/10)^2) on [0, 50]. */
LGCP_API lgcp_status lgcp_intensity_create_synthetic_bimodal(lgcp_intensity** out);
LGCP_API lgcp_status lgcp_intensity_create_constant(double value, const double* lower,
                                                    const double* upper, size_t dim,
                                                    lgcp_intensity** out);
/* Piecewise-constant on 1-D: n_edges ascending edges, n_edges-1 levels. */
LGCP_API lgcp_status lgcp_intensity_create_piecewise(const double* edges, size_t n_edges,
                                                     const double* values, lgcp_intensity** out);
/* Values on a regular node grid (row-major, shape[j] nodes per dimension),
 * interpolated multilinearly. */
LGCP_API lgcp_status lgcp_intensity_create_tabulated(const double* lower, const double* upper,
                                                     size_t dim, const size_t* shape,
                                                     const double* table, lgcp_intensity** out);
/* Multiply the intensity by a nonnegative factor (composes). */
LGCP_API lgcp_status lgcp_intensity_scale(lgcp_intensity* intensity, double factor);
LGCP_API lgcp_status lgcp_intensity_eval(const lgcp_intensity* intensity, const double* point,
                                         double* out);
/* Gauss-Legendre integral over the intensity's domain. */
LGCP_API lgcp_status lgcp_intensity_integral(const lgcp_intensity* intensity, int quad_order,
                                             double* out);
LGCP_API lgcp_status lgcp_intensity_domain(const lgcp_intensity* intensity, size_t* dim,
                                           double* lower, double* upper);
LGCP_API void lgcp_intensity_destroy(lgcp_intensity* intensity);

/* -------- event datasets -------- */

LGCP_API lgcp_status lgcp_dataset_create(const double* points, size_t n, size_t dim,
                                         const double* lower, const double* upper,
                                         lgcp_dataset** out);
/* Exact draw from the Poisson point process with the given intensity. */
LGCP_API lgcp_status lgcp_simulate(const lgcp_intensity* intensity, uint64_t seed,
                                   lgcp_dataset** out);
LGCP_API size_t lgcp_dataset_size(const lgcp_dataset* dataset);
LGCP_API size_t lgcp_dataset_dim(const lgcp_dataset* dataset);
/* Copies all coordinates, row-major n x dim. */
LGCP_API lgcp_status lgcp_dataset_points(const lgcp_dataset* dataset, double* out);
LGCP_API lgcp_status lgcp_dataset_domain(const lgcp_dataset* dataset, double* lower, double* upper);
LGCP_API void lgcp_dataset_destroy(lgcp_dataset* dataset);

/* -------- inducing point selection -------- */

typedef struct lgcp_select_options {
  double h_max;        /* maximum output scale of the hyperprior */
  double l_max;        /* maximum input scale, shared across dimensions */
  int num_theta;       /* Monte Carlo hyperparameter samples N */
  double alpha;        /* relative-gain stopping threshold */
  int max_points;      /* iteration cap */
  int restarts;        /* local-search restarts per added point */
  int max_iterations;  /* local-search iterations */
  uint64_t seed;
} lgcp_select_options;

LGCP_API void lgcp_select_options_init(lgcp_select_options* options);
LGCP_API lgcp_status lgcp_select(const lgcp_dataset* dataset, const lgcp_select_options* options,
                                 lgcp_selection** out);

LGCP_API size_t lgcp_selection_size(const lgcp_selection* selection);
/* Trace length minus the stopping step's point when its relative gain fell
 * below alpha. */
LGCP_API size_t lgcp_selection_recommended_size(const lgcp_selection* selection);
LGCP_API size_t lgcp_selection_dim(const lgcp_selection* selection);
LGCP_API lgcp_status lgcp_selection_point(const lgcp_selection* selection, size_t index,
                                          double* out);
LGCP_API lgcp_status lgcp_selection_utility(const lgcp_selection* selection, size_t index,
                                            double* out);
/* Average total unconditional variance (the utility ceiling). */
LGCP_API lgcp_status lgcp_selection_w_inf(const lgcp_selection* selection, double* out);
LGCP_API size_t lgcp_selection_num_theta(const lgcp_selection* selection);
LGCP_API lgcp_status lgcp_selection_theta(const lgcp_selection* selection, size_t index, double* h,
                                          double* l);
LGCP_API void lgcp_selection_destroy(lgcp_selection* selection);

/* -------- posterior sampling -------- */

typedef struct lgcp_fit_options {
  double h_max;
  double l_max;
  int quad_order;
  int burn_in;
  int n_samples;
  int thinning;
  int chains;  /* independent chains run concurrently, draws pooled */
  uint64_t seed;
} lgcp_fit_options;

LGCP_API void lgcp_fit_options_init(lgcp_fit_options* options);
LGCP_API lgcp_status lgcp_fit(const lgcp_dataset* dataset, const double* inducing, size_t k,
                              const lgcp_fit_options* options, lgcp_samples** out);

LGCP_API size_t lgcp_samples_num_draws(const lgcp_samples* samples);
LGCP_API size_t lgcp_samples_num_inducing(const lgcp_samples* samples);
LGCP_API size_t lgcp_samples_dim(const lgcp_samples* samples);
LGCP_API lgcp_status lgcp_samples_g_draw(const lgcp_samples* samples, size_t index, double* out);
LGCP_API lgcp_status lgcp_samples_theta_draw(const lgcp_samples* samples, size_t index, double* h,
                                             double* l);
/* wall_seconds is NaN on handles restored from a file. */
LGCP_API lgcp_status lgcp_samples_stats(const lgcp_samples* samples, double* acceptance_rate,
                                        double* ess_per_1000, double* wall_seconds,
                                        int64_t* conditioning_rejections);
LGCP_API lgcp_status lgcp_samples_save(const lgcp_samples* samples, const char* path);
LGCP_API lgcp_status lgcp_samples_load(const char* path, lgcp_samples** out);
/* Nonzero when the sampler stopped early; the draws then hold the partial
 * chain and lgcp_samples_abort_reason() describes the failure. */
LGCP_API int lgcp_samples_aborted(const lgcp_samples* samples);
LGCP_API const char* lgcp_samples_abort_reason(const lgcp_samples* samples);
LGCP_API void lgcp_samples_destroy(lgcp_samples* samples);

/* -------- prediction -------- */

/* Posterior summaries at the fitted data points (law of total expectation /
 * variance over the stored draws). The dataset must be the one that was
 * fitted. */
LGCP_API lgcp_status lgcp_predict_at_data(const lgcp_samples* samples, const lgcp_dataset* dataset,
                                          lgcp_estimate** out);
LGCP_API lgcp_status lgcp_predict_on_grid(const lgcp_samples* samples, const double* grid,
                                          size_t m, lgcp_estimate** out);
LGCP_API lgcp_status lgcp_estimate_create(const double* locations, size_t m, size_t dim,
                                          const double* log_mean, const double* log_var,
                                          const double* intensity_mean, lgcp_estimate** out);
LGCP_API size_t lgcp_estimate_size(const lgcp_estimate* estimate);
LGCP_API size_t lgcp_estimate_dim(const lgcp_estimate* estimate);
LGCP_API lgcp_status lgcp_estimate_row(const lgcp_estimate* estimate, size_t index,
                                       double* location, double* log_mean, double* log_var,
                                       double* intensity_mean);
LGCP_API void lgcp_estimate_destroy(lgcp_estimate* estimate);

/* -------- evaluation -------- */

/* MAE and RMSE of the estimated intensity as proportions of the mean true
 * intensity over the estimate's grid. */
LGCP_API lgcp_status lgcp_normalized_errors(const lgcp_estimate* estimate,
                                            const lgcp_intensity* truth, double* mae,
                                            double* rmse);
/* Mean and sd over held-out draws of the plug-in Poisson log-likelihood.
 * All held-out datasets must share one domain. */
LGCP_API lgcp_status lgcp_log_predictive(const lgcp_estimate* estimate,
                                         const lgcp_dataset* const* heldout, size_t n_heldout,
                                         double* mean, double* sd);
/* Alternative averaging per-draw predictive probabilities inside the log;
 * recomputes per-draw intensities on the given grid. */
LGCP_API lgcp_status lgcp_log_predictive_per_draw(const lgcp_samples* samples, const double* grid,
                                                  size_t m, const lgcp_dataset* const* heldout,
                                                  size_t n_heldout, double* mean, double* sd);
LGCP_API lgcp_status lgcp_effective_sample_size(const double* series, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* LGCP_H */
