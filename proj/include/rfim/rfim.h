/*
 * rfim — random-field Ising lab, C API.
 *
 * The library computes finite-volume Gibbs expectations of the RFIM with
 * independent site disorder, exactly on small lattices and by seeded
 * Monte Carlo on larger ones, and runs the bundled identity/trend
 * verification plans.
 *
 * Conventions:
 *   - Every fallible function returns rfim_status; RFIM_OK is 0.
 *   - On failure, rfim_last_error() returns a thread-local message that
 *     stays valid until the next failing call on the same thread.
 *   - Objects are opaque handles; free them with the matching _free.
 *   - Strings returned through char** are heap-allocated; release them
 *     with rfim_string_free.
 *   - Profiles, distributions, plans, and manifests are JSON documents;
 *     see the README for the schemas.
 */
#ifndef RFIM_H
#define RFIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RFIM_API __declspec(dllexport)
#else
#define RFIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rfim_status {
  RFIM_OK = 0,
  RFIM_ERR_INVALID_ARGUMENT = 1,
  RFIM_ERR_CAPACITY = 2,
  RFIM_ERR_VALIDATION = 3,
  RFIM_ERR_EXECUTION = 4,
  RFIM_ERR_IO = 5
} rfim_status;

typedef struct rfim_lattice rfim_lattice;
typedef struct rfim_disorder rfim_disorder;
typedef struct rfim_exact rfim_exact;

RFIM_API const char* rfim_version(void);
RFIM_API const char* rfim_last_error(void);
RFIM_API void rfim_string_free(char* s);

/* ---- lattice: hypercube Z^d ∩ [1,n]^d, free boundary -------------- */

RFIM_API rfim_status rfim_lattice_create(int32_t d, int32_t n,
                                         rfim_lattice** out);
RFIM_API void rfim_lattice_free(rfim_lattice* lat);
RFIM_API int64_t rfim_lattice_volume(const rfim_lattice* lat);
RFIM_API int64_t rfim_lattice_edge_count(const rfim_lattice* lat);
/* coords must hold d entries */
RFIM_API rfim_status rfim_lattice_site_coords(const rfim_lattice* lat,
                                              int64_t site, int32_t* coords);
/* L1 distance between two sites */
RFIM_API rfim_status rfim_lattice_site_norm(const rfim_lattice* lat,
                                            int64_t site, int64_t origin,
                                            double* out);

/* ---- disorder: g_x = h_x * zeta_x --------------------------------- */

/* profile_json: {"kind":"constant-sign","c":1.0} or
 *               {"kind":"power-law","hstar":0.5,"alpha":1.0}
 * dist_json:    {"kind":"gaussian"|"rademacher"|"uniform"|
 *                "centered-exponential"} or {"kind":"student-t","nu":7} */
RFIM_API rfim_status rfim_disorder_create(const rfim_lattice* lat,
                                          const char* profile_json,
                                          const char* dist_json, uint64_t seed,
                                          rfim_disorder** out);
RFIM_API void rfim_disorder_free(rfim_disorder* dis);
/* g must hold volume entries */
RFIM_API rfim_status rfim_disorder_g(const rfim_disorder* dis, double* g);
RFIM_API rfim_status rfim_disorder_h_profile(const rfim_disorder* dis,
                                             double* h);
RFIM_API rfim_status rfim_disorder_smallness_ratio(const rfim_disorder* dis,
                                                   double* out);
RFIM_API rfim_status rfim_disorder_to_json(const rfim_disorder* dis,
                                           char** json_out);

/* ---- exact engine -------------------------------------------------- */

RFIM_API rfim_status rfim_exact_create(const rfim_lattice* lat,
                                       const rfim_disorder* dis, double beta,
                                       double h, int32_t enumeration_cap,
                                       rfim_exact** out);
RFIM_API void rfim_exact_free(rfim_exact* state);
RFIM_API rfim_status rfim_exact_log_partition(const rfim_exact* state,
                                              double* out);
RFIM_API rfim_status rfim_exact_site_mean(const rfim_exact* state, int64_t x,
                                          double* out);
RFIM_API rfim_status rfim_exact_pair_mean(const rfim_exact* state, int64_t x,
                                          int64_t y, double* out);
RFIM_API rfim_status rfim_exact_truncated_correlation(const rfim_exact* state,
                                                      int64_t x, int64_t y,
                                                      double* out);
/* analytic d^order F / d g_x^order, order in 1..4 */
RFIM_API rfim_status rfim_exact_derivative_stack(const rfim_exact* state,
                                                 int64_t x, int32_t order,
                                                 double* out);
/* central finite differences of F in g_x (order 1) or the mixed second
 * derivative in (g_x, g_y); pass y = -1 for the same-site second
 * derivative */
RFIM_API rfim_status rfim_fd_derivative(const rfim_lattice* lat,
                                        const rfim_disorder* dis, double beta,
                                        double h, int64_t x, double step,
                                        int32_t order, int64_t y,
                                        int32_t enumeration_cap, double* out);
/* d = 1 chains only */
RFIM_API rfim_status rfim_transfer_matrix_log_partition(
    const rfim_disorder* dis, double beta, double h, double* out);

/* ---- plans ---------------------------------------------------------- */

/* Validate a plan document. On success *normalized_json receives the
 * normalized plan. On validation failure returns RFIM_ERR_VALIDATION and
 * *diagnostics_json receives a JSON list of {path, message}. */
RFIM_API rfim_status rfim_plan_validate(const char* plan_json,
                                        char** normalized_json,
                                        char** diagnostics_json);

/* Run a plan slice. mode: all | exact | mcmc | gg | ibp. workers <= 0
 * picks the hardware count. seed_base_override < 0 keeps the plan value.
 * Writes manifest.json, summary.json and per-observable CSVs under
 * out_dir; *summary_json receives the summary document. */
RFIM_API rfim_status rfim_plan_run(const char* plan_json, const char* mode,
                                   const char* out_dir, int32_t workers,
                                   int64_t seed_base_override,
                                   char** summary_json);

/* Re-run a recorded manifest; outputs are byte-identical for any worker
 * count. */
RFIM_API rfim_status rfim_manifest_replay(const char* manifest_json,
                                          const char* out_dir, int32_t workers,
                                          char** summary_json);

/* Trend verdicts for one observable column of an emitted CSV. */
RFIM_API rfim_status rfim_trend_from_csv(const char* csv_text,
                                         const char* observable,
                                         char** trend_json);

/* Run the integration-by-parts verification suite; *reports_json receives
 * the remainder reports. */
RFIM_API rfim_status rfim_ibp_run(char** reports_json);

#ifdef __cplusplus
}
#endif

#endif /* RFIM_H */
