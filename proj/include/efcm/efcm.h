/* C interface of the EFCM toolkit shared library.
 *
 * All entry points return an efcm_status; EFCM_OK means success.  On
 * failure efcm_last_error() gives a thread-local description of the most
 * recent error.  Handles are opaque and must be released with the matching
 * destroy call.
 */
#ifndef EFCM_EFCM_H
#define EFCM_EFCM_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define EFCM_API __declspec(dllexport)
#else
#define EFCM_API __attribute__((visibility("default")))
#endif

typedef enum efcm_status {
  EFCM_OK = 0,
  EFCM_ERR_INVALID_ARGUMENT = 1,
  EFCM_ERR_EXACTNESS = 2,
  EFCM_ERR_DIVERGENCE = 3,
  EFCM_ERR_STRUCTURE_ABSENT = 4,
  EFCM_ERR_EVALUATION = 5,
  EFCM_ERR_BUDGET = 6,
  EFCM_ERR_IO = 7,
  EFCM_ERR_INTERNAL = 8
} efcm_status;

/* Opaque benchmark problem handle. */
typedef struct efcm_problem efcm_problem;

EFCM_API const char* efcm_version(void);

/* Thread-local message for the most recent failing call in this thread. */
EFCM_API const char* efcm_last_error(void);

/* name: "henon-heiles" | "fpu" | "heat".  options: comma-separated
 * key=value list ("N=200" for heat, "m=3,omega=50" for fpu), may be NULL. */
EFCM_API efcm_status efcm_problem_create(const char* name, const char* options,
                                         efcm_problem** out);
EFCM_API void efcm_problem_destroy(efcm_problem* problem);
EFCM_API int efcm_problem_dim(const efcm_problem* problem);
EFCM_API int efcm_problem_has_hamiltonian(const efcm_problem* problem);

/* Work-precision sweep over methods x stepsizes; writes CSV columns
 * method,h,global_error,wall_time_s,total_iterations,wall_time_total_s.
 * methods use the grammar efcm:k,n | hbvm:k,n | gauss:k | radau:k; policy
 * is "tol:<x>" or "fixed:<n>" with an optional ":u0"/":exp" guess suffix.
 * Diverged runs are recorded with global_error inf and *any_diverged is
 * set (pointer may be NULL). */
EFCM_API efcm_status efcm_work_precision(const efcm_problem* problem,
                                         const char* const* methods, int n_methods,
                                         const double* stepsizes, int n_stepsizes, double t_end,
                                         const char* policy, int serial, int gnuplot,
                                         const char* out_csv, int* any_diverged);

/* Energy-drift series |H_n - H_0|; CSV columns method,t,geh. */
EFCM_API efcm_status efcm_energy_drift(const efcm_problem* problem, const char* const* methods,
                                       int n_methods, double h, double t_end, const char* policy,
                                       int serial, int gnuplot, const char* out_csv,
                                       int* any_diverged);

/* Total fixed-point iterations per (method, tolerance); tolerances must be
 * strictly decreasing; diverged cells are written as "div". */
EFCM_API efcm_status efcm_iteration_table(const efcm_problem* problem,
                                          const char* const* methods, int n_methods, double h,
                                          double t_end, const double* tolerances,
                                          int n_tolerances, const char* out_csv,
                                          int* any_diverged);

/* Desk-scale reproduction presets: fig1 fig2 fig3 tab1 tab2 tab3. */
EFCM_API efcm_status efcm_preset(const char* name, const char* out_dir, int serial, int gnuplot,
                                 int* any_diverged);

/* Butcher tableau of "gauss:k", "radau:k" or "hbvm:k,n".  Query the stage
 * count first, then pass arrays of size k (c, b) and k*k (a, row-major). */
EFCM_API efcm_status efcm_tableau_stages(const char* method, int* k);
EFCM_API efcm_status efcm_tableau(const char* method, double* c, double* a_rowmajor, double* b);

/* Largest fixed-point-convergent stepsize for a Lipschitz constant L,
 * semigroup bound C e^{omega t} and rule "gauss:k" | "radau:k". */
EFCM_API efcm_status efcm_step_bound(double lipschitz, double c_semigroup, double omega,
                                     const char* rule, int n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* EFCM_EFCM_H */
