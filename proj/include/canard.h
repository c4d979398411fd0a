/* canard: analysis of the singularly perturbed predator-prey family
 *   x' = x(A + Bx + Cy),  eps y' = y(D + Ey + Fx)
 * C API of the shared library. Objects are opaque handles; every fallible call
 * returns a canard_status, with a thread-local message via canard_last_error().
 */
#ifndef CANARD_H
#define CANARD_H

#include <stddef.h>

#if defined(_WIN32)
#define CANARD_API __declspec(dllexport)
#else
#define CANARD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum canard_status {
    CANARD_OK = 0,
    CANARD_ERR_ZERO_COEFFICIENT = 1,
    CANARD_ERR_BAD_WINDOW = 2,
    CANARD_ERR_DEGENERATE_CLASSIFICATION = 3,
    CANARD_ERR_NO_CROSSING = 4,
    CANARD_ERR_NO_EXIT_BEFORE_T = 5,
    CANARD_ERR_OUT_OF_DOMAIN = 6,
    CANARD_ERR_INVALID_EPSILON = 7,
    CANARD_ERR_NOT_APPLICABLE = 8,
    CANARD_ERR_ADMISSIBILITY = 9,
    CANARD_ERR_NO_ROOT_BEFORE_T = 10,
    CANARD_ERR_PARSE = 11,
    CANARD_ERR_VALIDATION = 12,
    CANARD_ERR_USAGE = 13,
    CANARD_ERR_VERIFICATION_FAILED = 14,
    CANARD_ERR_INTERNAL = 15
} canard_status;

/* case_tag values */
enum {
    CANARD_CASE_1A = 0,
    CANARD_CASE_1B = 1,
    CANARD_CASE_2A = 2,
    CANARD_CASE_2B = 3,
    CANARD_CASE_1B_DUAL = 4,
    CANARD_CASE_2B_DUAL = 5,
    CANARD_CASE_NOT_IN_QUADRANT = 6
};

/* switch_kind values */
enum {
    CANARD_SWITCH_DELAYED_AT_TSTAR = 0,
    CANARD_SWITCH_IMMEDIATE_AT_TC = 1,
    CANARD_SWITCH_NONE = 2,
    CANARD_SWITCH_OUT_OF_SCOPE = 3
};

/* canonical_form values */
enum {
    CANARD_FORM_NONE = 0,
    CANARD_FORM_FAST_PREDATOR_A = 1,
    CANARD_FORM_FAST_PREDATOR_B = 2,
    CANARD_FORM_FAST_PREDATOR_C = 3,
    CANARD_FORM_FAST_PREY_A = 4,
    CANARD_FORM_FAST_PREY_B = 5,
    CANARD_FORM_FAST_PREY_C = 6
};

/* trajectory termination values */
enum {
    CANARD_TERM_REACHED_T = 0,
    CANARD_TERM_DOMAIN_EXIT = 1,
    CANARD_TERM_STEP_UNDERFLOW = 2
};

/* detection_mode values */
enum {
    CANARD_DETECT_RISE_TO_PHI = 0,
    CANARD_DETECT_FALL_TO_ZERO = 1,
    CANARD_DETECT_NOT_DETECTED = 2
};

typedef struct canard_system canard_system;
typedef struct canard_analysis canard_analysis;
typedef struct canard_trajectory canard_trajectory;

typedef struct canard_solver_options {
    double rel_tol;               /* > 0 */
    double abs_tol;               /* > 0 */
    double max_step;              /* 0 selects (T - t0)/500 */
    double min_step;              /* > 0 */
    int use_log_fast_variable;    /* nonzero: integrate w = eps * ln y */
} canard_solver_options;

CANARD_API const char* canard_version(void);
CANARD_API const char* canard_status_name(canard_status s);
/* Message of the most recent failure on this thread. */
CANARD_API const char* canard_last_error(void);
CANARD_API void canard_string_free(char* s);
CANARD_API void canard_solver_options_default(canard_solver_options* opts);

/* coeffs = {A,B,C,D,E,F}; window = {t0,T,x0,y0,M,N}. Validates both. */
CANARD_API canard_status canard_system_create(const double coeffs[6], const double window[6],
                                              canard_system** out);
CANARD_API void canard_system_free(canard_system* sys);

CANARD_API canard_status canard_system_classify(const canard_system* sys, int* case_tag,
                                                int* switch_kind, int* canonical_form);
CANARD_API const char* canard_case_tag_name(int case_tag);
CANARD_API const char* canard_switch_kind_name(int switch_kind);
CANARD_API const char* canard_canonical_form_name(int canonical_form);

/* psi and the phi branch of the critical manifold. */
CANARD_API canard_status canard_system_manifold(const canard_system* sys, double* psi,
                                                double* phi_slope, double* phi_intercept);

/* Assumption report as a JSON array string (caller frees). */
CANARD_API canard_status canard_system_assumptions(const canard_system* sys, int* all_pass,
                                                   char** json_out);

/* Duality substitution x = 2 psi - z. Outputs: fast_out = {D',E',F'},
 * slow_out = {root, lin, quad, cross}, z0_out = transformed x0. */
CANARD_API canard_status canard_system_dual(const canard_system* sys, double fast_out[3],
                                            double slow_out[4], double* z0_out);

/* Reduced (eps = 0) analysis: crossing time, exit time, entry-exit function. */
CANARD_API canard_status canard_system_analyze(const canard_system* sys,
                                               canard_analysis** out);
CANARD_API void canard_analysis_free(canard_analysis* an);
CANARD_API canard_status canard_analysis_crossing_time(const canard_analysis* an, double* out);
CANARD_API canard_status canard_analysis_exit_time(const canard_analysis* an, double* out);
CANARD_API canard_status canard_analysis_blowup_time(const canard_analysis* an, double* out);
CANARD_API canard_status canard_analysis_entry_exit_g(const canard_analysis* an, double t,
                                                      double* out);
/* Composite eps -> 0 limit at time t (post-switch convention at the switch). */
CANARD_API canard_status canard_analysis_composite(const canard_analysis* an, double t,
                                                   double* x_lim, double* y_lim);

/* Stiff integration at a fixed eps in (0, 0.2]. opts may be NULL for defaults. */
CANARD_API canard_status canard_system_integrate(const canard_system* sys, double epsilon,
                                                 const canard_solver_options* opts,
                                                 canard_trajectory** out);
CANARD_API void canard_trajectory_free(canard_trajectory* traj);
CANARD_API size_t canard_trajectory_size(const canard_trajectory* traj);
CANARD_API canard_status canard_trajectory_sample(const canard_trajectory* traj, size_t index,
                                                  double* t, double* x, double* y, double* w);
CANARD_API int canard_trajectory_termination(const canard_trajectory* traj);

/* Switch detection against the predicted time (t* delayed / t_c immediate). */
CANARD_API canard_status canard_detect_switch(const canard_system* sys,
                                              const canard_trajectory* traj, double theta,
                                              double* t_sw, double* abs_error, int* mode);

/* Harness entry point used by the CLI. command is one of
 * "classify" | "analyze" | "simulate" | "sweep" | "verify".
 * epsilon is consumed by "simulate" (pass NaN to use the config's value).
 * out_dir NULL uses the config's out_dir. summary_out (may be NULL) receives a
 * malloc'ed one-line summary; free with canard_string_free. Verification
 * failures surface as CANARD_ERR_VERIFICATION_FAILED. */
CANARD_API canard_status canard_run(const char* command, const char* config_path,
                                    const char* out_dir, double epsilon, char** summary_out);

#ifdef __cplusplus
}
#endif

#endif /* CANARD_H */
