/* C interface to the double-well phase-transition library.
 *
 * Every function returns a dwpt_status; on failure a message is available
 * from dwpt_last_error() on the calling thread until the next call.
 * Strings returned through char** are owned by the caller and released with
 * dwpt_string_free. JSON arguments may be NULL where noted, meaning "defaults".
 */
#ifndef DWPT_DWPT_H
#define DWPT_DWPT_H

#include <stddef.h>

#if defined(DWPT_BUILDING_LIBRARY)
#define DWPT_API __attribute__((visibility("default")))
#else
#define DWPT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dwpt_status {
  DWPT_OK = 0,
  DWPT_INVALID_ARGUMENT = 1,
  DWPT_PRECONDITION = 2,
  DWPT_NO_CONVERGENCE = 3,
  DWPT_IO_ERROR = 4,
  DWPT_FORMAT_ERROR = 5,
  DWPT_INTERNAL_ERROR = 6
} dwpt_status;

typedef struct dwpt_potential dwpt_potential;
typedef struct dwpt_field dwpt_field;

DWPT_API const char* dwpt_version(void);
DWPT_API const char* dwpt_last_error(void);
DWPT_API const char* dwpt_status_name(dwpt_status s);
DWPT_API void dwpt_string_free(char* s);

/* Potentials: {"kind":"quartic"}, {"kind":"table","points":[[x,W],...]},
 * {"kind":"polynomial","coefficients":[c0,c1,...]}. */
DWPT_API dwpt_status dwpt_potential_create(const char* json, dwpt_potential** out);
DWPT_API void dwpt_potential_free(dwpt_potential* p);
DWPT_API dwpt_status dwpt_potential_eval(const dwpt_potential* p, double x, double* w, double* dw, double* d2w);
/* Axiom report as JSON; *all_pass is 1 when every axiom holds. */
DWPT_API dwpt_status dwpt_potential_check(const dwpt_potential* p, char** report_json, int* all_pass);

/* Fields. grid_json: {"kind":"interval|circle|torus","n":..,"length":..[,"n2":..,"length2":..]}.
 * values may be NULL for a zero field; otherwise count must equal the grid size. */
DWPT_API dwpt_status dwpt_field_create(const char* grid_json, double epsilon, const double* values, size_t count,
                                       dwpt_field** out);
DWPT_API void dwpt_field_free(dwpt_field* f);
DWPT_API size_t dwpt_field_size(const dwpt_field* f);
DWPT_API double dwpt_field_epsilon(const dwpt_field* f);
DWPT_API dwpt_status dwpt_field_values(const dwpt_field* f, double* out, size_t count);
DWPT_API dwpt_status dwpt_field_grid(const dwpt_field* f, char** grid_json);

/* Snapshots. potential may be NULL (quartic is recorded); config_json may be NULL. */
DWPT_API dwpt_status dwpt_field_save(const dwpt_field* f, const dwpt_potential* p, const char* config_json,
                                     const char* path);
/* potential_out may be NULL. */
DWPT_API dwpt_status dwpt_field_load(const char* path, dwpt_field** out, dwpt_potential** potential_out);
/* (coordinate, value) CSV. */
DWPT_API dwpt_status dwpt_field_write_profile(const dwpt_field* f, const char* path);

DWPT_API dwpt_status dwpt_energy(const dwpt_field* f, const dwpt_potential* p, double* out);
DWPT_API dwpt_status dwpt_residual(const dwpt_field* f, const dwpt_potential* p, double* out);

/* Solvers. solver_json configures tolerances and limits (NULL for defaults). */
DWPT_API dwpt_status dwpt_solve_model(double half_length, double epsilon, const dwpt_potential* p,
                                      const char* solver_json, dwpt_field** out, char** report_json);
DWPT_API dwpt_status dwpt_threshold(double half_length, const dwpt_potential* p, const char* solver_json,
                                    double rel_width, char** report_json);
DWPT_API dwpt_status dwpt_build_circle(int m, double epsilon, size_t n, const dwpt_potential* p,
                                       const char* solver_json, dwpt_field** out, char** report_json);
/* *converged is set to 1 when Newton met both the residual and the update tolerance. */
DWPT_API dwpt_status dwpt_refine(const dwpt_field* in, const dwpt_potential* p, const char* solver_json,
                                 dwpt_field** out, char** report_json, int* converged);
/* trace_csv may be NULL. */
DWPT_API dwpt_status dwpt_flow(const dwpt_field* in, const dwpt_potential* p, const char* solver_json, long max_steps,
                               double residual_tol, int project_unit_interval, const char* trace_csv,
                               dwpt_field** out, char** report_json);

/* Structural analysis of a field: nodal set, congruence, alternation, rotation
 * symmetry, local symmetries, decay. options_json keys: "m" (rotation order,
 * default the nodal count), "congruence_tol", "symmetry_tol". decay_csv may be NULL.
 * *pass is 1 when every check that applies holds. */
DWPT_API dwpt_status dwpt_analyze(const dwpt_field* f, const dwpt_potential* p, const char* options_json,
                                  const char* decay_csv, char** report_json, int* pass);

/* Experiments: "two-interface", "m-rigidity", "decay", "comparison", "slide".
 * config_json may be NULL. The report JSON echoes the full configuration and
 * carries no timing, so replaying the echoed config reproduces it exactly.
 * csv_path (measurement table) and runtime_seconds may be NULL. */
DWPT_API dwpt_status dwpt_experiment_run(const char* id, const char* config_json, const char* csv_path,
                                         char** report_json, int* passed, double* runtime_seconds);

#ifdef __cplusplus
}
#endif

#endif /* DWPT_DWPT_H */
