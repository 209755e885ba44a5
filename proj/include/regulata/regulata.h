/*
 * regulata C interface.
 *
 * Handles are opaque and owned by the caller; release them with the matching
 * *_free function. Every call returns a regulata_status; on failure the
 * message for the calling thread is available from regulata_last_error().
 */
#ifndef REGULATA_H
#define REGULATA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(REGULATA_BUILDING)
#    define REGULATA_API __declspec(dllexport)
#  else
#    define REGULATA_API __declspec(dllimport)
#  endif
#else
#  define REGULATA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum regulata_status {
    REGULATA_OK = 0,
    REGULATA_E_NULL_ARGUMENT = 1,
    REGULATA_E_SHAPE_MISMATCH = 2,
    REGULATA_E_INVALID_ARGUMENT = 3,
    REGULATA_E_HURWITZ_VIOLATION = 4,
    REGULATA_E_SINGULAR_XI = 5,
    REGULATA_E_NO_UNIQUE_SOLUTION = 6,
    REGULATA_E_SINGULAR = 7,
    REGULATA_E_CONVERGENCE_FAILURE = 8,
    REGULATA_E_COMPLEX_PAIRING = 9,
    REGULATA_E_STEP_UNDERFLOW = 10,
    REGULATA_E_NON_FINITE_STATE = 11,
    REGULATA_E_WINDOW_TOO_SHORT = 12,
    REGULATA_E_CONFIG = 13,
    REGULATA_E_VERIFICATION_FAILURE = 14,
    REGULATA_E_IO = 15,
    REGULATA_E_OUT_OF_RANGE = 16,
    REGULATA_E_INTERNAL = 99
} regulata_status;

typedef struct regulata_scenario regulata_scenario;
typedef struct regulata_result regulata_result;
typedef struct regulata_verify_report regulata_verify_report;

REGULATA_API const char* regulata_version(void);
REGULATA_API const char* regulata_status_string(regulata_status status);
/* Message of the last failed call on this thread; empty string if none. */
REGULATA_API const char* regulata_last_error(void);

/* Scenarios. Loading parses and validates fields; model-level problems
 * (non-Hurwitz internal model, singular regulator equations) surface from
 * regulata_run as REGULATA_E_CONFIG and from regulata_verify as failed checks. */
REGULATA_API regulata_status regulata_scenario_load(const char* path, regulata_scenario** out);
REGULATA_API regulata_status regulata_scenario_parse(const char* json_text, regulata_scenario** out);
REGULATA_API void regulata_scenario_free(regulata_scenario* scenario);
REGULATA_API const char* regulata_scenario_name(const regulata_scenario* scenario);
REGULATA_API const char* regulata_scenario_kind(const regulata_scenario* scenario);
REGULATA_API const char* regulata_scenario_output_dir(const regulata_scenario* scenario);

/* Simulation. */
REGULATA_API regulata_status regulata_run(const regulata_scenario* scenario, regulata_result** out);
REGULATA_API void regulata_result_free(regulata_result* result);
/* Writes trajectory.csv, plots/ and report.json as selected by the scenario. */
REGULATA_API regulata_status regulata_result_write(const regulata_result* result, const char* out_dir);
REGULATA_API size_t regulata_result_rows(const regulata_result* result);
/* Column 0 is time, then states, then derived signals. */
REGULATA_API size_t regulata_result_columns(const regulata_result* result);
REGULATA_API const char* regulata_result_column_name(const regulata_result* result, size_t column);
REGULATA_API regulata_status regulata_result_value(const regulata_result* result, size_t row, size_t column,
                                                   double* out);
/* Summary report as JSON; valid until the result is freed. */
REGULATA_API const char* regulata_result_report(const regulata_result* result);

/* Algebraic self-checks. seed drives the sampled generator states. */
REGULATA_API regulata_status regulata_verify(const regulata_scenario* scenario, uint64_t seed,
                                             regulata_verify_report** out);
REGULATA_API void regulata_verify_free(regulata_verify_report* report);
REGULATA_API size_t regulata_verify_count(const regulata_verify_report* report);
REGULATA_API int regulata_verify_passed(const regulata_verify_report* report, size_t index);
REGULATA_API const char* regulata_verify_name(const regulata_verify_report* report, size_t index);
REGULATA_API const char* regulata_verify_detail(const regulata_verify_report* report, size_t index);
/* 1 when every check passed. */
REGULATA_API int regulata_verify_all_passed(const regulata_verify_report* report);
/* Fixed-width table of all checks. */
REGULATA_API const char* regulata_verify_table(const regulata_verify_report* report);

#ifdef __cplusplus
}
#endif

#endif /* REGULATA_H */
