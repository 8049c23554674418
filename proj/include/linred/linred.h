#ifndef LINRED_H
#define LINRED_H

/* C interface to the linearization-reduction synthesizer. Strings are UTF-8,
 * NUL-terminated, and owned by the handle they come from. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define LINRED_API __declspec(dllexport)
#else
#define LINRED_API __attribute__((visibility("default")))
#endif

/* Status codes double as CLI exit codes. */
enum {
    LINRED_OK = 0,
    LINRED_USAGE = 1,     /* bad input, parse error, bad config */
    LINRED_EXHAUSTED = 2, /* no reduction within the ceilings */
    LINRED_UNKNOWN = 3,   /* solver timeout, crash, or iteration cap */
    LINRED_REFUTED = 4    /* verification found a counterexample */
};

typedef struct linred_config linred_config;
typedef struct linred_result linred_result;

LINRED_API const char *linred_version(void);

/* Message for the last failing call on this thread, "" if none. */
LINRED_API const char *linred_last_error(void);

LINRED_API linred_config *linred_config_new(void);
LINRED_API void linred_config_free(linred_config *cfg);

/* Keys: solver_cmd, query_timeout_s, logic_override, max_l, max_k, schedule,
 * seed, samples, iteration_cap, coeff_bound, semantics, integer_tier,
 * counterexample_grids, resolution, random_points, point_cap.
 * solver_cmd takes a JSON array or a whitespace separated command line.
 * Returns LINRED_OK or LINRED_USAGE. */
LINRED_API int linred_config_set(linred_config *cfg, const char *key, const char *value);

/* Applies every key of a JSON object. */
LINRED_API int linred_config_load_json(linred_config *cfg, const char *json_text);

/* Current configuration as a JSON object; owned by cfg. */
LINRED_API const char *linred_config_json(linred_config *cfg);

/* The operations below always store a result in *out, even on failure,
 * unless out is NULL. The return value equals linred_result_status(*out). */

/* Predicate DSL text in; reduction JSON and run report out. */
LINRED_API int linred_synth(const linred_config *cfg, const char *predicate_text,
                            linred_result **out);

/* Exact verification of a reduction (interchange JSON). With cross_check
 * nonzero the brute-force oracle also runs and its report is attached. */
LINRED_API int linred_verify(const linred_config *cfg, const char *predicate_text,
                             const char *reduction_json, int cross_check, linred_result **out);

/* Model DSL text in; LP text and transform report out. */
LINRED_API int linred_linearize(const linred_config *cfg, const char *model_text,
                                linred_result **out);

LINRED_API int linred_result_status(const linred_result *res);
/* Main payload: reduction JSON (synth), verification JSON (verify),
 * transform report (linearize). "" when absent. */
LINRED_API const char *linred_result_json(const linred_result *res);
/* Synthesis run report, "" when absent. */
LINRED_API const char *linred_result_report(const linred_result *res);
/* LP text (linearize only). */
LINRED_API const char *linred_result_lp(const linred_result *res);
/* One-line human summary or diagnostic. */
LINRED_API const char *linred_result_message(const linred_result *res);
LINRED_API void linred_result_free(linred_result *res);

#ifdef __cplusplus
}
#endif

#endif /* LINRED_H */
