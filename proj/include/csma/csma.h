/*
 * C interface to the slotted CSMA simulator and exact chain analysis.
 *
 * Objects are opaque handles created and destroyed through this API. Every
 * fallible call returns a csma_status; on failure csma_last_error() describes
 * the problem for the calling thread. Strings returned through char** are
 * owned by the caller and released with csma_string_free().
 */
#ifndef CSMA_CSMA_H
#define CSMA_CSMA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CSMA_BUILDING_LIBRARY)
#define CSMA_API __declspec(dllexport)
#else
#define CSMA_API __declspec(dllimport)
#endif
#else
#define CSMA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum csma_status {
    CSMA_OK = 0,
    CSMA_ERR_INVALID_ARGUMENT = 1,
    CSMA_ERR_INVALID_CONFIG = 2,
    CSMA_ERR_INVALID_GRAPH = 3,
    CSMA_ERR_STATE_SPACE_TOO_LARGE = 4,
    CSMA_ERR_INVALID_SCHEDULE = 5,
    CSMA_ERR_INVALID_WEIGHT = 6,
    CSMA_ERR_INVALID_RATE = 7,
    CSMA_ERR_NOT_IRREDUCIBLE = 8,
    CSMA_ERR_NUMERICAL_FAILURE = 9,
    CSMA_ERR_INVARIANT_VIOLATION = 10,
    CSMA_ERR_INSUFFICIENT_DATA = 11,
    CSMA_ERR_IO = 12,
    CSMA_ERR_INTERNAL = 13
} csma_status;

typedef struct csma_graph csma_graph;
typedef struct csma_config csma_config;
typedef struct csma_trace csma_trace;

CSMA_API const char *csma_version(void);
CSMA_API const char *csma_status_name(csma_status status);
/* Message for the most recent failure on this thread ("" if none). */
CSMA_API const char *csma_last_error(void);
CSMA_API void csma_string_free(char *s);

/* Graphs */
CSMA_API csma_status csma_graph_create(size_t n, csma_graph **out);
CSMA_API csma_status csma_graph_load(const char *path, csma_graph **out);
CSMA_API void csma_graph_free(csma_graph *g);
CSMA_API csma_status csma_graph_add_edge(csma_graph *g, int i, int j);
CSMA_API size_t csma_graph_node_count(const csma_graph *g);
CSMA_API size_t csma_graph_edge_count(const csma_graph *g);
/* Writes min(count, capacity) masks ascending; *count gets the total. */
CSMA_API csma_status csma_graph_independent_sets(const csma_graph *g, uint32_t *masks,
                                                 size_t capacity, size_t *count);
CSMA_API csma_status csma_graph_capacity_margin(const csma_graph *g, const double *lambda,
                                                size_t len, double *t_star, int *interior);

/* Configs */
CSMA_API csma_status csma_config_load(const char *path, csma_config **out);
CSMA_API csma_status csma_config_parse(const char *json_text, csma_config **out);
CSMA_API csma_status csma_config_clone(const csma_config *cfg, csma_config **out);
CSMA_API void csma_config_free(csma_config *cfg);
CSMA_API csma_status csma_config_set_seed(csma_config *cfg, uint64_t seed);
/* Multiplies every arrival rate by `factor`; fails if a rate leaves [0, 1]. */
CSMA_API csma_status csma_config_scale_lambda(csma_config *cfg, double factor);
CSMA_API csma_status csma_config_to_json(const csma_config *cfg, char **out);
CSMA_API size_t csma_config_sweep_scale_count(const csma_config *cfg);
CSMA_API double csma_config_sweep_scale(const csma_config *cfg, size_t k);
CSMA_API size_t csma_config_sweep_seed_count(const csma_config *cfg);
CSMA_API uint64_t csma_config_sweep_seed(const csma_config *cfg, size_t k);
CSMA_API csma_status csma_manifest_json(const csma_config *cfg, const char *command,
                                        char **out);

/* Simulation */
CSMA_API csma_status csma_simulate(const csma_config *cfg, csma_trace **out);
CSMA_API void csma_trace_free(csma_trace *t);
CSMA_API csma_status csma_trace_write_csv(const csma_trace *t, const char *path);
/* Summary JSON; includes the stability verdict when enough rows were sampled. */
CSMA_API csma_status csma_trace_summary_json(const csma_trace *t, char **out);
CSMA_API csma_status csma_trace_stability(const csma_trace *t, double threshold,
                                          int *stable, double *slope);
CSMA_API uint64_t csma_trace_final_qmax(const csma_trace *t);

/* Exact analysis */
/* Writes P.csv, Q.csv, stationary.csv, analysis.json into out_dir. */
CSMA_API csma_status csma_analyze(const csma_config *cfg, const char *out_dir,
                                  char **analysis_json);
/* *all_pass is 1 when every inequality holds; the report is still returned
 * when some fail. `failed_names` (may be NULL) receives the failing check
 * names separated by '\n'. */
CSMA_API csma_status csma_verify(const csma_config *cfg, char **report_json,
                                 char **failed_names, int *all_pass);
CSMA_API csma_status csma_capacity(const csma_config *cfg, char **json);
/* t_star is +inf (and *unbounded = 1) when every rate is zero. */
CSMA_API csma_status csma_config_capacity_margin(const csma_config *cfg, double *t_star,
                                                 int *interior, int *unbounded);

#ifdef __cplusplus
}
#endif

#endif /* CSMA_CSMA_H */
