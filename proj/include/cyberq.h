/* cyberq — C API for the attack-simulation RL workbench.
 *
 * All functions return CQ_OK on success; on failure they return an error
 * code and leave a human-readable message in cq_last_error() (thread-local).
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with cq_string_free().
 */
#ifndef CYBERQ_H
#define CYBERQ_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cq_status {
  CQ_OK = 0,
  CQ_ERROR_INVALID_ARGUMENT = 1,
  CQ_ERROR_SCHEMA = 2,     /* malformed document */
  CQ_ERROR_VALIDATION = 3, /* violated scenario invariant */
  CQ_ERROR_FORMAT = 4,     /* malformed q-table or metrics file */
  CQ_ERROR_INTERNAL = 5,
} cq_status;

const char* cq_version(void);
const char* cq_last_error(void);
void cq_string_free(char* s);

/* ---- scenarios ---------------------------------------------------------- */

typedef struct cq_scenario cq_scenario;

/* variant: "fixed" | "random-start" | "random-start-random-target" */
cq_status cq_scenario_default(const char* variant, cq_scenario** out);
cq_status cq_scenario_from_json(const char* json, cq_scenario** out);
cq_status cq_scenario_to_json(const cq_scenario* scenario, char** json_out);

/* One violation per line; empty string when the scenario is clean. Lines
 * prefixed "SOLVABILITY:" are warnings. */
cq_status cq_scenario_validate(const cq_scenario* scenario, char** report_out);
void cq_scenario_free(cq_scenario* scenario);

/* ---- training & evaluation ---------------------------------------------- */

typedef struct cq_train_options {
  const char* agent; /* "random" | "q" | "naive-q" | "double-q" */
  long episodes;
  double alpha;
  double gamma;
  double epsilon_start;
  double epsilon_end;
  unsigned long long seed;
  int record_trajectories; /* nonzero: fill trajectories_out in cq_train */
} cq_train_options;

/* Fills the per-agent training defaults for the named agent kind. */
cq_status cq_train_options_default(const char* agent, cq_train_options* out);

typedef void (*cq_progress_fn)(long episode, long total, void* user);

/* Runs a full training run. Any of the out-parameters may be NULL to skip
 * that artifact. metrics_csv: one row per episode. summary_json: aggregate
 * rates with provenance. qtable_json: the learned tables. trajectories_jsonl:
 * one JSON line per step (only when record_trajectories is set). */
cq_status cq_train(const cq_scenario* scenario, const cq_train_options* options,
                   cq_progress_fn progress, void* progress_user,
                   char** metrics_csv, char** summary_json, char** qtable_json,
                   char** trajectories_jsonl);

/* Greedy (epsilon-override) evaluation of a serialized q-table; no learning. */
cq_status cq_evaluate(const cq_scenario* scenario, const char* qtable_json,
                      long episodes, double epsilon,
                      unsigned long long seed, char** summary_json);

/* Sliding-window learning curve from a metrics CSV document. */
cq_status cq_rolling_curve(const char* metrics_csv, long window,
                           char** curve_csv);

#ifdef __cplusplus
}
#endif

#endif /* CYBERQ_H */
