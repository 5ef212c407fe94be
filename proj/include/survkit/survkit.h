/* survkit: survival-ranking toolkit: pairwise concordance losses, a
 * dual-branch risk model, deterministic training and an experiment runner.
 *
 * C API over the shared library. All objects are opaque handles owned by the
 * library; every function that can fail returns an svk_status and leaves a
 * message retrievable through svk_last_error() (thread-local). Out-pointers
 * are written only on SVK_OK.
 */
#ifndef SURVKIT_H
#define SURVKIT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum svk_status {
  SVK_OK = 0,
  SVK_ERROR_CONFIG = 1, /* invalid configuration or usage */
  SVK_ERROR_RUNTIME = 2 /* data or runtime failure */
} svk_status;

/* Library version, e.g. "0.1.0". Static storage, do not free. */
const char* svk_version(void);

/* Message from the most recent failing call on this thread. Never NULL. */
const char* svk_last_error(void);

typedef struct svk_config svk_config;
typedef struct svk_dataset svk_dataset;
typedef struct svk_model svk_model;

/* ------------------------------------------------------------------ */
/* Experiment configuration: flat `key = value` text, '#' comments.    */

svk_status svk_config_read(const char* path, svk_config** out);
svk_status svk_config_parse(const char* text, svk_config** out);
/* Overrides one key (e.g. seed.data). Validated when a command runs. */
svk_status svk_config_set(svk_config* cfg, const char* key, const char* value);
/* Returns the raw value or NULL when the key is absent. */
const char* svk_config_get(const svk_config* cfg, const char* key);
void svk_config_free(svk_config* cfg);

/* ------------------------------------------------------------------ */
/* Datasets.                                                           */

svk_status svk_dataset_generate(const svk_config* cfg, svk_dataset** out);
svk_status svk_dataset_read_csv(const char* path, svk_dataset** out);
svk_status svk_dataset_write_csv(const svk_dataset* ds, const char* path);
long svk_dataset_size(const svk_dataset* ds); /* -1 on NULL */
void svk_dataset_free(svk_dataset* ds);

/* ------------------------------------------------------------------ */
/* Models.                                                             */

svk_status svk_model_read(const char* path, svk_model** out);
svk_status svk_model_write(const svk_model* model, const char* path);
/* risks_out must hold svk_dataset_size(ds) doubles. */
svk_status svk_model_predict(const svk_model* model, const svk_dataset* ds, double* risks_out);
void svk_model_free(svk_model* model);

/* ------------------------------------------------------------------ */
/* Metrics over explicit risk vectors.                                 */

svk_status svk_concordance_index(const svk_dataset* ds, const double* risks, size_t n,
                                 double* out_ci);
svk_status svk_time_dependent_auc(const svk_dataset* ds, const double* risks, size_t n,
                                  double horizon, double* out_auc);

/* ------------------------------------------------------------------ */
/* Experiment commands. Results are written as files under out_dir;    */
/* reruns with an identical config produce byte-identical outputs.     */

svk_status svk_cmd_generate(const svk_config* cfg, const char* out_dir);
svk_status svk_cmd_train(const svk_config* cfg, const char* out_dir);
/* dataset_csv may be NULL: the config's test split is evaluated. */
svk_status svk_cmd_eval(const svk_config* cfg, const char* checkpoint, const char* dataset_csv,
                        const char* out_dir);
svk_status svk_cmd_sweep_tau(const svk_config* cfg, const char* out_dir);
svk_status svk_cmd_sweep_fusion(const svk_config* cfg, const char* out_dir);
svk_status svk_cmd_stability(const svk_config* cfg, const char* out_dir);
svk_status svk_cmd_compare(const svk_config* cfg, const char* checkpoint_1,
                           const char* checkpoint_2, const char* dataset_csv, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* SURVKIT_H */
