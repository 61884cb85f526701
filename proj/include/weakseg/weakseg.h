#ifndef WEAKSEG_WEAKSEG_H
#define WEAKSEG_WEAKSEG_H

/* C interface to the weakseg library. Every function returns a ws_status;
 * on failure ws_last_error() describes the problem (per thread, valid until
 * the next call on that thread). Handles are opaque and freed by their
 * matching *_free function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WS_API __declspec(dllexport)
#else
#define WS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ws_status {
  WS_OK = 0,
  WS_ERR_INVALID_ARGUMENT = 1,
  WS_ERR_IO = 2,
  WS_ERR_FORMAT = 3,
  WS_ERR_RUNTIME = 4,
  WS_ERR_DIVERGED = 5,
  WS_ERR_INTERNAL = 6
} ws_status;

typedef enum ws_log_level {
  WS_LOG_DEBUG = 0,
  WS_LOG_INFO = 1,
  WS_LOG_WARN = 2,
  WS_LOG_ERROR = 3,
  WS_LOG_OFF = 4
} ws_log_level;

typedef struct ws_config ws_config;
typedef struct ws_model ws_model;

typedef struct ws_metrics {
  uint64_t tp, fp, fn, tn;
  double precision, recall, f1;
  /* means over images; filled when per-image scoring was requested */
  double image_precision, image_recall, image_f1;
  size_t images;
} ws_metrics;

typedef struct ws_train_summary {
  int64_t steps;
  double final_loss;
  int has_heldout_f1;
  double heldout_f1;
} ws_train_summary;

typedef struct ws_label_summary {
  size_t generated;
  size_t failed;
} ws_label_summary;

typedef struct ws_matrix_summary {
  size_t rows;
  size_t unavailable;
} ws_matrix_summary;

WS_API const char* ws_version(void);
WS_API const char* ws_last_error(void);
WS_API const char* ws_status_name(ws_status status);
WS_API void ws_set_log_level(ws_log_level level);

/* Configuration. ws_config_new gives the defaults. */
WS_API ws_status ws_config_new(ws_config** out);
WS_API ws_status ws_config_load(const char* path, ws_config** out);
WS_API void ws_config_free(ws_config* config);
/* Sets one key from its text form; unknown keys are rejected. */
WS_API ws_status ws_config_set(ws_config* config, const char* key, const char* value);
WS_API ws_status ws_config_validate(const ws_config* config);
/* Text getters copy at most `capacity` bytes including the terminator and
 * report the full length (without terminator) in *length when non-null. */
WS_API ws_status ws_config_get(const ws_config* config, const char* key, char* buffer, size_t capacity,
                               size_t* length);
WS_API ws_status ws_config_serialize(const ws_config* config, char* buffer, size_t capacity, size_t* length);
WS_API ws_status ws_config_digest(const ws_config* config, char* buffer, size_t capacity);
/* All keys, newline separated. */
WS_API ws_status ws_config_keys(char* buffer, size_t capacity, size_t* length);

/* Dataset ingestion into a manifest (JSON lines).
 * format: cocotext | mlt | icdar2013 | totaltext | synthetic
 * source: annotation file (cocotext), ground-truth directory (mlt) or
 *         dataset root (pixel ground-truth formats)
 * images: image directory (cocotext, mlt); ignored otherwise
 * split:  train | val | test, or NULL for all (mlt requires one)
 * filter: "qualifying" keeps images with at least one legible
 *         machine-printed Latin box; NULL or "none" keeps everything */
WS_API ws_status ws_ingest(const char* format, const char* source, const char* images, const char* split,
                           const char* filter, const char* out_manifest, size_t* records);

/* task: "bgfg" or "seg". Writes out_dir/model.ckpt and a run manifest. */
WS_API ws_status ws_train(const ws_config* config, const char* task, const char* out_dir,
                          ws_train_summary* summary);

WS_API ws_status ws_generate_labels(const ws_config* config, const char* model, const char* manifest,
                                    const char* split, const char* out_dir, const char* name,
                                    ws_label_summary* summary);

/* Writes <stem>.png masks and <stem>_prob.png 16-bit probability maps. */
WS_API ws_status ws_infer(const ws_config* config, const char* model, const char* images_dir,
                          const char* out_dir, size_t* images);

/* gt_encoding: labelmap | nonzero | nonwhite, or NULL to detect. */
WS_API ws_status ws_eval(const char* pred_dir, const char* gt_dir, const char* gt_encoding, int per_image,
                         const char* report_path, ws_metrics* metrics);

/* Runs every [setup] of a matrix file and writes the table to report_path
 * (plus a .jsonl sibling). */
WS_API ws_status ws_report(const char* matrix_path, const char* report_path, int train_missing,
                           ws_matrix_summary* summary);

WS_API ws_status ws_overlay(const char* images_dir, const char* pred_dir, const char* gt_dir,
                            const char* gt_encoding, const char* out_dir, size_t* panels);

/* Direct model use. */
WS_API ws_status ws_model_load(const char* checkpoint, ws_model** out);
WS_API void ws_model_free(ws_model* model);
/* rgb: width * height * 3 bytes; probability: width * height doubles.
 * config supplies the inference policy; NULL uses the defaults. */
WS_API ws_status ws_model_predict(ws_model* model, const ws_config* config, const uint8_t* rgb, int width,
                                  int height, double* probability);

#ifdef __cplusplus
}
#endif

#endif
