#include "weakseg/weakseg.h"

#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "config/experiment.hpp"
#include "config/pipeline.hpp"
#include "core/error.hpp"
#include "core/log.hpp"
#include "eval/matrix.hpp"
#include "eval/report.hpp"
#include "infer/batch.hpp"
#include "ingest/loaders.hpp"
#include "ingest/manifest.hpp"
#include "smanet/checkpoint.hpp"

struct ws_config {
  weakseg::config::ExperimentConfig value;
};

struct ws_model {
  std::unique_ptr<weakseg::infer::ProbabilityModel> model;
};

namespace {

using namespace weakseg;
namespace fs = std::filesystem;

thread_local std::string g_error;

ws_status fail(ws_status status, const std::string& message) {
  g_error = message;
  return status;
}

template <typename F>
ws_status guarded(F&& body) {
  try {
    g_error.clear();
    body();
    return WS_OK;
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::kInvalidArgument: return fail(WS_ERR_INVALID_ARGUMENT, e.what());
      case ErrorKind::kIo: return fail(WS_ERR_IO, e.what());
      case ErrorKind::kFormat: return fail(WS_ERR_FORMAT, e.what());
      case ErrorKind::kRuntime: return fail(WS_ERR_RUNTIME, e.what());
      case ErrorKind::kDiverged: return fail(WS_ERR_DIVERGED, e.what());
    }
    return fail(WS_ERR_INTERNAL, e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(WS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(WS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WS_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (!p) throw invalid_argument(std::string(what) + " must not be null");
}

void copy_out(const std::string& text, char* buffer, size_t capacity, size_t* length) {
  if (length) *length = text.size();
  if (!buffer || capacity == 0) return;
  const size_t n = std::min(capacity - 1, text.size());
  std::memcpy(buffer, text.data(), n);
  buffer[n] = '\0';
}

std::optional<GtEncoding> encoding_arg(const char* text) {
  if (!text || !*text || std::string(text) == "auto") return std::nullopt;
  return gt_encoding_from_string(text);
}

std::optional<ingest::Split> split_arg(const char* text) {
  if (!text || !*text || std::string(text) == "all") return std::nullopt;
  return ingest::split_from_string(text);
}

const config::ExperimentConfig& config_or_default(const ws_config* c) {
  static const config::ExperimentConfig defaults;
  return c ? c->value : defaults;
}

}  // namespace

extern "C" {

const char* ws_version(void) { return WEAKSEG_VERSION; }

const char* ws_last_error(void) { return g_error.c_str(); }

const char* ws_status_name(ws_status status) {
  switch (status) {
    case WS_OK: return "ok";
    case WS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WS_ERR_IO: return "i/o error";
    case WS_ERR_FORMAT: return "format error";
    case WS_ERR_RUNTIME: return "runtime error";
    case WS_ERR_DIVERGED: return "training diverged";
    case WS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void ws_set_log_level(ws_log_level level) { log::set_level(static_cast<log::Level>(level)); }

ws_status ws_config_new(ws_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ws_config{};
  });
}

ws_status ws_config_load(const char* path, ws_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto c = std::make_unique<ws_config>(ws_config{config::load_config(path)});
    *out = c.release();
  });
}

void ws_config_free(ws_config* config) { delete config; }

ws_status ws_config_set(ws_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    config->value.set(key, value);
  });
}

ws_status ws_config_validate(const ws_config* config) {
  return guarded([&] {
    require(config, "config");
    config->value.validate();
  });
}

ws_status ws_config_get(const ws_config* config, const char* key, char* buffer, size_t capacity, size_t* length) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    copy_out(config->value.get(key), buffer, capacity, length);
  });
}

ws_status ws_config_serialize(const ws_config* config, char* buffer, size_t capacity, size_t* length) {
  return guarded([&] {
    require(config, "config");
    copy_out(config->value.serialize(), buffer, capacity, length);
  });
}

ws_status ws_config_digest(const ws_config* config, char* buffer, size_t capacity) {
  return guarded([&] {
    require(config, "config");
    require(buffer, "buffer");
    if (capacity < 17) throw invalid_argument("digest buffer needs 17 bytes");
    copy_out(config->value.digest(), buffer, capacity, nullptr);
  });
}

ws_status ws_config_keys(char* buffer, size_t capacity, size_t* length) {
  return guarded([&] {
    std::string text;
    for (const auto& k : config::config_keys()) text += k + "\n";
    text += "dataset.<id>\n";
    copy_out(text, buffer, capacity, length);
  });
}

ws_status ws_ingest(const char* format, const char* source, const char* images, const char* split,
                    const char* filter, const char* out_manifest, size_t* records) {
  return guarded([&] {
    require(format, "format");
    require(source, "source");
    require(out_manifest, "out_manifest");
    const std::string f = format;
    const auto only = split_arg(split);
    ingest::DatasetManifest m;
    if (f == "cocotext") {
      require(images, "images");
      m = ingest::load_cocotext(source, images, only);
    } else if (f == "mlt") {
      require(images, "images");
      if (!only) throw invalid_argument("mlt ingestion needs --split");
      m = ingest::load_mlt(source, images, *only);
    } else {
      m = ingest::load_pixel_gt_dataset(ingest::pixel_gt_kind_from_string(f), source);
      if (only) std::erase_if(m.records, [&](const ingest::SampleRecord& r) { return r.split != *only; });
    }
    const std::string filt = filter ? filter : "none";
    if (filt == "qualifying") {
      m = ingest::select_images(m, is_qualifying, "legible_machine_printed_latin");
    } else if (filt != "none" && !filt.empty()) {
      throw invalid_argument("unknown filter '" + filt + "' (qualifying or none)");
    }
    ingest::write_manifest(out_manifest, m);
    log::info("wrote ", m.records.size(), " records to ", out_manifest);
    if (records) *records = m.records.size();
  });
}

ws_status ws_train(const ws_config* config, const char* task, const char* out_dir, ws_train_summary* summary) {
  return guarded([&] {
    require(config, "config");
    require(task, "task");
    require(out_dir, "out_dir");
    const std::string t = task;
    pipeline::TrainOutcome outcome;
    if (t == "bgfg") {
      outcome = pipeline::train_bgfg(config->value, out_dir);
    } else if (t == "seg") {
      outcome = pipeline::train_segmentation(config->value, out_dir);
    } else {
      throw invalid_argument("unknown task '" + t + "' (bgfg or seg)");
    }
    if (summary) {
      summary->steps = static_cast<int64_t>(outcome.result.losses.size());
      summary->final_loss = outcome.result.losses.empty() ? 0.0 : outcome.result.losses.back();
      summary->has_heldout_f1 = outcome.result.heldout_f1.has_value();
      summary->heldout_f1 = outcome.result.heldout_f1.value_or(0.0);
    }
  });
}

ws_status ws_generate_labels(const ws_config* config, const char* model, const char* manifest, const char* split,
                             const char* out_dir, const char* name, ws_label_summary* summary) {
  return guarded([&] {
    require(model, "model");
    require(manifest, "manifest");
    require(out_dir, "out_dir");
    const std::string n = name && *name ? name : fs::path(out_dir).filename().string();
    const auto g = pipeline::generate_labels(config_or_default(config), model, manifest, split_arg(split), out_dir, n);
    if (summary) {
      summary->generated = g.labels.size();
      summary->failed = g.failures.size();
    }
  });
}

ws_status ws_infer(const ws_config* config, const char* model, const char* images_dir, const char* out_dir,
                   size_t* images) {
  return guarded([&] {
    require(model, "model");
    require(images_dir, "images_dir");
    require(out_dir, "out_dir");
    const auto out = pipeline::infer_images(config_or_default(config), model, images_dir, out_dir);
    if (images) *images = out.size();
  });
}

ws_status ws_eval(const char* pred_dir, const char* gt_dir, const char* gt_encoding, int per_image,
                  const char* report_path, ws_metrics* metrics) {
  return guarded([&] {
    require(pred_dir, "pred_dir");
    require(gt_dir, "gt_dir");
    const eval::EvalResult r = eval::evaluate_directory(pred_dir, gt_dir, encoding_arg(gt_encoding));
    if (report_path && *report_path) eval::write_eval_report(report_path, r, per_image != 0);
    if (metrics) {
      *metrics = ws_metrics{r.counts.tp, r.counts.fp, r.counts.fn, r.counts.tn, r.metrics.precision,
                            r.metrics.recall, r.metrics.f1, 0, 0, 0, r.images.size()};
      if (per_image) {
        metrics->image_precision = r.per_image_mean.precision;
        metrics->image_recall = r.per_image_mean.recall;
        metrics->image_f1 = r.per_image_mean.f1;
      }
    }
  });
}

ws_status ws_report(const char* matrix_path, const char* report_path, int train_missing, ws_matrix_summary* summary) {
  return guarded([&] {
    require(matrix_path, "matrix_path");
    require(report_path, "report_path");
    const auto configs = config::load_matrix(matrix_path);
    const auto rows = eval::run_experiment_matrix(configs, {train_missing != 0});
    eval::write_report(report_path, rows);
    if (summary) {
      summary->rows = rows.size();
      summary->unavailable = 0;
      for (const auto& r : rows) summary->unavailable += r.available ? 0 : 1;
    }
  });
}

ws_status ws_overlay(const char* images_dir, const char* pred_dir, const char* gt_dir, const char* gt_encoding,
                     const char* out_dir, size_t* panels) {
  return guarded([&] {
    require(images_dir, "images_dir");
    require(pred_dir, "pred_dir");
    require(gt_dir, "gt_dir");
    require(out_dir, "out_dir");
    const auto files =
        eval::emit_overlays(infer::list_images(images_dir), pred_dir, gt_dir, out_dir, encoding_arg(gt_encoding));
    if (panels) *panels = files.size();
  });
}

ws_status ws_model_load(const char* checkpoint, ws_model** out) {
  return guarded([&] {
    require(checkpoint, "checkpoint");
    require(out, "out");
    *out = nullptr;
    auto m = std::make_unique<ws_model>();
    m->model = pipeline::checkpoint_model_factory(checkpoint)();
    *out = m.release();
  });
}

void ws_model_free(ws_model* model) { delete model; }

ws_status ws_model_predict(ws_model* model, const ws_config* config, const uint8_t* rgb, int width, int height,
                           double* probability) {
  return guarded([&] {
    require(model, "model");
    require(rgb, "rgb");
    require(probability, "probability");
    if (width <= 0 || height <= 0) throw invalid_argument("image size must be positive");
    RgbImage image(width, height);
    std::memcpy(image.pixels.data(), rgb, image.pixels.size());
    const Plane p = infer::sliding_window_predict(*model->model, image, config_or_default(config).inference);
    std::copy(p.data().begin(), p.data().end(), probability);
  });
}

}  // extern "C"
