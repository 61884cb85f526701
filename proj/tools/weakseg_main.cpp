// Command-line front end. Talks to the library only through weakseg.h.
#include <weakseg/weakseg.h>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

const std::vector<std::string> kCommands{"ingest", "train", "generate-labels", "infer", "eval", "report", "overlay"};

struct ConfigDeleter {
  void operator()(ws_config* c) const { ws_config_free(c); }
};
using ConfigPtr = std::unique_ptr<ws_config, ConfigDeleter>;

struct CommandError {
  int code;
};

int exit_code(ws_status status) {
  if (status == WS_OK) return 0;
  return status == WS_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
}

void check(ws_status status, const std::string& context) {
  if (status == WS_OK) return;
  std::cerr << "weakseg: " << context << ": " << ws_last_error() << "\n";
  throw CommandError{exit_code(status)};
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string closest_command(const std::string& word) {
  std::string best;
  std::size_t best_d = 4;
  for (const auto& c : kCommands) {
    std::size_t d = edit_distance(word, c);
    if (c.rfind(word, 0) == 0) d = 0;
    if (d < best_d) best_d = d, best = c;
  }
  return best;
}

// Options shared by the commands that need an experiment configuration.
struct ConfigOptions {
  std::string path;
  std::vector<std::string> sets;
  std::vector<std::string> datasets;
  std::string stages;
  std::string network;
  long long seed = -1;
  int workers = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", path, "experiment configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--set", sets, "override a configuration key (key=value), repeatable");
    cmd->add_option("--dataset", datasets, "register a dataset manifest (id=path), repeatable");
    cmd->add_option("--stages", stages, "training schedule, e.g. synth:200k,coco_ts+mlt_s:100k");
    cmd->add_option("--network", network, "psp_baseline, psp_double_decoder or smanet");
    cmd->add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);
    cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  }

  ConfigPtr build() const {
    ws_config* raw = nullptr;
    if (path.empty()) {
      check(ws_config_new(&raw), "config");
    } else {
      check(ws_config_load(path.c_str(), &raw), "config");
    }
    ConfigPtr config(raw);
    auto set = [&](const std::string& key, const std::string& value) {
      check(ws_config_set(config.get(), key.c_str(), value.c_str()), "--set " + key);
    };
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::cerr << "weakseg: --set expects key=value, got '" << kv << "'\n";
        throw CommandError{kExitUsage};
      }
      set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& kv : datasets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::cerr << "weakseg: --dataset expects id=path, got '" << kv << "'\n";
        throw CommandError{kExitUsage};
      }
      set("dataset." + kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!stages.empty()) set("stages", stages);
    if (!network.empty()) set("network.variant", network);
    if (seed >= 0) set("seed", std::to_string(seed));
    if (workers > 0) set("workers", std::to_string(workers));
    check(ws_config_validate(config.get()), "config");
    return config;
  }
};

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly supervised scene text segmentation"};
  app.set_version_flag("--version", std::string(ws_version()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string log_level = "info";
  app.add_option("--log-level", log_level, "debug, info, warn, error or off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));

  // ingest
  auto* ingest = app.add_subcommand("ingest", "convert a dataset's annotations into a manifest");
  std::string in_format, in_source, in_images, in_split, in_filter = "none", in_out;
  ingest->add_option("--format", in_format, "cocotext, mlt, icdar2013, totaltext or synthetic")
      ->required()
      ->check(CLI::IsMember({"cocotext", "mlt", "icdar2013", "totaltext", "synthetic"}));
  ingest->add_option("--source", in_source, "annotation file, ground-truth directory or dataset root")->required();
  ingest->add_option("--images", in_images, "image directory (cocotext and mlt)");
  ingest->add_option("--split", in_split, "train, val, test or all");
  ingest->add_option("--filter", in_filter, "qualifying keeps images with a legible Latin box")
      ->check(CLI::IsMember({"none", "qualifying"}));
  ingest->add_option("-o,--out", in_out, "manifest to write")->required();

  // train
  auto* train = app.add_subcommand("train", "train the box model (bgfg) or the segmentation network (seg)");
  ConfigOptions train_cfg;
  train_cfg.attach(train);
  std::string tr_task = "seg", tr_out;
  train->add_option("--task", tr_task, "bgfg or seg")->check(CLI::IsMember({"bgfg", "seg"}));
  train->add_option("-o,--out", tr_out, "run directory")->required();

  // generate-labels
  auto* gen = app.add_subcommand("generate-labels", "write weak pixel labels from word boxes");
  ConfigOptions gen_cfg;
  gen_cfg.attach(gen);
  std::string gl_model, gl_manifest, gl_split, gl_out, gl_name;
  gen->add_option("--model", gl_model, "background-foreground checkpoint")->required()->check(CLI::ExistingFile);
  gen->add_option("--manifest", gl_manifest, "box-annotated manifest")->required()->check(CLI::ExistingFile);
  gen->add_option("--split", gl_split, "restrict to one split");
  gen->add_option("-o,--out", gl_out, "output directory")->required();
  gen->add_option("--name", gl_name, "dataset name recorded in the manifest");

  // infer
  auto* inf = app.add_subcommand("infer", "predict text masks for a directory of images");
  ConfigOptions inf_cfg;
  inf_cfg.attach(inf);
  std::string if_model, if_images, if_out;
  inf->add_option("--model", if_model, "segmentation checkpoint")->required()->check(CLI::ExistingFile);
  inf->add_option("--images", if_images, "image directory")->required()->check(CLI::ExistingDirectory);
  inf->add_option("-o,--out", if_out, "output directory")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "pixel-level precision, recall and F1 against ground truth");
  std::string ev_pred, ev_gt, ev_enc = "auto", ev_report;
  bool ev_per_image = false;
  ev->add_option("--pred", ev_pred, "prediction directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--gt", ev_gt, "ground-truth directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--gt-encoding", ev_enc, "auto, labelmap, nonzero or nonwhite")
      ->check(CLI::IsMember({"auto", "labelmap", "nonzero", "nonwhite"}));
  ev->add_flag("--per-image", ev_per_image, "also report per-image scores");
  ev->add_option("--report", ev_report, "write a text report (and a .jsonl sibling)");

  // report
  auto* rep = app.add_subcommand("report", "run an experiment matrix and print the results tables");
  std::string rp_matrix, rp_out;
  bool rp_no_train = false;
  rep->add_option("--matrix", rp_matrix, "matrix file with [setup NAME] sections")->required()->check(CLI::ExistingFile);
  rep->add_option("-o,--out", rp_out, "report file (a .jsonl sibling is written too)")->required();
  rep->add_flag("--no-train", rp_no_train, "mark setups without a model unavailable instead of training them");

  // overlay
  auto* ov = app.add_subcommand("overlay", "side-by-side panels of image, prediction and ground truth");
  std::string ov_images, ov_pred, ov_gt, ov_enc = "auto", ov_out;
  ov->add_option("--images", ov_images, "image directory")->required()->check(CLI::ExistingDirectory);
  ov->add_option("--pred", ov_pred, "prediction directory")->required()->check(CLI::ExistingDirectory);
  ov->add_option("--gt", ov_gt, "ground-truth directory")->required()->check(CLI::ExistingDirectory);
  ov->add_option("--gt-encoding", ov_enc, "auto, labelmap, nonzero or nonwhite")
      ->check(CLI::IsMember({"auto", "labelmap", "nonzero", "nonwhite"}));
  ov->add_option("-o,--out", ov_out, "output directory")->required();

  if (argc > 1 && argv[1][0] != '-' &&
      std::find(kCommands.begin(), kCommands.end(), argv[1]) == kCommands.end()) {
    std::cerr << "weakseg: unknown subcommand '" << argv[1] << "'";
    const std::string hint = closest_command(argv[1]);
    if (!hint.empty()) std::cerr << "; did you mean '" << hint << "'?";
    std::cerr << "\nRun 'weakseg --help' for the list of subcommands.\n";
    return kExitUsage;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const char* levels[] = {"debug", "info", "warn", "error", "off"};
  for (int i = 0; i < 5; ++i)
    if (log_level == levels[i]) ws_set_log_level(static_cast<ws_log_level>(i));

  try {
    if (*ingest) {
      std::size_t n = 0;
      check(ws_ingest(in_format.c_str(), in_source.c_str(), opt(in_images), opt(in_split), in_filter.c_str(),
                      in_out.c_str(), &n),
            "ingest");
      std::printf("%zu records -> %s\n", n, in_out.c_str());
    } else if (*train) {
      ConfigPtr config = train_cfg.build();
      ws_train_summary s{};
      check(ws_train(config.get(), tr_task.c_str(), tr_out.c_str(), &s), "train");
      std::printf("trained %lld steps, final loss %.6f", static_cast<long long>(s.steps), s.final_loss);
      if (s.has_heldout_f1) std::printf(", held-out F1 %.4f", s.heldout_f1);
      std::printf("\nmodel: %s/model.ckpt\n", tr_out.c_str());
    } else if (*gen) {
      ConfigPtr config = gen_cfg.build();
      ws_label_summary s{};
      check(ws_generate_labels(config.get(), gl_model.c_str(), gl_manifest.c_str(), opt(gl_split), gl_out.c_str(),
                               opt(gl_name), &s),
            "generate-labels");
      std::printf("%zu label maps, %zu failures -> %s/manifest.jsonl\n", s.generated, s.failed, gl_out.c_str());
    } else if (*inf) {
      ConfigPtr config = inf_cfg.build();
      std::size_t n = 0;
      check(ws_infer(config.get(), if_model.c_str(), if_images.c_str(), if_out.c_str(), &n), "infer");
      std::printf("%zu images -> %s\n", n, if_out.c_str());
    } else if (*ev) {
      ws_metrics m{};
      check(ws_eval(ev_pred.c_str(), ev_gt.c_str(), ev_enc.c_str(), ev_per_image, opt(ev_report), &m), "eval");
      std::printf("images     %zu\nprecision  %.2f%%\nrecall     %.2f%%\nF1 score   %.2f%%\n", m.images,
                  100 * m.precision, 100 * m.recall, 100 * m.f1);
      if (ev_per_image)
        std::printf("per-image mean: precision %.2f%%, recall %.2f%%, F1 %.2f%%\n", 100 * m.image_precision,
                    100 * m.image_recall, 100 * m.image_f1);
    } else if (*rep) {
      ws_matrix_summary s{};
      check(ws_report(rp_matrix.c_str(), rp_out.c_str(), !rp_no_train, &s), "report");
      std::printf("%zu rows (%zu unavailable) -> %s\n", s.rows, s.unavailable, rp_out.c_str());
    } else if (*ov) {
      std::size_t n = 0;
      check(ws_overlay(ov_images.c_str(), ov_pred.c_str(), ov_gt.c_str(), ov_enc.c_str(), ov_out.c_str(), &n),
            "overlay");
      std::printf("%zu panels -> %s\n", n, ov_out.c_str());
    }
  } catch (const CommandError& e) {
    return e.code;
  }
  return 0;
}
