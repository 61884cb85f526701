// Exercises the shared library through its public header only.
#include <weakseg/weakseg.h>

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Config {
  ws_config* c = nullptr;
  Config() { REQUIRE(ws_config_new(&c) == WS_OK); }
  ~Config() { ws_config_free(c); }
};

std::string get(const ws_config* c, const char* key) {
  size_t n = 0;
  REQUIRE(ws_config_get(c, key, nullptr, 0, &n) == WS_OK);
  std::string s(n + 1, '\0');
  REQUIRE(ws_config_get(c, key, s.data(), s.size(), nullptr) == WS_OK);
  s.resize(n);
  return s;
}

fs::path scratch(const char* name) {
  const fs::path p = fs::temp_directory_path() / ("weakseg_capi_" + std::string(name));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const fs::path kFixture = WEAKSEG_FIXTURE_DIR;

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(ws_version()).size() > 0);
  CHECK(std::string(ws_status_name(WS_OK)) == "ok");
  CHECK(std::string(ws_status_name(WS_ERR_DIVERGED)) == "training diverged");
}

TEST_CASE("config keys, values and errors") {
  Config cfg;
  CHECK(ws_config_set(cfg.c, "train.learning_rate", "0.002") == WS_OK);
  CHECK(get(cfg.c, "train.learning_rate") == "0.002");
  CHECK(ws_config_set(cfg.c, "network.variant", "psp_baseline") == WS_OK);
  CHECK(get(cfg.c, "network.variant") == "psp_baseline");

  CHECK(ws_config_set(cfg.c, "train.learnig_rate", "1") == WS_ERR_INVALID_ARGUMENT);
  CHECK(std::string(ws_last_error()).find("train.learnig_rate") != std::string::npos);
  CHECK(ws_config_set(cfg.c, "labels.th1", "0.9") == WS_OK);
  CHECK(ws_config_validate(cfg.c) == WS_ERR_INVALID_ARGUMENT);
  CHECK(ws_config_set(cfg.c, "labels.th1", "0.3") == WS_OK);
  CHECK(ws_config_validate(cfg.c) == WS_OK);
  CHECK(std::string(ws_last_error()).empty());

  char small[4];
  size_t n = 0;
  REQUIRE(ws_config_serialize(cfg.c, small, sizeof small, &n) == WS_OK);
  CHECK(n > sizeof small);
  CHECK(std::strlen(small) == 3);

  char digest[17];
  REQUIRE(ws_config_digest(cfg.c, digest, sizeof digest) == WS_OK);
  CHECK(std::strlen(digest) == 16);
  CHECK(ws_config_digest(cfg.c, small, sizeof small) == WS_ERR_INVALID_ARGUMENT);

  REQUIRE(ws_config_keys(nullptr, 0, &n) == WS_OK);
  std::string keys(n + 1, '\0');
  REQUIRE(ws_config_keys(keys.data(), keys.size(), nullptr) == WS_OK);
  CHECK(keys.find("labels.th2\n") != std::string::npos);
}

TEST_CASE("null handles and missing files are reported, not crashes") {
  CHECK(ws_config_set(nullptr, "seed", "1") == WS_ERR_INVALID_ARGUMENT);
  ws_config* c = nullptr;
  CHECK(ws_config_load("/nonexistent/exp.cfg", &c) == WS_ERR_IO);
  CHECK(c == nullptr);
  ws_model* m = nullptr;
  CHECK(ws_model_load("/nonexistent/model.ckpt", &m) == WS_ERR_IO);
  CHECK(m == nullptr);
  CHECK(ws_train(nullptr, "seg", "/tmp/x", nullptr) == WS_ERR_INVALID_ARGUMENT);
  ws_config_free(nullptr);
  ws_model_free(nullptr);
}

TEST_CASE("ingest and eval on the fixture") {
  const fs::path dir = scratch("ingest");
  size_t records = 0;
  REQUIRE(ws_ingest("synthetic", kFixture.c_str(), nullptr, nullptr, "qualifying", (dir / "all.jsonl").c_str(),
                    &records) == WS_OK);
  CHECK(records == 8);
  REQUIRE(ws_ingest("synthetic", kFixture.c_str(), nullptr, "test", nullptr, (dir / "test.jsonl").c_str(),
                    &records) == WS_OK);
  CHECK(records == 2);
  CHECK(ws_ingest("bogus", kFixture.c_str(), nullptr, nullptr, nullptr, (dir / "x.jsonl").c_str(), nullptr) ==
        WS_ERR_INVALID_ARGUMENT);

  const std::string masks = (kFixture / "test" / "masks").string();
  ws_metrics m{};
  REQUIRE(ws_eval(masks.c_str(), masks.c_str(), "nonzero", 1, (dir / "eval.txt").c_str(), &m) == WS_OK);
  CHECK(m.images == 2);
  CHECK(m.f1 == 1.0);
  CHECK(m.image_f1 == 1.0);
  CHECK(m.fp == 0);
  CHECK(fs::exists(dir / "eval.txt"));
}

TEST_CASE("train, load and predict through the handle API") {
  const fs::path dir = scratch("train");
  size_t records = 0;
  REQUIRE(ws_ingest("synthetic", kFixture.c_str(), nullptr, nullptr, nullptr, (dir / "mini.jsonl").c_str(),
                    &records) == WS_OK);
  Config cfg;
  const std::vector<std::pair<const char*, const char*>> sets{
      {"network.blocks", "1,1,1,1"}, {"network.base_width", "4"}, {"network.psp_bins", "1,2"},
      {"network.reduced_channels", "8"}, {"network.attention_channels", "8"}, {"network.branch_channels", "4"},
      {"network.attention_hidden", "4"}, {"network.skip_channels", "4,4"}, {"network.decoder_channels", "8,8"},
      {"bgfg.steps", "3"}, {"bgfg.crop_size", "32"}, {"bgfg.batch_size", "2"}, {"infer.window", "32"},
      {"infer.stride", "16"}, {"infer.scales", "1"}};
  for (const auto& [k, v] : sets) REQUIRE(ws_config_set(cfg.c, k, v) == WS_OK);
  const std::string manifest = (dir / "mini.jsonl").string();
  REQUIRE(ws_config_set(cfg.c, "dataset.synth", manifest.c_str()) == WS_OK);

  ws_train_summary s{};
  REQUIRE(ws_train(cfg.c, "bgfg", (dir / "bgfg").c_str(), &s) == WS_OK);
  CHECK(s.steps == 3);
  CHECK(s.has_heldout_f1 == 1);
  CHECK(ws_train(cfg.c, "segment", (dir / "x").c_str(), nullptr) == WS_ERR_INVALID_ARGUMENT);

  ws_model* model = nullptr;
  REQUIRE(ws_model_load((dir / "bgfg" / "model.ckpt").c_str(), &model) == WS_OK);
  const int w = 40, h = 24;
  std::vector<uint8_t> rgb(w * h * 3, 90);
  std::vector<double> prob(w * h, -1.0);
  REQUIRE(ws_model_predict(model, cfg.c, rgb.data(), w, h, prob.data()) == WS_OK);
  for (double p : prob) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  CHECK(ws_model_predict(model, cfg.c, rgb.data(), 0, h, prob.data()) == WS_ERR_INVALID_ARGUMENT);
  ws_model_free(model);
}
