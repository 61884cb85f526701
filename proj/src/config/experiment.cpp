#include "config/experiment.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "core/error.hpp"

namespace weakseg::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

Error bad_value(const std::string& key, const std::string& expected, const std::string& value) {
  return invalid_argument("config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

long long to_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const std::string t = trim(text);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) throw bad_value(key, "an integer", text);
  return v;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0;
  const std::string t = trim(text);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) throw bad_value(key, "a number", text);
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw bad_value(key, "true or false", text);
}

std::vector<int> to_ints(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) out.push_back(static_cast<int>(to_int(key, item)));
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}
std::string fmt(long long v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, std::string>) {
      out += values[i];
    } else if constexpr (std::is_integral_v<T>) {
      out += fmt(static_cast<long long>(values[i]));
    } else {
      out += fmt(values[i]);
    }
  }
  return out;
}

struct KeyDef {
  std::string name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string& key, const std::string&)> set;
};

#define WS_STRING(KEY, FIELD)                                              \
  KeyDef { KEY, [](const ExperimentConfig& c) { return c.FIELD; },        \
           [](ExperimentConfig& c, const std::string&, const std::string& v) { c.FIELD = trim(v); } }
#define WS_INT(KEY, FIELD)                                                                      \
  KeyDef { KEY, [](const ExperimentConfig& c) { return fmt(static_cast<long long>(c.FIELD)); }, \
           [](ExperimentConfig& c, const std::string& k, const std::string& v) {                \
             c.FIELD = static_cast<decltype(c.FIELD)>(to_int(k, v));                            \
           } }
#define WS_DOUBLE(KEY, FIELD)                                             \
  KeyDef { KEY, [](const ExperimentConfig& c) { return fmt(c.FIELD); },  \
           [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.FIELD = to_double(k, v); } }
#define WS_BOOL(KEY, FIELD)                                               \
  KeyDef { KEY, [](const ExperimentConfig& c) { return fmt(c.FIELD); },  \
           [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.FIELD = to_bool(k, v); } }
#define WS_INTS(KEY, FIELD)                                               \
  KeyDef { KEY, [](const ExperimentConfig& c) { return join(c.FIELD); }, \
           [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.FIELD = to_ints(k, v); } }
#define WS_DOUBLES(KEY, FIELD)                                            \
  KeyDef { KEY, [](const ExperimentConfig& c) { return join(c.FIELD); }, \
           [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.FIELD = to_doubles(k, v); } }

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      WS_STRING("name", name),
      WS_STRING("baseline", baseline),
      WS_STRING("block", block),
      WS_INT("seed", seed),
      WS_STRING("output_root", output_root),
      WS_STRING("data_root", data_root),
      WS_INT("workers", workers),
      KeyDef{"stages", [](const ExperimentConfig& c) { return format_stages(c.stages); },
             [](ExperimentConfig& c, const std::string& k, const std::string& v) {
               try {
                 c.stages = parse_stages(v);
               } catch (const Error& e) {
                 throw invalid_argument("config key '" + k + "': " + e.what());
               }
             }},
      KeyDef{"test_sets", [](const ExperimentConfig& c) { return join(c.test_sets); },
             [](ExperimentConfig& c, const std::string&, const std::string& v) { c.test_sets = split(v, ','); }},
      WS_BOOL("per_image", per_image),
      WS_STRING("checkpoint", checkpoint),
      WS_STRING("pretrained", pretrained),
      KeyDef{"network.variant", [](const ExperimentConfig& c) { return std::string(smanet::to_string(c.network.variant)); },
             [](ExperimentConfig& c, const std::string& k, const std::string& v) {
               try {
                 c.network.variant = smanet::variant_from_string(trim(v));
               } catch (const Error&) {
                 throw bad_value(k, "smanet, psp_double_decoder or psp_baseline", v);
               }
             }},
      WS_INT("network.output_stride", network.output_stride),
      WS_INTS("network.blocks", network.encoder.blocks),
      WS_INT("network.base_width", network.encoder.base_width),
      WS_INTS("network.attention_rates", network.attention_rates),
      WS_INTS("network.psp_bins", network.psp_bins),
      WS_INT("network.reduced_channels", network.reduced_channels),
      WS_INT("network.attention_channels", network.attention_channels),
      WS_INT("network.branch_channels", network.branch_channels),
      WS_INT("network.attention_hidden", network.attention_hidden),
      WS_INTS("network.skip_channels", network.skip_channels),
      WS_INTS("network.decoder_channels", network.decoder_channels),
      WS_INT("train.crop_size", train.crop_size),
      WS_DOUBLE("train.learning_rate", train.learning_rate),
      WS_DOUBLES("train.scales", train.scales),
      WS_INT("train.batch_size", train.batch_size),
      WS_INT("train.log_every", train.log_every),
      WS_STRING("bgfg.data", bgfg_data),
      WS_DOUBLE("bgfg.enlarge", bgfg_enlarge),
      WS_INT("bgfg.steps", bgfg.max_steps),
      WS_INT("bgfg.crop_size", bgfg.crop_size),
      WS_BOOL("bgfg.fit_min_side", bgfg.fit_min_side),
      WS_DOUBLE("bgfg.learning_rate", bgfg.learning_rate),
      WS_DOUBLES("bgfg.scales", bgfg.scales),
      WS_INT("bgfg.batch_size", bgfg.batch_size),
      WS_DOUBLE("bgfg.f1_floor", bgfg.f1_floor),
      WS_DOUBLE("labels.th1", labels.thresholds.th1),
      WS_DOUBLE("labels.th2", labels.thresholds.th2),
      WS_DOUBLE("labels.enlarge", labels.box.enlarge),
      WS_INT("labels.min_side", labels.box.min_side),
      WS_BOOL("labels.sliding_window", labels.box.sliding_window),
      WS_DOUBLES("labels.scales", labels.box.policy.scales),
      WS_INT("labels.window", labels.box.policy.window),
      WS_INT("labels.stride", labels.box.policy.stride),
      WS_DOUBLES("infer.scales", inference.scales),
      WS_INT("infer.window", inference.window),
      WS_INT("infer.stride", inference.stride),
      KeyDef{"infer.fusion", [](const ExperimentConfig& c) { return std::string(infer::to_string(c.inference.fusion)); },
             [](ExperimentConfig& c, const std::string& k, const std::string& v) {
               try {
                 c.inference.fusion = infer::fusion_from_string(trim(v));
               } catch (const Error&) {
                 throw bad_value(k, "mean or max", v);
               }
             }},
      WS_DOUBLE("infer.threshold", inference.threshold),
  };
  return table;
}

#undef WS_STRING
#undef WS_INT
#undef WS_DOUBLE
#undef WS_BOOL
#undef WS_INTS
#undef WS_DOUBLES

const KeyDef* find_key(const std::string& key) {
  for (const KeyDef& d : key_table())
    if (d.name == key) return &d;
  return nullptr;
}

const std::string kDatasetPrefix = "dataset.";

struct Line {
  int number;
  std::string key, value;
};

// Splits a file into global lines and [setup NAME] sections.
struct Parsed {
  std::vector<Line> globals;
  std::vector<std::pair<std::string, std::vector<Line>>> sections;
};

Parsed parse_lines(const std::string& text, const std::string& origin, bool allow_sections) {
  Parsed p;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::string where = origin + ":" + std::to_string(number) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw format_error(where + "unterminated section header");
      const std::string inner = trim(line.substr(1, line.size() - 2));
      if (!allow_sections) throw format_error(where + "sections are only allowed in matrix files");
      if (inner.rfind("setup", 0) != 0 || trim(inner.substr(5)).empty()) {
        throw format_error(where + "expected [setup NAME]");
      }
      p.sections.push_back({trim(inner.substr(5)), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw format_error(where + "expected key = value");
    Line l{number, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (l.key.empty()) throw format_error(where + "empty key");
    (p.sections.empty() ? p.globals : p.sections.back().second).push_back(l);
  }
  return p;
}

void apply(ExperimentConfig& c, const std::vector<Line>& lines, const std::string& origin) {
  for (const Line& l : lines) {
    try {
      c.set(l.key, l.value);
    } catch (const Error& e) {
      throw Error(e.kind(), origin + ":" + std::to_string(l.number) + ": " + e.what());
    }
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config file " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

std::vector<StageSpec> parse_stages(const std::string& text) {
  std::vector<StageSpec> out;
  for (const std::string& item : split(text, ',')) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) throw invalid_argument("stage '" + item + "' needs a step count (dataset:steps)");
    StageSpec s;
    s.datasets = split(item.substr(0, colon), '+');
    if (s.datasets.empty()) throw invalid_argument("stage '" + item + "' names no dataset");
    for (const auto& d : s.datasets)
      if (d.empty()) throw invalid_argument("stage '" + item + "' has an empty dataset id");
    std::string count = trim(item.substr(colon + 1));
    long long mult = 1;
    if (!count.empty() && (count.back() == 'k' || count.back() == 'K')) mult = 1000, count.pop_back();
    else if (!count.empty() && count.back() == 'M') mult = 1000000, count.pop_back();
    const long long steps = to_int("stages", count) * mult;
    if (steps < 0 || steps > 2147483647LL) throw invalid_argument("stage '" + item + "' has an invalid step count");
    s.steps = static_cast<int>(steps);
    out.push_back(s);
  }
  return out;
}

std::string format_stages(const std::vector<StageSpec>& stages) {
  std::string out;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (i) out += ",";
    for (std::size_t d = 0; d < stages[i].datasets.size(); ++d) out += (d ? "+" : "") + stages[i].datasets[d];
    out += ":" + std::to_string(stages[i].steps);
  }
  return out;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return serialize() == o.serialize();
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key.rfind(kDatasetPrefix, 0) == 0) {
    const std::string id = key.substr(kDatasetPrefix.size());
    if (id.empty()) throw invalid_argument("config key '" + key + "': empty dataset id");
    datasets[id] = trim(value);
    return;
  }
  const KeyDef* d = find_key(key);
  if (!d) throw invalid_argument("unknown config key '" + key + "'");
  d->set(*this, key, value);
}

std::string ExperimentConfig::get(const std::string& key) const {
  if (key.rfind(kDatasetPrefix, 0) == 0) {
    const auto it = datasets.find(key.substr(kDatasetPrefix.size()));
    if (it == datasets.end()) throw invalid_argument("unknown config key '" + key + "'");
    return it->second;
  }
  const KeyDef* d = find_key(key);
  if (!d) throw invalid_argument("unknown config key '" + key + "'");
  return d->get(*this);
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  for (const KeyDef& d : key_table()) out += d.name + " = " + d.get(*this) + "\n";
  for (const auto& [id, path] : datasets) out += kDatasetPrefix + id + " = " + path + "\n";
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentConfig::digest() const { return fnv1a_hex(serialize()); }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const KeyDef& d : key_table()) k.push_back(d.name);
    return k;
  }();
  return keys;
}

void ExperimentConfig::validate() const {
  auto wrap = [](const std::string& key, const std::function<void()>& check) {
    try {
      check();
    } catch (const Error& e) {
      throw invalid_argument("config key '" + key + "': " + e.what());
    }
  };
  if (name.empty()) throw invalid_argument("config key 'name': must not be empty");
  if (workers < 1) throw invalid_argument("config key 'workers': must be >= 1");
  wrap("network", [&] { network.validate(); });
  wrap("train", [&] { train.validate(); });
  wrap("bgfg", [&] { bgfg.validate(); });
  if (bgfg_enlarge < 0.0) throw invalid_argument("config key 'bgfg.enlarge': must be >= 0");
  wrap("labels", [&] { labels.thresholds.validate(); });
  if (labels.box.enlarge < 0.0) throw invalid_argument("config key 'labels.enlarge': must be >= 0");
  if (labels.box.min_side < 0) throw invalid_argument("config key 'labels.min_side': must be >= 0");
  wrap("labels", [&] { labels.box.policy.validate(); });
  wrap("infer", [&] { inference.validate(); });
  for (const StageSpec& s : stages) {
    for (const std::string& d : s.datasets) {
      if (!datasets.count(d)) throw invalid_argument("config key 'stages': dataset '" + d + "' is not declared (dataset." + d + " = PATH)");
    }
  }
  for (const std::string& d : test_sets) {
    if (!datasets.count(d)) throw invalid_argument("config key 'test_sets': dataset '" + d + "' is not declared (dataset." + d + " = PATH)");
  }
}

std::filesystem::path ExperimentConfig::dataset_path(const std::string& id) const {
  const auto it = datasets.find(id);
  if (it == datasets.end()) throw invalid_argument("dataset '" + id + "' is not declared (dataset." + id + " = PATH)");
  std::filesystem::path p(it->second);
  if (p.is_absolute()) return p;
  if (!data_root.empty()) return std::filesystem::absolute(std::filesystem::path(data_root) / p);
  if (const char* env = std::getenv("WEAKSEG_DATA_ROOT"); env && *env) {
    return std::filesystem::absolute(std::filesystem::path(env) / p);
  }
  return std::filesystem::absolute(source_dir / p);
}

train::TrainConfig ExperimentConfig::seg_train_config() const {
  train::TrainConfig c = train;
  c.seed = seed;
  return c;
}

train::TrainConfig ExperimentConfig::bgfg_train_config() const {
  train::TrainConfig c = bgfg;
  c.seed = seed;
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  const Parsed p = parse_lines(text, origin, false);
  ExperimentConfig c;
  apply(c, p.globals, origin);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig c = parse_config(read_text(path), path.string());
  c.source_dir = std::filesystem::absolute(path).parent_path();
  return c;
}

std::vector<ExperimentConfig> parse_matrix(const std::string& text, const std::string& origin) {
  const Parsed p = parse_lines(text, origin, true);
  ExperimentConfig globals;
  apply(globals, p.globals, origin);
  std::vector<ExperimentConfig> out;
  std::set<std::string> names;
  for (const auto& [name, lines] : p.sections) {
    ExperimentConfig c = globals;
    c.name = name;
    apply(c, lines, origin);
    if (!names.insert(c.name).second) throw invalid_argument(origin + ": duplicate setup name '" + c.name + "'");
    try {
      c.validate();
    } catch (const Error& e) {
      throw Error(e.kind(), origin + ": setup '" + c.name + "': " + e.what());
    }
    out.push_back(std::move(c));
  }
  for (const ExperimentConfig& c : out) {
    if (!c.baseline.empty() && !names.count(c.baseline)) {
      throw invalid_argument(origin + ": setup '" + c.name + "': config key 'baseline': no setup named '" + c.baseline + "'");
    }
  }
  return out;
}

std::vector<ExperimentConfig> load_matrix(const std::filesystem::path& path) {
  auto out = parse_matrix(read_text(path), path.string());
  for (auto& c : out) c.source_dir = std::filesystem::absolute(path).parent_path();
  return out;
}

}  // namespace weakseg::config
