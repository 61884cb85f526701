#include "smanet/network_spec.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace weakseg::smanet {

const char* to_string(Variant variant) {
  switch (variant) {
    case Variant::kPspBaseline: return "psp_baseline";
    case Variant::kPspDoubleDecoder: return "psp_double_decoder";
    case Variant::kSmaNet: return "smanet";
  }
  return "smanet";
}

Variant variant_from_string(const std::string& text) {
  if (text == "psp_baseline" || text == "psp") return Variant::kPspBaseline;
  if (text == "psp_double_decoder" || text == "psp-dd") return Variant::kPspDoubleDecoder;
  if (text == "smanet") return Variant::kSmaNet;
  throw invalid_argument("unknown network variant '" + text + "'");
}

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw invalid_argument("network spec: " + field + " " + why);
}

void require_positive(const std::vector<int>& values, const std::string& field) {
  require(!values.empty(), field, "must not be empty");
  for (int v : values) require(v > 0, field, "entries must be positive");
}

}  // namespace

void NetworkSpec::validate() const {
  require(num_classes == 2, "num_classes", "must be 2");
  require(output_stride == 8 || output_stride == 16, "output_stride", "must be 8 or 16");
  require(encoder.blocks.size() == 4, "encoder.blocks", "must list four stages");
  require_positive(encoder.blocks, "encoder.blocks");
  require(encoder.base_width > 0, "encoder.base_width", "must be positive");
  require_positive(psp_bins, "psp_bins");
  require(std::is_sorted(psp_bins.begin(), psp_bins.end()) &&
              std::adjacent_find(psp_bins.begin(), psp_bins.end()) == psp_bins.end(),
          "psp_bins", "must be strictly increasing");
  require(reduced_channels > 0, "reduced_channels", "must be positive");
  require(skip_channels.size() == 2, "skip_channels", "must list two values");
  require_positive(skip_channels, "skip_channels");
  require(decoder_channels.size() == 2, "decoder_channels", "must list two values");
  require_positive(decoder_channels, "decoder_channels");
  if (variant == Variant::kSmaNet) {
    require_positive(attention_rates, "attention_rates");
    for (std::size_t i = 1; i < attention_rates.size(); ++i) {
      require(attention_rates[i] > attention_rates[i - 1], "attention_rates", "must be strictly increasing");
    }
    require(attention_channels > 0, "attention_channels", "must be positive");
    require(branch_channels > 0, "branch_channels", "must be positive");
    require(attention_hidden > 0, "attention_hidden", "must be positive");
  }
}

nlohmann::ordered_json NetworkSpec::to_json() const {
  nlohmann::ordered_json j;
  j["variant"] = to_string(variant);
  j["num_classes"] = num_classes;
  j["encoder_blocks"] = encoder.blocks;
  j["encoder_base_width"] = encoder.base_width;
  j["output_stride"] = output_stride;
  j["attention_rates"] = attention_rates;
  j["psp_bins"] = psp_bins;
  j["reduced_channels"] = reduced_channels;
  j["attention_channels"] = attention_channels;
  j["branch_channels"] = branch_channels;
  j["attention_hidden"] = attention_hidden;
  j["skip_channels"] = skip_channels;
  j["decoder_channels"] = decoder_channels;
  return j;
}

NetworkSpec NetworkSpec::from_json(const nlohmann::json& j) {
  NetworkSpec s;
  try {
    s.variant = variant_from_string(j.at("variant").get<std::string>());
    s.num_classes = j.at("num_classes").get<int>();
    s.encoder.blocks = j.at("encoder_blocks").get<std::vector<int>>();
    s.encoder.base_width = j.at("encoder_base_width").get<int>();
    s.output_stride = j.at("output_stride").get<int>();
    s.attention_rates = j.at("attention_rates").get<std::vector<int>>();
    s.psp_bins = j.at("psp_bins").get<std::vector<int>>();
    s.reduced_channels = j.at("reduced_channels").get<int>();
    s.attention_channels = j.at("attention_channels").get<int>();
    s.branch_channels = j.at("branch_channels").get<int>();
    s.attention_hidden = j.at("attention_hidden").get<int>();
    s.skip_channels = j.at("skip_channels").get<std::vector<int>>();
    s.decoder_channels = j.at("decoder_channels").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("network spec: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace weakseg::smanet
