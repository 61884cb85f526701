#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "infer/predict.hpp"

namespace weakseg::infer {

/// Image files (.png, .jpg, .jpeg) directly inside `dir`, sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

struct InferredImage {
  std::string stem;
  std::filesystem::path mask;         // <stem>.png, indexed black/red
  std::filesystem::path probability;  // <stem>_prob.png, 16-bit round(p * 65535)
};

using ModelFactory = std::function<std::unique_ptr<ProbabilityModel>()>;

/// Predicts every image in `images` and writes the mask and probability PNGs
/// to `out_dir`. Each worker gets its own model from `factory`.
std::vector<InferredImage> infer_directory(const ModelFactory& factory,
                                           const std::vector<std::filesystem::path>& images,
                                           const std::filesystem::path& out_dir,
                                           const InferencePolicy& policy, int workers = 1);

}  // namespace weakseg::infer
