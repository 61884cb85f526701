#include "infer/batch.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "core/error.hpp"
#include "core/label_io.hpp"
#include "core/log.hpp"

namespace weakseg::infer {

namespace fs = std::filesystem;

std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw io_error("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<InferredImage> infer_directory(const ModelFactory& factory, const std::vector<fs::path>& images,
                                           const fs::path& out_dir, const InferencePolicy& policy, int workers) {
  policy.validate();
  fs::create_directories(out_dir);
  const std::size_t n = images.size();
  std::vector<InferredImage> out(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    std::unique_ptr<ProbabilityModel> model = factory();
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const RgbImage image = read_rgb(images[i].string());
        const Plane prob = sliding_window_predict(*model, image, policy);
        InferredImage r{images[i].stem().string(), out_dir / (images[i].stem().string() + ".png"),
                        out_dir / (images[i].stem().string() + "_prob.png")};
        write_binary_mask(r.mask.string(), binarize(prob, policy.threshold));
        write_gray16_png(r.probability.string(), quantize_probability(prob));
        out[i] = r;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int threads = std::clamp<int>(workers, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) throw runtime_error("inference failed for " + images[i].string() + ": " + errors[i]);
  }
  log::info("inferred ", n, " images into ", out_dir.string());
  return out;
}

}  // namespace weakseg::infer
