// Regenerates the committed mini fixture:
//   make_fixture <root> [--seed N] [--train N] [--test N] [--size N] [--words N]
// Layout: <root>/{train,test}/{images,masks,boxes}.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "core/image.hpp"
#include "support/synthetic_text.hpp"

namespace fs = std::filesystem;
using namespace weakseg;

namespace {

void write_sample(const fs::path& split_dir, const std::string& stem, const testing::SyntheticScene& s) {
  write_rgb_png((split_dir / "images" / (stem + ".png")).string(), s.image);
  RgbImage mask(s.truth.width(), s.truth.height());
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (s.truth.at(x, y) == Label::kForeground) mask.set(x, y, {255, 255, 255});
  write_rgb_png((split_dir / "masks" / (stem + ".png")).string(), mask);
  std::ofstream boxes(split_dir / "boxes" / (stem + ".txt"));
  for (std::size_t i = 0; i < s.words.size(); ++i) {
    const Rect& r = std::get<Rect>(s.words[i].geometry);
    boxes << r.x << "," << r.y << "," << r.w << "," << r.h << ",word" << i << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"write the synthetic mini fixture"};
  std::string root;
  unsigned seed = 2024;
  int train = 6, test = 2, size = 160, words = 8;
  app.add_option("root", root)->required();
  app.add_option("--seed", seed);
  app.add_option("--train", train);
  app.add_option("--test", test);
  app.add_option("--size", size);
  app.add_option("--words", words, "maximum words per image");
  CLI11_PARSE(app, argc, argv);

  std::mt19937 gen(seed);
  int index = 0;
  for (const auto& [split, count] : {std::pair{"train", train}, std::pair{"test", test}}) {
    const fs::path dir = fs::path(root) / split;
    for (const char* sub : {"images", "masks", "boxes"}) fs::create_directories(dir / sub);
    for (int i = 0; i < count; ++i) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "img_%02d", index++);
      write_sample(dir, stem, testing::render_scene(gen, size, size, words));
    }
  }
  std::printf("wrote %d images under %s\n", train + test, root.c_str());
  return 0;
}
