#include <algorithm>
#include <map>

#include "lle/core/errors.hpp"
#include "lle/image/image.hpp"

namespace lle {

namespace fs = std::filesystem;

namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return char(std::tolower(ch)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::map<std::string, fs::path> scan_dir(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw IoError("index_paired_dataset: missing directory " + dir.string());
  std::map<std::string, fs::path> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || !is_image_file(entry.path())) continue;
    const std::string stem = entry.path().stem().string();
    auto [it, inserted] = stems.emplace(stem, entry.path());
    if (!inserted)
      throw PairingError("index_paired_dataset: duplicate basename '" + stem +
                         "' in " + dir.string());
  }
  return stems;
}

}  // namespace

DatasetIndex index_paired_dataset(const fs::path& root, Split split) {
  const auto lows = scan_dir(root / "low");
  const auto highs = scan_dir(root / "high");

  std::string offenders;
  for (const auto& [stem, path] : lows)
    if (!highs.count(stem)) offenders += " low/" + stem;
  for (const auto& [stem, path] : highs)
    if (!lows.count(stem)) offenders += " high/" + stem;
  if (!offenders.empty())
    throw PairingError("index_paired_dataset: unmatched basenames:" +
                       offenders);

  DatasetIndex index;
  index.root = root;
  index.split = split;
  for (const auto& [stem, low_path] : lows)
    index.pairs.push_back({low_path, highs.at(stem), stem});
  // std::map iteration is already sorted by stem; keep the invariant explicit.
  std::sort(index.pairs.begin(), index.pairs.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  if (index.pairs.empty())
    throw DataError("index_paired_dataset: no image pairs under " +
                    root.string());
  return index;
}

PairedSample load_pair(const DatasetIndex& index, std::size_t i) {
  const auto& entry = index.pairs.at(i);
  PairedSample sample;
  sample.low = load_image(entry.low_path);
  sample.high = load_image(entry.high_path);
  sample.id = entry.id;
  if (!sample.low.tensor.same_shape(sample.high.tensor))
    throw PairingError("load_pair: shape mismatch for '" + entry.id + "': " +
                       sample.low.tensor.shape_str() + " vs " +
                       sample.high.tensor.shape_str());
  return sample;
}

CropSpec draw_crop_spec(int h, int w, int size, Rng& rng) {
  if (size > h || size > w)
    throw ShapeError("random_crop_pair: crop size " + std::to_string(size) +
                     " exceeds image " + std::to_string(h) + "x" +
                     std::to_string(w));
  CropSpec spec;
  spec.row = int(rng.below(std::uint32_t(h - size + 1)));
  spec.col = int(rng.below(std::uint32_t(w - size + 1)));
  spec.hflip = rng.coin();
  spec.vflip = rng.coin();
  return spec;
}

ImageTensor apply_crop(const ImageTensor& img, const CropSpec& spec, int size) {
  const Tensor& src = img.tensor;
  ImageTensor out;
  out.color_space = img.color_space;
  out.tensor = Tensor(size, size, src.c);
  for (int y = 0; y < size; ++y) {
    const int sy = spec.vflip ? spec.row + size - 1 - y : spec.row + y;
    for (int x = 0; x < size; ++x) {
      const int sx = spec.hflip ? spec.col + size - 1 - x : spec.col + x;
      for (int ch = 0; ch < src.c; ++ch)
        out.tensor.at(y, x, ch) = src.at(sy, sx, ch);
    }
  }
  return out;
}

PairedSample random_crop_pair(const PairedSample& sample, int size, Rng& rng) {
  const CropSpec spec =
      draw_crop_spec(sample.low.h(), sample.low.w(), size, rng);
  PairedSample out;
  out.id = sample.id;
  out.low = apply_crop(sample.low, spec, size);
  out.high = apply_crop(sample.high, spec, size);
  return out;
}

}  // namespace lle
