#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lle/core/rng.hpp"
#include "lle/core/tensor.hpp"

namespace lle {

enum class ColorSpace { Srgb, Linear, Lab };

// Universal image carrier: H x W x C floats. sRGB-tagged tensors hold
// values in [0,1]; C is 3 for scene/reflectance images and 1 for
// illumination maps.
struct ImageTensor {
  Tensor tensor;
  ColorSpace color_space = ColorSpace::Srgb;

  int h() const { return tensor.h; }
  int w() const { return tensor.w; }
  int channels() const { return tensor.c; }
};

struct PairedSample {
  ImageTensor low;
  ImageTensor high;
  std::string id;
};

enum class Split { Train, Eval };

struct DatasetIndex {
  std::filesystem::path root;
  Split split = Split::Train;
  struct Entry {
    std::filesystem::path low_path;
    std::filesystem::path high_path;
    std::string id;
  };
  std::vector<Entry> pairs;
};

// 8-bit PNG or JPEG -> float tensor, pixel/255. 16-bit inputs are rejected.
ImageTensor load_image(const std::filesystem::path& path);

// Clamps to [0,1], scales by 255, rounds half-up, writes an 8-bit PNG.
void save_image(const ImageTensor& img, const std::filesystem::path& path);

// Expects root/low and root/high with matching basenames; pairs are sorted
// lexicographically by id (the shared file stem).
DatasetIndex index_paired_dataset(const std::filesystem::path& root, Split split);

PairedSample load_pair(const DatasetIndex& index, std::size_t i);

// One crop window and one flip decision, applied to low and high alike.
struct CropSpec {
  int row = 0;
  int col = 0;
  bool hflip = false;
  bool vflip = false;
};

CropSpec draw_crop_spec(int h, int w, int size, Rng& rng);
ImageTensor apply_crop(const ImageTensor& img, const CropSpec& spec, int size);
PairedSample random_crop_pair(const PairedSample& sample, int size, Rng& rng);

// sRGB (D65) <-> CIE L*a*b*. The inverse exists for round-trip testing.
ImageTensor srgb_to_lab(const ImageTensor& img);
ImageTensor lab_to_srgb(const ImageTensor& img);

// Label panel used by the grid subcommand; draws `text` into the top-left
// corner of a copy of `img`.
ImageTensor annotate_image(const ImageTensor& img, const std::string& text);

}  // namespace lle
