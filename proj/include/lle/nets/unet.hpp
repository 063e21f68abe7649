#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lle/image/image.hpp"
#include "lle/nets/weights.hpp"

namespace lle {

// Encoder-decoder with skip concatenation. The channel ladder is
// palindromic around its maximum; with the default
// <32 64 128 256 128 64 32> there are three stride-2 stages, so inputs
// must have H and W divisible by 8. Decoding uses nearest-neighbor
// resize + conv. Every conv is followed by a leaky rectifier except the
// head, which is followed by a sigmoid.
struct UNetConfig {
  int in_channels = 3;
  int out_channels = 4;
  std::vector<int> ladder = {32, 64, 128, 256, 128, 64, 32};
  int kernel = 3;
  float lrelu_slope = 0.2f;

  int depth() const { return int(ladder.size() - 1) / 2; }
  int pad_multiple() const { return 1 << depth(); }
  std::string arch_string() const;
  void validate() const;
};

WeightStore unet_init(const UNetConfig& cfg, std::uint64_t seed);

// Forward pass inside a graph; x must be (H, W, in_channels) with H and W
// divisible by pad_multiple(). Returns the post-sigmoid head output.
template <class T>
int unet_forward(Graph<T>& g, const BoundParams<T>& params,
                 const UNetConfig& cfg, int x);

UNetConfig decomposer_config();
UNetConfig enhancer_config();

// Eager wrappers over a single forward pass.
std::pair<ImageTensor, ImageTensor> decompose(const WeightStore& weights,
                                              const ImageTensor& scene);
ImageTensor enhance(const WeightStore& weights, const ImageTensor& reflectance,
                    const ImageTensor& illumination);

}  // namespace lle
