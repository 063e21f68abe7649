#pragma once

#include <string>

#include "lle/image/image.hpp"
#include "lle/nets/weights.hpp"

namespace lle {

// Training-only feature CNN: stacked 3x3 conv blocks at full resolution,
// leaky rectifier after each. Four 64-channel blocks give each output unit
// a 9x9 receptive field. Discarded at inference.
struct DaConfig {
  int in_channels = 3;
  int blocks = 4;
  int channels = 64;
  int kernel = 3;
  float lrelu_slope = 0.2f;

  std::string arch_string() const;
};

WeightStore da_init(const DaConfig& cfg, std::uint64_t seed);

template <class T>
int da_forward(Graph<T>& g, const BoundParams<T>& params, const DaConfig& cfg,
               int x);

// Eager wrapper: reflectance -> H x W x channels feature map.
Tensor da_features(const WeightStore& weights, const ImageTensor& reflectance);

}  // namespace lle
