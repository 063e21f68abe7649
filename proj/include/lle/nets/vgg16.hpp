#pragma once

#include <string>

#include "lle/image/image.hpp"
#include "lle/nets/weights.hpp"

namespace lle {

// VGG16 convolutional stack. feature_layer counts layer positions from 1
// (conv, relu and pool each count); the default 31 is the final pooling
// stage, producing H/32 x W/32 x 512. Inputs are normalized with the
// ImageNet channel statistics before the first conv.
struct VggConfig {
  int feature_layer = 31;

  // Weight-archive identity; independent of the feature tap position.
  static std::string weights_arch() { return "vgg16:conv13"; }
  // Minimum spatial divisor/size implied by the pooling stages reached.
  int input_multiple() const;
};

// Random-initialized fallback; real runs ingest converted pretrained
// weights (tools/convert_vgg16.py, docs/vgg16-weights.md).
WeightStore vgg16_init(std::uint64_t seed);

template <class T>
int vgg16_forward(Graph<T>& g, const BoundParams<T>& params,
                  const VggConfig& cfg, int img);

// Eager wrapper; img is 3-channel sRGB in [0,1].
Tensor vgg16_features(const WeightStore& weights, const ImageTensor& img,
                      const VggConfig& cfg = {});

}  // namespace lle
