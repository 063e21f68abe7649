#include "lle/nets/vgg16.hpp"

#include <array>

#include "lle/core/errors.hpp"
#include "lle/nets/checkpoint.hpp"

namespace lle {

namespace {

struct Layer {
  enum Kind { Conv, Relu, Pool } kind;
  const char* name;  // conv layers only
  int cin = 0;
  int cout = 0;
};

// Positions 1..31 of the convolutional stack.
const std::array<Layer, 31>& layers() {
  static const std::array<Layer, 31> table = {{
      {Layer::Conv, "conv1_1", 3, 64},    {Layer::Relu, "", 0, 0},
      {Layer::Conv, "conv1_2", 64, 64},   {Layer::Relu, "", 0, 0},
      {Layer::Pool, "", 0, 0},
      {Layer::Conv, "conv2_1", 64, 128},  {Layer::Relu, "", 0, 0},
      {Layer::Conv, "conv2_2", 128, 128}, {Layer::Relu, "", 0, 0},
      {Layer::Pool, "", 0, 0},
      {Layer::Conv, "conv3_1", 128, 256}, {Layer::Relu, "", 0, 0},
      {Layer::Conv, "conv3_2", 256, 256}, {Layer::Relu, "", 0, 0},
      {Layer::Conv, "conv3_3", 256, 256}, {Layer::Relu, "", 0, 0},
      {Layer::Pool, "", 0, 0},
      {Layer::Conv, "conv4_1", 256, 512}, {Layer::Relu, "", 0, 0},
      {Layer::Conv, "conv4_2", 512, 512}, {Layer::Relu, "", 0, 0},
      {Layer::Conv, "conv4_3", 512, 512}, {Layer::Relu, "", 0, 0},
      {Layer::Pool, "", 0, 0},
      {Layer::Conv, "conv5_1", 512, 512}, {Layer::Relu, "", 0, 0},
      {Layer::Conv, "conv5_2", 512, 512}, {Layer::Relu, "", 0, 0},
      {Layer::Conv, "conv5_3", 512, 512}, {Layer::Relu, "", 0, 0},
      {Layer::Pool, "", 0, 0},
  }};
  return table;
}

constexpr double kImagenetMean[3] = {0.485, 0.456, 0.406};
constexpr double kImagenetStd[3] = {0.229, 0.224, 0.225};

}  // namespace

int VggConfig::input_multiple() const {
  if (feature_layer < 1 || feature_layer > 31)
    throw ConfigError("VggConfig: feature_layer must be in [1, 31]");
  int pools = 0;
  for (int i = 0; i < feature_layer; ++i)
    if (layers()[std::size_t(i)].kind == Layer::Pool) ++pools;
  return 1 << pools;
}

WeightStore vgg16_init(std::uint64_t seed) {
  WeightStore store;
  for (const auto& layer : layers()) {
    if (layer.kind != Layer::Conv) continue;
    auto& w =
        store.add(std::string(layer.name) + ".w", {3, 3, layer.cin, layer.cout});
    he_init_conv(w, seed);
    store.add(std::string(layer.name) + ".b", {layer.cout});
  }
  store.meta["arch"] = VggConfig::weights_arch();
  store.meta["arch_hash"] = arch_hash(VggConfig::weights_arch());
  return store;
}

template <class T>
int vgg16_forward(Graph<T>& g, const BoundParams<T>& params,
                  const VggConfig& cfg, int img) {
  const auto& iv = g.val(img);
  if (iv.c != 3)
    throw ShapeError("vgg16_forward: expected 3 channels, got " +
                     std::to_string(iv.c));
  const int multiple = cfg.input_multiple();
  if (iv.h < multiple || iv.w < multiple || iv.h % multiple != 0 ||
      iv.w % multiple != 0)
    throw ShapeError("vgg16_forward: input " + iv.shape_str() +
                     " must be a multiple of " + std::to_string(multiple) +
                     " and at least that large");

  std::vector<T> mul_c(3), add_c(3);
  for (int ch = 0; ch < 3; ++ch) {
    mul_c[std::size_t(ch)] = T(1.0 / kImagenetStd[ch]);
    add_c[std::size_t(ch)] = T(-kImagenetMean[ch] / kImagenetStd[ch]);
  }
  int cur = g.affine_c(img, std::move(mul_c), std::move(add_c));
  for (int i = 0; i < cfg.feature_layer; ++i) {
    const Layer& layer = layers()[std::size_t(i)];
    switch (layer.kind) {
      case Layer::Conv:
        cur = g.conv2d(cur, params.at(std::string(layer.name) + ".w"),
                       params.at(std::string(layer.name) + ".b"), 3, 3, 1, 1);
        break;
      case Layer::Relu:
        cur = g.relu(cur);
        break;
      case Layer::Pool:
        cur = g.maxpool2(cur);
        break;
    }
  }
  return cur;
}

template int vgg16_forward<float>(Graph<float>&, const BoundParams<float>&,
                                  const VggConfig&, int);
template int vgg16_forward<double>(Graph<double>&, const BoundParams<double>&,
                                   const VggConfig&, int);

Tensor vgg16_features(const WeightStore& weights, const ImageTensor& img,
                      const VggConfig& cfg) {
  require_arch(weights, "arch", VggConfig::weights_arch());
  GraphF g;
  const auto params = bind_params(g, weights, false);
  const int x = g.leaf(img.tensor, false);
  return g.val(vgg16_forward(g, params, cfg, x));
}

}  // namespace lle
