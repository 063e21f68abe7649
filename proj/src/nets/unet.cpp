#include "lle/nets/unet.hpp"

#include "lle/core/errors.hpp"
#include "lle/nets/checkpoint.hpp"

namespace lle {

std::string UNetConfig::arch_string() const {
  std::string ladder_str;
  for (std::size_t i = 0; i < ladder.size(); ++i)
    ladder_str += (i ? "-" : "") + std::to_string(ladder[i]);
  return "unet:in=" + std::to_string(in_channels) +
         ",out=" + std::to_string(out_channels) + ",ladder=" + ladder_str +
         ",k=" + std::to_string(kernel);
}

void UNetConfig::validate() const {
  if (ladder.size() < 3 || ladder.size() % 2 == 0)
    throw ConfigError("UNetConfig: ladder must have odd length >= 3");
  const int n = int(ladder.size());
  for (int i = 0; i < n / 2; ++i)
    if (ladder[i] != ladder[n - 1 - i])
      throw ConfigError("UNetConfig: ladder must be palindromic, got " +
                        arch_string());
  for (int i = 0; i + 1 <= n / 2; ++i)
    if (ladder[i] >= ladder[i + 1])
      throw ConfigError("UNetConfig: ladder must increase to the bottleneck");
  if (in_channels < 1 || out_channels < 1 || kernel % 2 == 0)
    throw ConfigError("UNetConfig: bad channel or kernel setting");
}

namespace {

struct ConvSpec {
  std::string name;
  int cin;
  int cout;
  int stride;
};

std::vector<ConvSpec> conv_plan(const UNetConfig& cfg) {
  const int d = cfg.depth();
  std::vector<ConvSpec> plan;
  plan.push_back({"stem", cfg.in_channels, cfg.ladder[0], 1});
  for (int i = 1; i <= d; ++i)
    plan.push_back({"down" + std::to_string(i), cfg.ladder[i - 1],
                    cfg.ladder[i], 2});
  for (int i = 1; i <= d; ++i) {
    const int cur = cfg.ladder[d + i];          // decoder width at stage i
    const int prev = cfg.ladder[d + i - 1];     // incoming width
    const int skip = cfg.ladder[d - i];         // encoder width at this scale
    plan.push_back({"up" + std::to_string(i), prev, cur, 1});
    plan.push_back({"fuse" + std::to_string(i), cur + skip, cur, 1});
  }
  plan.push_back({"head", cfg.ladder[int(cfg.ladder.size()) - 1],
                  cfg.out_channels, 1});
  return plan;
}

}  // namespace

WeightStore unet_init(const UNetConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  WeightStore store;
  for (const auto& spec : conv_plan(cfg)) {
    auto& w = store.add(spec.name + ".w",
                        {cfg.kernel, cfg.kernel, spec.cin, spec.cout});
    he_init_conv(w, seed);
    store.add(spec.name + ".b", {spec.cout});
  }
  store.meta["arch"] = cfg.arch_string();
  store.meta["arch_hash"] = arch_hash(cfg.arch_string());
  return store;
}

template <class T>
int unet_forward(Graph<T>& g, const BoundParams<T>& params,
                 const UNetConfig& cfg, int x) {
  cfg.validate();
  const int d = cfg.depth();
  const auto& xv = g.val(x);
  if (xv.c != cfg.in_channels)
    throw ShapeError("unet_forward: expected " +
                     std::to_string(cfg.in_channels) + " channels, got " +
                     std::to_string(xv.c));
  const int multiple = cfg.pad_multiple();
  if (xv.h % multiple != 0 || xv.w % multiple != 0)
    throw ShapeError("unet_forward: input " + xv.shape_str() +
                     " not divisible by " + std::to_string(multiple) +
                     "; pad first");

  const int k = cfg.kernel;
  const int pad = k / 2;
  const T slope = T(cfg.lrelu_slope);
  auto conv = [&](const std::string& name, int input, int stride) {
    return g.conv2d(input, params.at(name + ".w"), params.at(name + ".b"), k,
                    k, stride, pad);
  };

  std::vector<int> skips;  // encoder outputs, index = spatial level
  int cur = g.leaky_relu(conv("stem", x, 1), slope);
  skips.push_back(cur);
  for (int i = 1; i <= d; ++i) {
    cur = g.leaky_relu(conv("down" + std::to_string(i), cur, 2), slope);
    if (i < d) skips.push_back(cur);
  }
  for (int i = 1; i <= d; ++i) {
    const int up = g.upsample_nearest2(cur);
    cur = g.leaky_relu(conv("up" + std::to_string(i), up, 1), slope);
    cur = g.concat_c(cur, skips[std::size_t(d - i)]);
    cur = g.leaky_relu(conv("fuse" + std::to_string(i), cur, 1), slope);
  }
  return g.sigmoid(conv("head", cur, 1));
}

template int unet_forward<float>(Graph<float>&, const BoundParams<float>&,
                                 const UNetConfig&, int);
template int unet_forward<double>(Graph<double>&, const BoundParams<double>&,
                                  const UNetConfig&, int);

UNetConfig decomposer_config() {
  UNetConfig cfg;
  cfg.in_channels = 3;
  cfg.out_channels = 4;  // reflectance (3) + illumination (1)
  return cfg;
}

UNetConfig enhancer_config() {
  UNetConfig cfg;
  cfg.in_channels = 4;  // reflectance (3) + illumination (1)
  cfg.out_channels = 1;
  return cfg;
}

std::pair<ImageTensor, ImageTensor> decompose(const WeightStore& weights,
                                              const ImageTensor& scene) {
  const UNetConfig cfg = decomposer_config();
  require_arch(weights, "arch", cfg.arch_string());
  GraphF g;
  const auto params = bind_params(g, weights, false);
  const int x = g.leaf(scene.tensor, false);
  const int out = unet_forward(g, params, cfg, x);
  const int r = g.slice_c(out, 0, 3);
  const int i = g.slice_c(out, 3, 4);
  ImageTensor reflectance{g.val(r), ColorSpace::Srgb};
  ImageTensor illumination{g.val(i), ColorSpace::Srgb};
  return {std::move(reflectance), std::move(illumination)};
}

ImageTensor enhance(const WeightStore& weights, const ImageTensor& reflectance,
                    const ImageTensor& illumination) {
  if (reflectance.h() != illumination.h() ||
      reflectance.w() != illumination.w())
    throw ShapeError("enhance: reflectance " + reflectance.tensor.shape_str() +
                     " vs illumination " + illumination.tensor.shape_str());
  if (reflectance.channels() != 3 || illumination.channels() != 1)
    throw ShapeError("enhance: expected 3-channel reflectance and 1-channel "
                     "illumination");
  const UNetConfig cfg = enhancer_config();
  require_arch(weights, "arch", cfg.arch_string());
  GraphF g;
  const auto params = bind_params(g, weights, false);
  const int r = g.leaf(reflectance.tensor, false);
  const int i = g.leaf(illumination.tensor, false);
  const int out = unet_forward(g, params, cfg, g.concat_c(r, i));
  return {g.val(out), ColorSpace::Srgb};
}

}  // namespace lle
