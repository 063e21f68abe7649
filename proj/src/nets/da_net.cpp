#include "lle/nets/da_net.hpp"

#include "lle/core/errors.hpp"
#include "lle/nets/checkpoint.hpp"

namespace lle {

std::string DaConfig::arch_string() const {
  return "da:in=" + std::to_string(in_channels) +
         ",blocks=" + std::to_string(blocks) +
         ",ch=" + std::to_string(channels) + ",k=" + std::to_string(kernel);
}

WeightStore da_init(const DaConfig& cfg, std::uint64_t seed) {
  WeightStore store;
  for (int i = 1; i <= cfg.blocks; ++i) {
    const int cin = i == 1 ? cfg.in_channels : cfg.channels;
    auto& w = store.add("block" + std::to_string(i) + ".w",
                        {cfg.kernel, cfg.kernel, cin, cfg.channels});
    he_init_conv(w, seed);
    store.add("block" + std::to_string(i) + ".b", {cfg.channels});
  }
  store.meta["arch"] = cfg.arch_string();
  store.meta["arch_hash"] = arch_hash(cfg.arch_string());
  return store;
}

template <class T>
int da_forward(Graph<T>& g, const BoundParams<T>& params, const DaConfig& cfg,
               int x) {
  if (g.val(x).c != cfg.in_channels)
    throw ShapeError("da_forward: expected " +
                     std::to_string(cfg.in_channels) + " channels, got " +
                     std::to_string(g.val(x).c));
  const int k = cfg.kernel;
  const int pad = k / 2;
  int cur = x;
  for (int i = 1; i <= cfg.blocks; ++i) {
    const std::string name = "block" + std::to_string(i);
    cur = g.conv2d(cur, params.at(name + ".w"), params.at(name + ".b"), k, k,
                   1, pad);
    cur = g.leaky_relu(cur, T(cfg.lrelu_slope));
  }
  return cur;
}

template int da_forward<float>(Graph<float>&, const BoundParams<float>&,
                               const DaConfig&, int);
template int da_forward<double>(Graph<double>&, const BoundParams<double>&,
                                const DaConfig&, int);

Tensor da_features(const WeightStore& weights,
                   const ImageTensor& reflectance) {
  const DaConfig cfg;
  require_arch(weights, "arch", cfg.arch_string());
  GraphF g;
  const auto params = bind_params(g, weights, false);
  const int x = g.leaf(reflectance.tensor, false);
  return g.val(da_forward(g, params, cfg, x));
}

}  // namespace lle
