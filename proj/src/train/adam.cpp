#include "lle/train/adam.hpp"

#include <cmath>

#include "lle/core/errors.hpp"
#include "lle/simd/kernels.hpp"

namespace lle {

void AdamState::init(const WeightStore& store) {
  m.clear();
  v.clear();
  step = 0;
  for (const auto& entry : store.entries) {
    m.emplace_back(entry.values.size(), 0.0f);
    v.emplace_back(entry.values.size(), 0.0f);
  }
}

bool AdamState::matches(const WeightStore& store) const {
  if (m.size() != store.entries.size() || v.size() != store.entries.size())
    return false;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i].size() != store.entries[i].values.size() ||
        v[i].size() != store.entries[i].values.size())
      return false;
  return true;
}

void adam_step(WeightStore& store, AdamState& state,
               const std::vector<std::vector<float>>& grads, double lr,
               double beta1, double beta2, double eps) {
  if (!state.matches(store))
    throw ShapeError("adam_step: moment buffers do not mirror the store");
  if (grads.size() != store.entries.size())
    throw ShapeError("adam_step: gradient count mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].size() != store.entries[i].values.size())
      throw ShapeError("adam_step: gradient shape mismatch for '" +
                       store.entries[i].name + "'");
    for (const float gval : grads[i])
      if (!std::isfinite(gval))
        throw NumericalError("adam_step: non-finite gradient for '" +
                             store.entries[i].name + "'");
  }

  state.step += 1;
  const float bias1 = float(1.0 - std::pow(beta1, double(state.step)));
  const float bias2 = float(1.0 - std::pow(beta2, double(state.step)));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    auto& entry = store.entries[i];
    simd::kernels().adam_update(int(entry.values.size()), entry.values.data(),
                                grads[i].data(), state.m[i].data(),
                                state.v[i].data(), float(lr), float(beta1),
                                float(beta2), float(eps), bias1, bias2);
  }
}

double clip_global_norm(std::vector<std::vector<float>>& grads,
                        double max_norm) {
  double total = 0.0;
  for (const auto& g : grads)
    total += double(simd::kernels().sum_sq(int(g.size()), g.data()));
  const double norm = std::sqrt(total);
  if (max_norm > 0.0 && norm > max_norm) {
    const float scale = float(max_norm / norm);
    for (auto& g : grads)
      for (auto& v : g) v *= scale;
  }
  return norm;
}

}  // namespace lle
