#pragma once

#include <vector>

#include "lle/nets/weights.hpp"

namespace lle {

// First/second-moment accumulators mirroring a WeightStore's entries.
struct AdamState {
  std::vector<std::vector<float>> m;
  std::vector<std::vector<float>> v;
  long step = 0;

  void init(const WeightStore& store);
  bool matches(const WeightStore& store) const;
};

// One bias-corrected Adam update over every entry. grads[i] aligns with
// store.entries[i]. Throws NumericalError naming the first parameter with a
// non-finite gradient.
void adam_step(WeightStore& store, AdamState& state,
               const std::vector<std::vector<float>>& grads, double lr,
               double beta1, double beta2, double eps);

// Scales gradients so their global L2 norm is at most max_norm (no-op when
// max_norm <= 0). Returns the pre-clip norm.
double clip_global_norm(std::vector<std::vector<float>>& grads,
                        double max_norm);

}  // namespace lle
