#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lle/core/graph.hpp"
#include "lle/core/rng.hpp"

namespace lle {

// Named float32 parameter set for one network (or several, with name
// prefixes). Entry order is the architecture definition order and is
// preserved through checkpoints; the trainer's moment buffers index into it.
struct WeightEntry {
  std::string name;
  std::vector<int> shape;  // conv kernels: {kh, kw, cin, cout}; biases: {cout}
  std::vector<float> values;

  std::size_t count() const {
    std::size_t n = 1;
    for (const int d : shape) n *= std::size_t(d);
    return n;
  }
};

class WeightStore {
 public:
  std::vector<WeightEntry> entries;
  std::map<std::string, std::string> meta;

  WeightEntry& add(const std::string& name, std::vector<int> shape);
  bool has(const std::string& name) const;
  const WeightEntry& get(const std::string& name) const;
  WeightEntry& get(const std::string& name);

  // All entries whose name starts with `prefix`, with the prefix stripped.
  WeightStore subset(const std::string& prefix) const;
  // Adds `sub`'s entries under `prefix`; meta is left to the caller.
  void merge(const std::string& prefix, const WeightStore& sub);

  std::size_t total_parameters() const;
};

std::uint64_t fnv1a64(const std::string& s);
std::string arch_hash(const std::string& arch_string);

// He fan-in initialization for a conv entry; biases stay zero. The stream
// is keyed by (seed, entry name) so it does not depend on insertion order.
void he_init_conv(WeightEntry& entry, std::uint64_t seed);

// Parameters of one network bound into a graph as leaves.
template <class T>
struct BoundParams {
  std::vector<std::pair<std::string, int>> vars;  // (name, node id)

  int at(const std::string& name) const {
    for (const auto& [n, id] : vars)
      if (n == name) return id;
    throw CheckpointError("BoundParams: missing parameter '" + name + "'");
  }
};

// Filters a bound set by name prefix, stripping it; lets one graph hold
// several networks bound from a merged store.
template <class T>
BoundParams<T> subset_params(const BoundParams<T>& all,
                             const std::string& prefix) {
  BoundParams<T> out;
  for (const auto& [name, id] : all.vars)
    if (name.rfind(prefix, 0) == 0)
      out.vars.emplace_back(name.substr(prefix.size()), id);
  return out;
}

template <class T>
BoundParams<T> bind_params(Graph<T>& g, const WeightStore& store,
                           bool trainable) {
  BoundParams<T> bound;
  for (const auto& entry : store.entries) {
    // Conv kernels flatten to a [kh*kw*cin] x [cout] matrix; biases to 1x1xC.
    TensorT<T> t;
    if (entry.shape.size() == 4) {
      t = TensorT<T>(entry.shape[0] * entry.shape[1] * entry.shape[2],
                     entry.shape[3], 1);
    } else {
      t = TensorT<T>(1, 1, int(entry.count()));
    }
    for (std::size_t i = 0; i < entry.values.size(); ++i)
      t.data[i] = T(entry.values[i]);
    bound.vars.emplace_back(entry.name, g.leaf(std::move(t), trainable));
  }
  return bound;
}

}  // namespace lle
