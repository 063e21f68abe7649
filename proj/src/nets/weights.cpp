#include "lle/nets/weights.hpp"

#include <cmath>

#include "lle/core/errors.hpp"

namespace lle {

WeightEntry& WeightStore::add(const std::string& name,
                              std::vector<int> shape) {
  if (has(name))
    throw CheckpointError("WeightStore: duplicate entry '" + name + "'");
  WeightEntry entry;
  entry.name = name;
  entry.shape = std::move(shape);
  entry.values.assign(entry.count(), 0.0f);
  entries.push_back(std::move(entry));
  return entries.back();
}

bool WeightStore::has(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return true;
  return false;
}

const WeightEntry& WeightStore::get(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw CheckpointError("WeightStore: missing entry '" + name + "'");
}

WeightEntry& WeightStore::get(const std::string& name) {
  for (auto& e : entries)
    if (e.name == name) return e;
  throw CheckpointError("WeightStore: missing entry '" + name + "'");
}

WeightStore WeightStore::subset(const std::string& prefix) const {
  WeightStore sub;
  for (const auto& e : entries) {
    if (e.name.rfind(prefix, 0) != 0) continue;
    WeightEntry copy = e;
    copy.name = e.name.substr(prefix.size());
    sub.entries.push_back(std::move(copy));
  }
  return sub;
}

void WeightStore::merge(const std::string& prefix, const WeightStore& sub) {
  for (const auto& e : sub.entries) {
    WeightEntry copy = e;
    copy.name = prefix + e.name;
    if (has(copy.name))
      throw CheckpointError("WeightStore: duplicate entry '" + copy.name +
                            "' while merging");
    entries.push_back(std::move(copy));
  }
}

std::size_t WeightStore::total_parameters() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.count();
  return n;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : s) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string arch_hash(const std::string& arch_string) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                (unsigned long long)fnv1a64(arch_string));
  return buf;
}

void he_init_conv(WeightEntry& entry, std::uint64_t seed) {
  if (entry.shape.size() != 4) return;  // biases stay zero
  const int fan_in = entry.shape[0] * entry.shape[1] * entry.shape[2];
  const double stddev = std::sqrt(2.0 / double(fan_in));
  Rng rng = Rng::derive(seed, {fnv1a64(entry.name)});
  for (auto& v : entry.values) v = float(rng.normal() * stddev);
}

}  // namespace lle
