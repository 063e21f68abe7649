#pragma once

#include <filesystem>

#include "lle/nets/weights.hpp"

namespace lle {

// Portable archive: 8-byte magic, little-endian u64 manifest length, JSON
// manifest (meta + per-tensor name/dtype/shape/offset/size), then raw
// little-endian float32 payloads in manifest order. load(save(x)) is
// bitwise identity. See docs/checkpoint-format.md.
void save_checkpoint(const WeightStore& store,
                     const std::filesystem::path& path);
WeightStore load_checkpoint(const std::filesystem::path& path);

// Throws IncompatibilityError unless meta[key] records the expected
// architecture hash.
void require_arch(const WeightStore& store, const std::string& key,
                  const std::string& expected_arch);

}  // namespace lle
