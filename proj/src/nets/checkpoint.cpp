#include "lle/nets/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "lle/core/errors.hpp"

namespace lle {

namespace {

constexpr char kMagic[8] = {'L', 'L', 'E', 'C', 'K', 'P', 'T', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are little-endian float32");

}  // namespace

void save_checkpoint(const WeightStore& store,
                     const std::filesystem::path& path) {
  nlohmann::json manifest;
  manifest["meta"] = store.meta;
  nlohmann::json tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& entry : store.entries) {
    nlohmann::json t;
    t["name"] = entry.name;
    t["dtype"] = "f32";
    t["shape"] = entry.shape;
    t["offset"] = offset;
    t["size"] = entry.values.size() * sizeof(float);
    tensors.push_back(std::move(t));
    offset += entry.values.size() * sizeof(float);
  }
  manifest["tensors"] = std::move(tensors);
  const std::string blob = manifest.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("save_checkpoint: cannot open " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t len = blob.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(blob.data(), std::streamsize(blob.size()));
  for (const auto& entry : store.entries)
    out.write(reinterpret_cast<const char*>(entry.values.data()),
              std::streamsize(entry.values.size() * sizeof(float)));
  if (!out)
    throw IoError("save_checkpoint: write failed for " + path.string());
}

WeightStore load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in)
    throw IoError("load_checkpoint: cannot open " + path.string());
  const std::uint64_t file_size = std::uint64_t(in.tellg());
  in.seekg(0);

  char magic[8];
  std::uint64_t manifest_len = 0;
  if (file_size < sizeof(magic) + sizeof(manifest_len))
    throw CheckpointError("load_checkpoint: truncated file " + path.string());
  in.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw CheckpointError("load_checkpoint: bad magic in " + path.string());
  in.read(reinterpret_cast<char*>(&manifest_len), sizeof(manifest_len));
  if (sizeof(magic) + sizeof(manifest_len) + manifest_len > file_size)
    throw CheckpointError("load_checkpoint: manifest exceeds file size");

  std::string blob(manifest_len, '\0');
  in.read(blob.data(), std::streamsize(manifest_len));
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(blob);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("load_checkpoint: corrupt manifest: ") +
                          e.what());
  }

  WeightStore store;
  try {
    if (manifest.contains("meta"))
      store.meta = manifest["meta"].get<std::map<std::string, std::string>>();
    const std::uint64_t payload_start =
        sizeof(magic) + sizeof(manifest_len) + manifest_len;
    std::uint64_t expected_offset = 0;
    for (const auto& t : manifest.at("tensors")) {
      WeightEntry entry;
      entry.name = t.at("name").get<std::string>();
      if (t.at("dtype").get<std::string>() != "f32")
        throw CheckpointError("load_checkpoint: unsupported dtype for '" +
                              entry.name + "'");
      entry.shape = t.at("shape").get<std::vector<int>>();
      const std::uint64_t offset = t.at("offset").get<std::uint64_t>();
      const std::uint64_t bytes = t.at("size").get<std::uint64_t>();
      if (offset != expected_offset ||
          bytes != entry.count() * sizeof(float) ||
          payload_start + offset + bytes > file_size)
        throw CheckpointError(
            "load_checkpoint: payload layout mismatch for '" + entry.name +
            "'");
      expected_offset += bytes;
      entry.values.resize(entry.count());
      in.seekg(std::streamoff(payload_start + offset));
      in.read(reinterpret_cast<char*>(entry.values.data()),
              std::streamsize(bytes));
      if (!in)
        throw CheckpointError("load_checkpoint: truncated payload for '" +
                              entry.name + "'");
      store.entries.push_back(std::move(entry));
    }
    const std::uint64_t payload_start2 =
        sizeof(magic) + sizeof(manifest_len) + manifest_len;
    if (payload_start2 + expected_offset != file_size)
      throw CheckpointError("load_checkpoint: trailing or missing payload");
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("load_checkpoint: bad manifest: ") +
                          e.what());
  }
  return store;
}

void require_arch(const WeightStore& store, const std::string& key,
                  const std::string& expected_arch) {
  const auto it = store.meta.find(key);
  if (it == store.meta.end())
    throw IncompatibilityError("checkpoint has no '" + key +
                               "' architecture record");
  if (it->second != expected_arch)
    throw IncompatibilityError("checkpoint architecture mismatch for '" + key +
                               "': have " + it->second + ", need " +
                               expected_arch);
}

}  // namespace lle
