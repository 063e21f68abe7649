#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lle/image/image.hpp"
#include "lle/train/config.hpp"

namespace lle {

struct StepRecord {
  long step = 0;
  std::map<std::string, double> components;  // includes "total"
  double wall_ms = 0.0;
};

struct TrainResult {
  std::filesystem::path checkpoint_path;
  std::vector<StepRecord> history;
};

// Phase 1: decomposer + DA CNN trained jointly under the decomposition
// total loss. The checkpoint stores both networks ("decom.*", "da.*"); the
// DA net is never used at inference.
TrainResult train_decomposition(const TrainConfig& cfg,
                                const DatasetIndex& dataset,
                                const std::filesystem::path& out_dir);

// Phase 2: decomposer loaded from `decom_ckpt` and frozen; only the
// enhancer ("enh.*") is optimized under the enhancement total loss.
TrainResult train_enhancement(const TrainConfig& cfg,
                              const DatasetIndex& dataset,
                              const std::filesystem::path& decom_ckpt,
                              const std::filesystem::path& out_dir);

}  // namespace lle
