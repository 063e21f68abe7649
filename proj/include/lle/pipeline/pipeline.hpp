#pragma once

#include <filesystem>
#include <vector>

#include "lle/image/image.hpp"
#include "lle/nets/weights.hpp"
#include "lle/pipeline/report.hpp"

namespace lle {

struct EnhancedOutput {
  ImageTensor enhanced;          // clamp(R * replicate3(I_out)), exact
  ImageTensor reflectance;       // 3ch
  ImageTensor illumination_in;   // 1ch
  ImageTensor illumination_out;  // 1ch
};

// Validates the phase-1/phase-2 archives and extracts the single network
// each stage needs.
WeightStore load_decomposer(const std::filesystem::path& ckpt);
WeightStore load_enhancer(const std::filesystem::path& ckpt);

// pad to a multiple of 8 -> decompose -> enhance -> crop back -> recompose.
EnhancedOutput enhance_image(const WeightStore& decom_weights,
                             const WeightStore& enh_weights,
                             const ImageTensor& img);
EnhancedOutput enhance_image(const std::filesystem::path& decom_ckpt,
                             const std::filesystem::path& enh_ckpt,
                             const ImageTensor& img);

// Full-reference battery over two directories paired by file stem.
MetricReport evaluate_directories(const std::filesystem::path& pred_dir,
                                  const std::filesystem::path& gt_dir);

// Side-by-side comparison strip; each panel is labeled.
ImageTensor make_grid(const std::vector<ImageTensor>& panels,
                      const std::vector<std::string>& labels);

}  // namespace lle
