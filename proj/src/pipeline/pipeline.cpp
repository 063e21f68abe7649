#include "lle/pipeline/pipeline.hpp"

#include <algorithm>

#include "lle/core/errors.hpp"
#include "lle/metrics/metrics.hpp"
#include "lle/nets/checkpoint.hpp"
#include "lle/nets/pad.hpp"
#include "lle/nets/unet.hpp"

namespace lle {

WeightStore load_decomposer(const std::filesystem::path& ckpt) {
  const WeightStore full = load_checkpoint(ckpt);
  require_arch(full, "arch.decom", decomposer_config().arch_string());
  WeightStore sub = full.subset("decom.");
  sub.meta["arch"] = decomposer_config().arch_string();
  return sub;
}

WeightStore load_enhancer(const std::filesystem::path& ckpt) {
  const WeightStore full = load_checkpoint(ckpt);
  require_arch(full, "arch.enh", enhancer_config().arch_string());
  WeightStore sub = full.subset("enh.");
  sub.meta["arch"] = enhancer_config().arch_string();
  return sub;
}

EnhancedOutput enhance_image(const WeightStore& decom_weights,
                             const WeightStore& enh_weights,
                             const ImageTensor& img) {
  if (img.channels() != 3)
    throw ShapeError("enhance_image: expected a 3-channel input");
  const int multiple = decomposer_config().pad_multiple();
  const auto [padded, record] = pad_to_multiple(img, multiple);

  auto [reflectance, illumination] = decompose(decom_weights, padded);
  ImageTensor illumination_out =
      enhance(enh_weights, reflectance, illumination);

  EnhancedOutput out;
  out.reflectance = crop_back(reflectance, record);
  out.illumination_in = crop_back(illumination, record);
  out.illumination_out = crop_back(illumination_out, record);
  out.enhanced.color_space = ColorSpace::Srgb;
  out.enhanced.tensor = Tensor(record.orig_h, record.orig_w, 3);
  for (int pix = 0; pix < record.orig_h * record.orig_w; ++pix) {
    const float gain = out.illumination_out.tensor.data[std::size_t(pix)];
    for (int ch = 0; ch < 3; ++ch) {
      const float v =
          out.reflectance.tensor.data[std::size_t(pix) * 3 + ch] * gain;
      out.enhanced.tensor.data[std::size_t(pix) * 3 + ch] =
          std::clamp(v, 0.0f, 1.0f);
    }
  }
  return out;
}

EnhancedOutput enhance_image(const std::filesystem::path& decom_ckpt,
                             const std::filesystem::path& enh_ckpt,
                             const ImageTensor& img) {
  return enhance_image(load_decomposer(decom_ckpt), load_enhancer(enh_ckpt),
                       img);
}

namespace {

std::map<std::string, std::filesystem::path> scan_images(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("eval: missing directory " + dir.string());
  std::map<std::string, std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    if (ext != ".png" && ext != ".jpg" && ext != ".jpeg") continue;
    out.emplace(entry.path().stem().string(), entry.path());
  }
  return out;
}

}  // namespace

MetricReport evaluate_directories(const std::filesystem::path& pred_dir,
                                  const std::filesystem::path& gt_dir) {
  const auto preds = scan_images(pred_dir);
  const auto gts = scan_images(gt_dir);
  std::string offenders;
  for (const auto& [stem, path] : preds)
    if (!gts.count(stem)) offenders += " pred/" + stem;
  for (const auto& [stem, path] : gts)
    if (!preds.count(stem)) offenders += " gt/" + stem;
  if (!offenders.empty())
    throw PairingError("eval: unmatched basenames:" + offenders);
  if (preds.empty()) throw DataError("eval: no images to compare");

  MetricReport report;
  for (const auto& [stem, pred_path] : preds) {
    const ImageTensor pred = load_image(pred_path);
    const ImageTensor gt = load_image(gts.at(stem));
    std::map<std::string, double>& m = report.per_image[stem];
    m["psnr_db"] = psnr(pred, gt);
    m["ssim"] = ssim(pred, gt);
    m["delta_e2000"] = delta_e2000(pred, gt);
    const AngularErrorResult ang = angular_error(pred, gt);
    m["angular_mean_deg"] = ang.mean_deg;
    m["angular_median_deg"] = ang.median_deg;
    m["angular_avg_deg"] = ang.avg_deg;
    const SecondaryMetrics sec = secondary_full_reference(pred, gt);
    m["rmse"] = sec.rmse;
    m["uqi"] = sec.uqi;
    m["sam_deg"] = sec.sam_deg;
    m["srer_db"] = sec.srer_db;
    m["colorfulness"] = colorfulness(pred);
    m["noise_level"] = noise_level_estimate(pred);
  }
  report.notes["sam_deg"] =
      "spectral angle in degrees, lower is better; identical images give 0";
  report.notes["srer_db"] =
      "10*log10(mean(gt^2)/MSE), capped at 100 dB on identical images";
  make_aggregate(report);
  return report;
}

}  // namespace lle
