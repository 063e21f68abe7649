#pragma once

#include "lle/image/image.hpp"

namespace lle {

// Full-reference metrics throw ShapeError on mismatched shapes. PSNR and
// SRER report the documented 100 dB cap on identical inputs instead of
// infinity.
inline constexpr double kDbCap = 100.0;

double psnr(const ImageTensor& pred, const ImageTensor& gt);

// 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, dynamic range 1,
// per channel then averaged; requires min(H, W) >= 11.
double ssim(const ImageTensor& pred, const ImageTensor& gt);

// Mean per-pixel CIEDE2000 (kL=kC=kH=1) after sRGB -> Lab conversion.
double delta_e2000(const ImageTensor& pred, const ImageTensor& gt);

// Single-pair CIEDE2000 on L*a*b* triples; exposed for the published
// verification dataset.
double ciede2000(const double lab1[3], const double lab2[3]);

struct AngularErrorResult {
  double mean_deg = 0.0;
  double median_deg = 0.0;
  double avg_deg = 0.0;  // (mean + median) / 2
};
// RGB-vector angle per pixel; pixels where either norm < 1e-6 are excluded.
// Throws DegenerateInputError when no pixel survives.
AngularErrorResult angular_error(const ImageTensor& pred,
                                 const ImageTensor& gt);

// Hasler-Suesstrunk colorfulness on the [0,255] scale, population
// standard deviations.
double colorfulness(const ImageTensor& img);

struct SecondaryMetrics {
  double rmse = 0.0;
  double uqi = 0.0;
  double sam_deg = 0.0;
  double srer_db = 0.0;
};
SecondaryMetrics secondary_full_reference(const ImageTensor& pred,
                                          const ImageTensor& gt);

// Weak-texture patch noise-level estimate (sigma on the [0,1] scale) from
// 7x7 overlapping patches of the channel-mean grayscale; needs
// min(H, W) >= 32.
double noise_level_estimate(const ImageTensor& img);

}  // namespace lle
