#include "lle/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lle/core/errors.hpp"

namespace lle {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kZeroNorm = 1e-6;

void check_full_reference(const ImageTensor& pred, const ImageTensor& gt,
                          const char* where) {
  require_same_shape(pred.tensor, gt.tensor, where);
  if (pred.channels() != 3)
    throw ShapeError(std::string(where) + ": expected 3-channel images");
}

double mse(const Tensor& a, const Tensor& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = double(a.data[i]) - double(b.data[i]);
    acc += d * d;
  }
  return acc / double(a.size());
}

// Separable Gaussian filter, valid region only.
struct GaussianWindow {
  int size;
  std::vector<double> taps;

  explicit GaussianWindow(int size_, double sigma) : size(size_), taps(size_) {
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
      const double d = i - (size - 1) / 2.0;
      taps[std::size_t(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
      sum += taps[std::size_t(i)];
    }
    for (auto& t : taps) t /= sum;
  }
};

// out[(h - win + 1) x (w - win + 1)]
std::vector<double> filter_valid(const std::vector<double>& img, int h, int w,
                                 const GaussianWindow& win) {
  const int oh = h - win.size + 1;
  const int ow = w - win.size + 1;
  std::vector<double> rows(std::size_t(h) * ow);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < win.size; ++k)
        acc += win.taps[std::size_t(k)] * img[std::size_t(y) * w + x + k];
      rows[std::size_t(y) * ow + x] = acc;
    }
  std::vector<double> out(std::size_t(oh) * ow);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < win.size; ++k)
        acc += win.taps[std::size_t(k)] * rows[std::size_t(y + k) * ow + x];
      out[std::size_t(y) * ow + x] = acc;
    }
  return out;
}

}  // namespace

double psnr(const ImageTensor& pred, const ImageTensor& gt) {
  check_full_reference(pred, gt, "psnr");
  const double err = mse(pred.tensor, gt.tensor);
  if (err <= 0.0) return kDbCap;
  return std::min(kDbCap, 10.0 * std::log10(1.0 / err));
}

double ssim(const ImageTensor& pred, const ImageTensor& gt) {
  check_full_reference(pred, gt, "ssim");
  constexpr int kWin = 11;
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  const int h = pred.h(), w = pred.w();
  if (h < kWin || w < kWin)
    throw ShapeError("ssim: image smaller than the 11x11 window");
  static const GaussianWindow window(kWin, 1.5);

  double channel_total = 0.0;
  std::vector<double> x(std::size_t(h) * w), y(std::size_t(h) * w);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (int ch = 0; ch < 3; ++ch) {
    for (int pix = 0; pix < h * w; ++pix) {
      x[std::size_t(pix)] = pred.tensor.data[std::size_t(pix) * 3 + ch];
      y[std::size_t(pix)] = gt.tensor.data[std::size_t(pix) * 3 + ch];
      xx[std::size_t(pix)] = x[std::size_t(pix)] * x[std::size_t(pix)];
      yy[std::size_t(pix)] = y[std::size_t(pix)] * y[std::size_t(pix)];
      xy[std::size_t(pix)] = x[std::size_t(pix)] * y[std::size_t(pix)];
    }
    const auto mu1 = filter_valid(x, h, w, window);
    const auto mu2 = filter_valid(y, h, w, window);
    const auto m11 = filter_valid(xx, h, w, window);
    const auto m22 = filter_valid(yy, h, w, window);
    const auto m12 = filter_valid(xy, h, w, window);
    double acc = 0.0;
    for (std::size_t i = 0; i < mu1.size(); ++i) {
      const double var1 = m11[i] - mu1[i] * mu1[i];
      const double var2 = m22[i] - mu2[i] * mu2[i];
      const double cov = m12[i] - mu1[i] * mu2[i];
      const double num = (2.0 * mu1[i] * mu2[i] + kC1) * (2.0 * cov + kC2);
      const double den =
          (mu1[i] * mu1[i] + mu2[i] * mu2[i] + kC1) * (var1 + var2 + kC2);
      acc += num / den;
    }
    channel_total += acc / double(mu1.size());
  }
  return channel_total / 3.0;
}

double delta_e2000(const ImageTensor& pred, const ImageTensor& gt) {
  check_full_reference(pred, gt, "delta_e2000");
  const ImageTensor lab_pred = srgb_to_lab(pred);
  const ImageTensor lab_gt = srgb_to_lab(gt);
  const std::size_t npix = std::size_t(pred.h()) * pred.w();
  double acc = 0.0;
  for (std::size_t pix = 0; pix < npix; ++pix) {
    const double a[3] = {lab_pred.tensor.data[pix * 3 + 0],
                         lab_pred.tensor.data[pix * 3 + 1],
                         lab_pred.tensor.data[pix * 3 + 2]};
    const double b[3] = {lab_gt.tensor.data[pix * 3 + 0],
                         lab_gt.tensor.data[pix * 3 + 1],
                         lab_gt.tensor.data[pix * 3 + 2]};
    acc += ciede2000(a, b);
  }
  return acc / double(npix);
}

namespace {

std::vector<double> pixel_angles_deg(const ImageTensor& pred,
                                     const ImageTensor& gt) {
  const std::size_t npix = std::size_t(pred.h()) * pred.w();
  std::vector<double> angles;
  angles.reserve(npix);
  for (std::size_t pix = 0; pix < npix; ++pix) {
    double dot = 0.0, np = 0.0, ng = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
      const double p = pred.tensor.data[pix * 3 + ch];
      const double g = gt.tensor.data[pix * 3 + ch];
      dot += p * g;
      np += p * p;
      ng += g * g;
    }
    np = std::sqrt(np);
    ng = std::sqrt(ng);
    if (np < kZeroNorm || ng < kZeroNorm) continue;
    const double cosv = std::clamp(dot / (np * ng), -1.0, 1.0);
    angles.push_back(std::acos(cosv) * 180.0 / kPi);
  }
  return angles;
}

}  // namespace

AngularErrorResult angular_error(const ImageTensor& pred,
                                 const ImageTensor& gt) {
  check_full_reference(pred, gt, "angular_error");
  std::vector<double> angles = pixel_angles_deg(pred, gt);
  if (angles.empty())
    throw DegenerateInputError(
        "angular_error: every pixel excluded (zero-norm RGB vectors)");
  double mean = 0.0;
  for (const double a : angles) mean += a;
  mean /= double(angles.size());
  std::sort(angles.begin(), angles.end());
  const std::size_t n = angles.size();
  const double median = n % 2 == 1
                            ? angles[n / 2]
                            : 0.5 * (angles[n / 2 - 1] + angles[n / 2]);
  return {mean, median, 0.5 * (mean + median)};
}

double colorfulness(const ImageTensor& img) {
  if (img.channels() != 3)
    throw ShapeError("colorfulness: expected a 3-channel image");
  const std::size_t npix = std::size_t(img.h()) * img.w();
  double sum_rg = 0.0, sum_yb = 0.0, sq_rg = 0.0, sq_yb = 0.0;
  for (std::size_t pix = 0; pix < npix; ++pix) {
    const double r = 255.0 * img.tensor.data[pix * 3 + 0];
    const double g = 255.0 * img.tensor.data[pix * 3 + 1];
    const double b = 255.0 * img.tensor.data[pix * 3 + 2];
    const double rg = r - g;
    const double yb = 0.5 * (r + g) - b;
    sum_rg += rg;
    sum_yb += yb;
    sq_rg += rg * rg;
    sq_yb += yb * yb;
  }
  const double mean_rg = sum_rg / double(npix);
  const double mean_yb = sum_yb / double(npix);
  const double var_rg = std::max(0.0, sq_rg / double(npix) - mean_rg * mean_rg);
  const double var_yb = std::max(0.0, sq_yb / double(npix) - mean_yb * mean_yb);
  return std::sqrt(var_rg + var_yb) +
         0.3 * std::sqrt(mean_rg * mean_rg + mean_yb * mean_yb);
}

SecondaryMetrics secondary_full_reference(const ImageTensor& pred,
                                          const ImageTensor& gt) {
  check_full_reference(pred, gt, "secondary_full_reference");
  SecondaryMetrics out;
  const double err = mse(pred.tensor, gt.tensor);
  out.rmse = std::sqrt(err);

  // SRER: signal power over error power, capped like PSNR.
  double signal = 0.0;
  for (const float v : gt.tensor.data) signal += double(v) * v;
  signal /= double(gt.tensor.size());
  out.srer_db = err <= 0.0 ? kDbCap
                           : std::min(kDbCap, 10.0 * std::log10(signal / err));

  // SAM: mean spectral angle, standard lower-is-better degree form.
  const std::vector<double> angles = pixel_angles_deg(pred, gt);
  if (!angles.empty()) {
    double mean = 0.0;
    for (const double a : angles) mean += a;
    out.sam_deg = mean / double(angles.size());
  }

  // UQI over sliding 8x8 windows via summed-area tables, per channel then
  // averaged. The unit tests check this against a direct windowed oracle.
  constexpr int kWin = 8;
  const int h = pred.h(), w = pred.w();
  if (h < kWin || w < kWin)
    throw ShapeError("secondary_full_reference: image smaller than the UQI "
                     "8x8 window");
  const int n = kWin * kWin;
  const int ih = h + 1, iw = w + 1;
  std::vector<double> i1(std::size_t(ih) * iw), i2(i1.size()), i11(i1.size()),
      i22(i1.size()), i12(i1.size());
  auto window_sum = [iw](const std::vector<double>& table, int y, int x) {
    return table[std::size_t(y + kWin) * iw + x + kWin] -
           table[std::size_t(y) * iw + x + kWin] -
           table[std::size_t(y + kWin) * iw + x] +
           table[std::size_t(y) * iw + x];
  };
  double channel_total = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double a = pred.tensor.at(y, x, ch);
        const double b = gt.tensor.at(y, x, ch);
        const std::size_t at = std::size_t(y + 1) * iw + x + 1;
        const std::size_t up = std::size_t(y) * iw + x + 1;
        i1[at] = a + i1[at - 1] + i1[up] - i1[up - 1];
        i2[at] = b + i2[at - 1] + i2[up] - i2[up - 1];
        i11[at] = a * a + i11[at - 1] + i11[up] - i11[up - 1];
        i22[at] = b * b + i22[at - 1] + i22[up] - i22[up - 1];
        i12[at] = a * b + i12[at - 1] + i12[up] - i12[up - 1];
      }
    double acc = 0.0;
    int count = 0;
    for (int y = 0; y + kWin <= h; ++y)
      for (int x = 0; x + kWin <= w; ++x) {
        const double mu1 = window_sum(i1, y, x) / n;
        const double mu2 = window_sum(i2, y, x) / n;
        const double var1 =
            (window_sum(i11, y, x) - n * mu1 * mu1) / (n - 1);
        const double var2 =
            (window_sum(i22, y, x) - n * mu2 * mu2) / (n - 1);
        const double cov = (window_sum(i12, y, x) - n * mu1 * mu2) / (n - 1);
        const double mean_term = mu1 * mu1 + mu2 * mu2;
        const double var_term = var1 + var2;
        double q;
        if (var_term == 0.0 && mean_term == 0.0)
          q = 1.0;
        else if (var_term == 0.0)
          q = 2.0 * mu1 * mu2 / mean_term;
        else if (mean_term == 0.0)
          q = 2.0 * cov / var_term;
        else
          q = 4.0 * cov * mu1 * mu2 / (var_term * mean_term);
        acc += q;
        ++count;
      }
    channel_total += acc / count;
  }
  out.uqi = channel_total / 3.0;
  return out;
}

}  // namespace lle
