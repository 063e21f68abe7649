#include <cmath>

#include "lle/core/errors.hpp"
#include "lle/image/image.hpp"

namespace lle {

namespace {

// D65 2-degree observer
constexpr double kXn = 0.95047;
constexpr double kYn = 1.0;
constexpr double kZn = 1.08883;

double srgb_decode(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double srgb_encode(double c) {
  return c <= 0.0031308 ? 12.92 * c
                        : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta
             ? std::cbrt(t)
             : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

double lab_f_inv(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta ? t * t * t : 3.0 * delta * delta * (t - 4.0 / 29.0);
}

}  // namespace

ImageTensor srgb_to_lab(const ImageTensor& img) {
  if (img.channels() != 3)
    throw ShapeError("srgb_to_lab: expected 3 channels, got " +
                     std::to_string(img.channels()));
  ImageTensor out;
  out.color_space = ColorSpace::Lab;
  out.tensor = Tensor(img.h(), img.w(), 3);
  const Tensor& src = img.tensor;
  for (std::size_t pix = 0; pix < std::size_t(src.h) * src.w; ++pix) {
    const double r = srgb_decode(src.data[pix * 3 + 0]);
    const double g = srgb_decode(src.data[pix * 3 + 1]);
    const double b = srgb_decode(src.data[pix * 3 + 2]);
    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    const double fx = lab_f(x / kXn);
    const double fy = lab_f(y / kYn);
    const double fz = lab_f(z / kZn);
    out.tensor.data[pix * 3 + 0] = float(116.0 * fy - 16.0);
    out.tensor.data[pix * 3 + 1] = float(500.0 * (fx - fy));
    out.tensor.data[pix * 3 + 2] = float(200.0 * (fy - fz));
  }
  return out;
}

ImageTensor lab_to_srgb(const ImageTensor& img) {
  if (img.channels() != 3)
    throw ShapeError("lab_to_srgb: expected 3 channels");
  ImageTensor out;
  out.color_space = ColorSpace::Srgb;
  out.tensor = Tensor(img.h(), img.w(), 3);
  const Tensor& src = img.tensor;
  for (std::size_t pix = 0; pix < std::size_t(src.h) * src.w; ++pix) {
    const double L = src.data[pix * 3 + 0];
    const double a = src.data[pix * 3 + 1];
    const double b = src.data[pix * 3 + 2];
    const double fy = (L + 16.0) / 116.0;
    const double fx = fy + a / 500.0;
    const double fz = fy - b / 200.0;
    const double x = kXn * lab_f_inv(fx);
    const double y = kYn * lab_f_inv(fy);
    const double z = kZn * lab_f_inv(fz);
    const double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
    const double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
    const double bb = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
    out.tensor.data[pix * 3 + 0] = float(srgb_encode(r));
    out.tensor.data[pix * 3 + 1] = float(srgb_encode(g));
    out.tensor.data[pix * 3 + 2] = float(srgb_encode(bb));
  }
  return out;
}

}  // namespace lle
