#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lle/core/errors.hpp"
#include "lle/core/rng.hpp"
#include "lle/metrics/metrics.hpp"

using namespace lle;

namespace {

// Smooth synthetic base: mid-range two-dimensional ramp plus a gentle
// sinusoid, so weak-texture selection has honest work to do.
ImageTensor smooth_base(int h, int w) {
  ImageTensor img;
  img.tensor = Tensor(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const float v = 0.35f + 0.2f * float(x) / float(w) +
                      0.1f * float(y) / float(h) +
                      0.05f * std::sin(0.07f * float(x)) *
                          std::cos(0.05f * float(y));
      for (int ch = 0; ch < 3; ++ch) img.tensor.at(y, x, ch) = v;
    }
  return img;
}

// Luminance noise: one field shared by all channels, matching what the
// channel-mean grayscale of the estimator measures.
ImageTensor add_noise(const ImageTensor& img, double sigma,
                      std::uint64_t seed) {
  ImageTensor out = img;
  Rng rng(seed);
  for (int pix = 0; pix < out.tensor.h * out.tensor.w; ++pix) {
    const float n = float(sigma * rng.normal());
    for (int ch = 0; ch < out.tensor.c; ++ch)
      out.tensor.data[std::size_t(pix) * out.tensor.c + ch] += n;
  }
  return out;
}

}  // namespace

TEST_CASE("constant image has zero noise estimate") {
  ImageTensor img;
  img.tensor = Tensor::full(48, 48, 3, 0.5f);
  CHECK(noise_level_estimate(img) == 0.0);
}

TEST_CASE("too-small image is rejected") {
  ImageTensor img;
  img.tensor = Tensor::full(16, 48, 3, 0.5f);
  CHECK_THROWS_AS((void)noise_level_estimate(img), ShapeError);
}

TEST_CASE("synthetic sigma=0.05 is recovered within [0.04, 0.06]") {
  const ImageTensor noisy = add_noise(smooth_base(192, 192), 0.05, 42);
  const double est = noise_level_estimate(noisy);
  CHECK(est >= 0.04);
  CHECK(est <= 0.06);
}

TEST_CASE("estimates are calibrated and strictly increasing in sigma") {
  const ImageTensor base = smooth_base(192, 192);
  double prev = -1.0;
  for (const double sigma : {0.02, 0.05, 0.10}) {
    CAPTURE(sigma);
    const double est =
        noise_level_estimate(add_noise(base, sigma, 777));
    CHECK(est >= 0.8 * sigma);
    CHECK(est <= 1.2 * sigma);
    CHECK(est > prev);
    prev = est;
  }
}

TEST_CASE("estimate is invariant to adding a constant") {
  const ImageTensor noisy = add_noise(smooth_base(96, 96), 0.03, 9);
  ImageTensor shifted = noisy;
  for (auto& v : shifted.tensor.data) v += 0.2f;
  CHECK(noise_level_estimate(shifted) ==
        doctest::Approx(noise_level_estimate(noisy)).epsilon(1e-6));
}
