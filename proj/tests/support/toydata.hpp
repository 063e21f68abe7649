#pragma once

// Synthetic paired low/normal-light data for desk-scale runs: structured
// scenes (color gradients, rectangles, soft disks) darkened by a smooth
// illumination field with mild sensor-style noise on the low exposure.

#include <algorithm>
#include <filesystem>
#include <string>

#include "lle/core/rng.hpp"
#include "lle/image/image.hpp"

namespace lle::test {

inline ImageTensor toy_scene(int h, int w, Rng& rng) {
  ImageTensor img;
  img.tensor = Tensor(h, w, 3);
  float c0[3], c1[3];
  for (int ch = 0; ch < 3; ++ch) {
    c0[ch] = 0.25f + 0.55f * float(rng.uniform());
    c1[ch] = 0.25f + 0.55f * float(rng.uniform());
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const float t = 0.5f * (float(x) / w + float(y) / h);
      for (int ch = 0; ch < 3; ++ch)
        img.tensor.at(y, x, ch) = (1.0f - t) * c0[ch] + t * c1[ch];
    }
  const int rects = 3 + int(rng.below(4));
  for (int r = 0; r < rects; ++r) {
    const int rw = 4 + int(rng.below(std::uint32_t(w / 2)));
    const int rh = 4 + int(rng.below(std::uint32_t(h / 2)));
    const int x0 = int(rng.below(std::uint32_t(w - rw)));
    const int y0 = int(rng.below(std::uint32_t(h - rh)));
    float col[3];
    for (int ch = 0; ch < 3; ++ch)
      col[ch] = 0.15f + 0.8f * float(rng.uniform());
    for (int y = y0; y < y0 + rh; ++y)
      for (int x = x0; x < x0 + rw; ++x)
        for (int ch = 0; ch < 3; ++ch) img.tensor.at(y, x, ch) = col[ch];
  }
  const int disks = 2 + int(rng.below(3));
  for (int d = 0; d < disks; ++d) {
    const float cx = float(rng.below(std::uint32_t(w)));
    const float cy = float(rng.below(std::uint32_t(h)));
    const float rad = 3.0f + float(rng.uniform()) * float(std::min(h, w)) / 4;
    float col[3];
    for (int ch = 0; ch < 3; ++ch)
      col[ch] = 0.15f + 0.8f * float(rng.uniform());
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const float dx = x - cx, dy = y - cy;
        const float dist = std::sqrt(dx * dx + dy * dy);
        if (dist >= rad) continue;
        const float blend = std::min(1.0f, (rad - dist) / 2.0f);
        for (int ch = 0; ch < 3; ++ch)
          img.tensor.at(y, x, ch) =
              (1.0f - blend) * img.tensor.at(y, x, ch) + blend * col[ch];
      }
  }
  return img;
}

// low = scene * smooth dark gain field + N(0, noise_sigma), clamped.
inline ImageTensor darken(const ImageTensor& scene, Rng& rng,
                          double noise_sigma) {
  const int h = scene.h(), w = scene.w();
  ImageTensor low;
  low.tensor = Tensor(h, w, 3);
  const float base = 0.10f + 0.10f * float(rng.uniform());
  const float wobble = 0.04f + 0.03f * float(rng.uniform());
  const float fx = 2.0f + 2.0f * float(rng.uniform());
  const float fy = 2.0f + 2.0f * float(rng.uniform());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const float gain =
          base + wobble * std::sin(fx * 3.14159f * float(x) / w) *
                     std::cos(fy * 3.14159f * float(y) / h);
      const float noise = float(noise_sigma * rng.normal());
      for (int ch = 0; ch < 3; ++ch) {
        const float v = scene.tensor.at(y, x, ch) * gain + noise;
        low.tensor.at(y, x, ch) = std::clamp(v, 0.0f, 1.0f);
      }
    }
  return low;
}

inline void write_toy_dataset(const std::filesystem::path& root, int pairs,
                              int size, std::uint64_t seed,
                              double noise_sigma = 0.01) {
  std::filesystem::create_directories(root / "low");
  std::filesystem::create_directories(root / "high");
  for (int i = 0; i < pairs; ++i) {
    Rng rng = Rng::derive(seed, {std::uint64_t(i)});
    const ImageTensor high = toy_scene(size, size, rng);
    const ImageTensor low = darken(high, rng, noise_sigma);
    const std::string name = "pair" + std::to_string(i) + ".png";
    save_image(low, root / "low" / name);
    save_image(high, root / "high" / name);
  }
}

}  // namespace lle::test
