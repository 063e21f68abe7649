#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lle/core/errors.hpp"
#include "lle/nets/checkpoint.hpp"
#include "lle/nets/da_net.hpp"
#include "lle/nets/pad.hpp"
#include "lle/nets/unet.hpp"
#include "lle/nets/vgg16.hpp"
#include "support/testutil.hpp"

using namespace lle;
namespace fs = std::filesystem;

namespace {

ImageTensor random_image(int h, int w, int c, std::uint64_t seed) {
  ImageTensor img;
  img.tensor = Tensor(h, w, c);
  Rng rng(seed);
  for (auto& v : img.tensor.data) v = float(rng.uniform());
  return img;
}

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() /
         (std::string("lle_nets_") + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("init is deterministic and He-scaled with zero biases") {
  const UNetConfig cfg = decomposer_config();
  const WeightStore a = unet_init(cfg, 7);
  const WeightStore b = unet_init(cfg, 7);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    CHECK(a.entries[i].values == b.entries[i].values);

  const WeightStore c = unet_init(cfg, 8);
  CHECK(c.entries[0].values != a.entries[0].values);

  // fuse1: 3x3 x 64 -> 32, 18432 values; sample variance ~ 2/fan_in
  const WeightEntry& kernel = a.get("fuse1.w");
  REQUIRE(kernel.count() >= 10000);
  const double fan_in = kernel.shape[0] * kernel.shape[1] * kernel.shape[2];
  double mean = 0.0;
  for (const float v : kernel.values) mean += v;
  mean /= double(kernel.count());
  double var = 0.0;
  for (const float v : kernel.values) var += (v - mean) * (v - mean);
  var /= double(kernel.count());
  CHECK(var == doctest::Approx(2.0 / fan_in).epsilon(0.10));

  for (const auto& entry : a.entries) {
    if (entry.shape.size() != 1) continue;
    for (const float v : entry.values) REQUIRE(v == 0.0f);
  }
}

TEST_CASE("decompose emits (0,1) outputs of the input size") {
  const WeightStore weights = unet_init(decomposer_config(), 3);
  const ImageTensor scene = random_image(32, 24, 3, 5);
  const auto [r, i] = decompose(weights, scene);
  REQUIRE(r.tensor.h == 32);
  REQUIRE(r.tensor.w == 24);
  REQUIRE(r.tensor.c == 3);
  REQUIRE(i.tensor.c == 1);
  for (const float v : r.tensor.data) {
    REQUIRE(v > 0.0f);
    REQUIRE(v < 1.0f);
  }
  for (const float v : i.tensor.data) {
    REQUIRE(v > 0.0f);
    REQUIRE(v < 1.0f);
  }

  const auto [r2, i2] = decompose(weights, scene);
  CHECK(r.tensor.data == r2.tensor.data);
  CHECK(i.tensor.data == i2.tensor.data);
}

TEST_CASE("decompose requires padded input") {
  const WeightStore weights = unet_init(decomposer_config(), 3);
  const ImageTensor odd = random_image(30, 24, 3, 5);
  CHECK_THROWS_AS((void)decompose(weights, odd), ShapeError);
}

TEST_CASE("decompose handles 600x400 via pad_to_multiple") {
  const WeightStore weights = unet_init(decomposer_config(), 3);
  const ImageTensor scene = random_image(400, 600, 3, 9);
  const auto [padded, record] = pad_to_multiple(scene, 8);
  const auto [r, i] = decompose(weights, padded);
  const ImageTensor r_cropped = crop_back({r.tensor, r.color_space}, record);
  CHECK(r_cropped.tensor.h == 400);
  CHECK(r_cropped.tensor.w == 600);
}

TEST_CASE("enhance takes a 4-channel concat and returns 1 channel in (0,1)") {
  const WeightStore weights = unet_init(enhancer_config(), 4);
  const ImageTensor r = random_image(16, 16, 3, 1);
  const ImageTensor i = random_image(16, 16, 1, 2);
  const ImageTensor out = enhance(weights, r, i);
  REQUIRE(out.tensor.c == 1);
  REQUIRE(out.tensor.h == 16);
  for (const float v : out.tensor.data) {
    REQUIRE(v > 0.0f);
    REQUIRE(v < 1.0f);
  }
  const ImageTensor mismatched = random_image(8, 16, 1, 2);
  CHECK_THROWS_AS((void)enhance(weights, r, mismatched), ShapeError);
}

TEST_CASE("da_features preserves spatial size with 64 channels") {
  const WeightStore weights = da_init(DaConfig{}, 11);
  const Tensor f = da_features(weights, random_image(16, 16, 3, 3));
  CHECK(f.h == 16);
  CHECK(f.w == 16);
  CHECK(f.c == 64);
}

TEST_CASE("da receptive field is 9x9") {
  // Two inputs differing at one pixel: outputs may differ only within the
  // 9x9 box around it (four stacked 3x3 convs).
  const WeightStore weights = da_init(DaConfig{}, 13);
  ImageTensor base = random_image(24, 24, 3, 7);
  ImageTensor poked = base;
  poked.tensor.at(12, 12, 1) += 0.25f;
  const Tensor fa = da_features(weights, base);
  const Tensor fb = da_features(weights, poked);
  int max_dy = 0, max_dx = 0;
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x)
      for (int ch = 0; ch < 64; ++ch)
        if (fa.at(y, x, ch) != fb.at(y, x, ch)) {
          max_dy = std::max(max_dy, std::abs(y - 12));
          max_dx = std::max(max_dx, std::abs(x - 12));
        }
  CHECK(max_dy <= 4);
  CHECK(max_dx <= 4);
  CHECK(max_dy + max_dx > 0);  // the perturbation must be visible at all
}

TEST_CASE("zero DA weights give all-zero features") {
  WeightStore weights = da_init(DaConfig{}, 17);
  for (auto& entry : weights.entries)
    std::fill(entry.values.begin(), entry.values.end(), 0.0f);
  const Tensor f = da_features(weights, random_image(8, 8, 3, 3));
  for (const float v : f.data) REQUIRE(v == 0.0f);
}

TEST_CASE("vgg16 feature map shapes follow the architecture") {
  const WeightStore weights = vgg16_init(21);
  const Tensor f64 = vgg16_features(weights, random_image(64, 64, 3, 5));
  CHECK(f64.h == 2);
  CHECK(f64.w == 2);
  CHECK(f64.c == 512);

  const Tensor f = vgg16_features(weights, random_image(32, 64, 3, 5));
  CHECK(f.h == 1);
  CHECK(f.w == 2);
  CHECK(f.c == 512);

  VggConfig early;
  early.feature_layer = 17;  // third pooling stage
  const Tensor f17 =
      vgg16_features(weights, random_image(32, 32, 3, 5), early);
  CHECK(f17.h == 4);
  CHECK(f17.c == 256);
}

TEST_CASE("identical inputs give identical vgg features") {
  const WeightStore weights = vgg16_init(23);
  const ImageTensor img = random_image(32, 32, 3, 9);
  const Tensor a = vgg16_features(weights, img);
  const Tensor b = vgg16_features(weights, img);
  CHECK(a.data == b.data);
}

TEST_CASE("pad_to_multiple mirrors and crop_back inverts") {
  SUBCASE("no-op when divisible") {
    const ImageTensor img = random_image(600, 400, 3, 1);
    const auto [padded, record] = pad_to_multiple(img, 8);
    CHECK(padded.tensor.h == 600);
    CHECK(padded.tensor.w == 400);
  }
  SUBCASE("601x401 -> 608x408 and back") {
    const ImageTensor img = random_image(601, 401, 3, 2);
    const auto [padded, record] = pad_to_multiple(img, 8);
    REQUIRE(padded.tensor.h == 608);
    REQUIRE(padded.tensor.w == 408);
    // mirrored row: row 601 reflects row 600 (edge included convention)
    CHECK(padded.tensor.at(601, 5, 0) == img.tensor.at(600, 5, 0));
    const ImageTensor back = crop_back(padded, record);
    REQUIRE(back.tensor.h == 601);
    REQUIRE(back.tensor.w == 401);
    CHECK(back.tensor.data == img.tensor.data);
  }
  SUBCASE("1x1 -> 8x8") {
    const ImageTensor img = random_image(1, 1, 3, 3);
    const auto [padded, record] = pad_to_multiple(img, 8);
    REQUIRE(padded.tensor.h == 8);
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        REQUIRE(padded.tensor.at(y, x, 0) == img.tensor.at(0, 0, 0));
    CHECK(crop_back(padded, record).tensor.h == 1);
  }
}

TEST_CASE("checkpoint round-trip is bitwise identity") {
  WeightStore store = unet_init(decomposer_config(), 31);
  store.meta["phase"] = "decomposition";
  store.meta["step"] = "123";
  const fs::path path = temp_file("roundtrip.ckpt");
  save_checkpoint(store, path);
  const WeightStore back = load_checkpoint(path);
  REQUIRE(back.entries.size() == store.entries.size());
  for (std::size_t i = 0; i < store.entries.size(); ++i) {
    CHECK(back.entries[i].name == store.entries[i].name);
    CHECK(back.entries[i].shape == store.entries[i].shape);
    CHECK(back.entries[i].values == store.entries[i].values);
  }
  CHECK(back.meta.at("step") == "123");
  fs::remove(path);
}

TEST_CASE("checkpoint detects truncation") {
  WeightStore store = da_init(DaConfig{}, 31);
  const fs::path path = temp_file("truncated.ckpt");
  save_checkpoint(store, path);
  const auto size = fs::file_size(path);
  fs::resize_file(path, size - 64);
  CHECK_THROWS_AS((void)load_checkpoint(path), CheckpointError);
  fs::remove(path);
}

TEST_CASE("checkpoint rejects a corrupt manifest") {
  const fs::path path = temp_file("badmanifest.ckpt");
  {
    std::ofstream out(path, std::ios::binary);
    const char magic[8] = {'L', 'L', 'E', 'C', 'K', 'P', 'T', '1'};
    out.write(magic, 8);
    const std::uint64_t len = 5;
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write("nope!", 5);
  }
  CHECK_THROWS_AS((void)load_checkpoint(path), CheckpointError);
  fs::remove(path);
}

TEST_CASE("loading a decomposer archive into the enhancer fails") {
  WeightStore store = unet_init(decomposer_config(), 77);
  CHECK_THROWS_AS(
      require_arch(store, "arch", enhancer_config().arch_string()),
      IncompatibilityError);
  CHECK_NOTHROW(require_arch(store, "arch",
                             decomposer_config().arch_string()));
}

TEST_CASE("network gradients agree with finite differences on 8x8 inputs") {
  // float64 shadow evaluation of each forward pass; a handful of sampled
  // coordinates per tensor keeps the runtime low. Step 1e-5: at 1e-3 the
  // quadratic truncation term of the central difference, amplified through
  // the conv stack, sits above the 1e-3 relative tolerance (measured
  // ~5e-3); the loss-level checks keep their 1e-3 step since those
  // compositions are piecewise linear.
  Rng rng(1234);
  SUBCASE("decomposer and enhancer") {
    for (const bool enhancer : {false, true}) {
      CAPTURE(enhancer);
      const UNetConfig cfg =
          enhancer ? enhancer_config() : decomposer_config();
      WeightStore init = unet_init(cfg, 55 + enhancer);
      const TensorD x =
          test::rand_tensor(8, 8, cfg.in_channels, rng, 0.05, 0.95);
      std::vector<TensorD> inputs = {x};
      const auto report = test::grad_check(
          inputs,
          [&](GraphD& g, const std::vector<int>& in) {
            const auto params = bind_params(g, init, true);
            return g.mean_all(g.square(unet_forward(g, params, cfg, in[0])));
          },
          1e-5, 32);
      CHECK(report.max_rel_err <= 1e-3);
    }
  }
  SUBCASE("da cnn") {
    const DaConfig cfg;
    WeightStore init = da_init(cfg, 66);
    const TensorD x = test::rand_tensor(8, 8, 3, rng, 0.05, 0.95);
    const auto report = test::grad_check(
        {x},
        [&](GraphD& g, const std::vector<int>& in) {
          const auto params = bind_params(g, init, true);
          return g.mean_all(g.square(da_forward(g, params, cfg, in[0])));
        },
        1e-5, 32);
    CHECK(report.max_rel_err <= 1e-3);
  }
  SUBCASE("vgg16 feature extractor") {
    // At 8x8 the stack is well-defined up to layer 23 (the fourth pooling
    // stage needs at least 16px); the tap position is a config knob.
    WeightStore init = vgg16_init(77);
    VggConfig cfg;
    cfg.feature_layer = 23;
    const TensorD x = test::rand_tensor(8, 8, 3, rng, 0.05, 0.95);
    const auto report = test::grad_check(
        {x},
        [&](GraphD& g, const std::vector<int>& in) {
          const auto params = bind_params(g, init, false);
          return g.mean_all(g.square(vgg16_forward(g, params, cfg, in[0])));
        },
        1e-5, 32);
    CHECK(report.max_rel_err <= 1e-3);
  }
}
