#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lle/core/errors.hpp"
#include "lle/metrics/metrics.hpp"
#include "support/oracles.hpp"

using namespace lle;

namespace {

ImageTensor rand_image(int h, int w, std::uint64_t seed, float lo = 0.0f,
                       float hi = 1.0f) {
  ImageTensor img;
  img.tensor = Tensor(h, w, 3);
  Rng rng(seed);
  for (auto& v : img.tensor.data) v = lo + (hi - lo) * float(rng.uniform());
  return img;
}

ImageTensor uniform_image(int h, int w, float r, float g, float b) {
  ImageTensor img;
  img.tensor = Tensor(h, w, 3);
  for (int pix = 0; pix < h * w; ++pix) {
    img.tensor.data[std::size_t(pix) * 3 + 0] = r;
    img.tensor.data[std::size_t(pix) * 3 + 1] = g;
    img.tensor.data[std::size_t(pix) * 3 + 2] = b;
  }
  return img;
}

// Published CIEDE2000 verification dataset (34 pairs with four-decimal
// reference values).
struct CiedeCase {
  double lab1[3];
  double lab2[3];
  double want;
};
const CiedeCase kCiedeCases[34] = {
    {{50.0000, 2.6772, -79.7751}, {50.0000, 0.0000, -82.7485}, 2.0425},
    {{50.0000, 3.1571, -77.2803}, {50.0000, 0.0000, -82.7485}, 2.8615},
    {{50.0000, 2.8361, -74.0200}, {50.0000, 0.0000, -82.7485}, 3.4412},
    {{50.0000, -1.3802, -84.2814}, {50.0000, 0.0000, -82.7485}, 1.0000},
    {{50.0000, -1.1848, -84.8006}, {50.0000, 0.0000, -82.7485}, 1.0000},
    {{50.0000, -0.9009, -85.5211}, {50.0000, 0.0000, -82.7485}, 1.0000},
    {{50.0000, 0.0000, 0.0000}, {50.0000, -1.0000, 2.0000}, 2.3669},
    {{50.0000, -1.0000, 2.0000}, {50.0000, 0.0000, 0.0000}, 2.3669},
    {{50.0000, 2.4900, -0.0010}, {50.0000, -2.4900, 0.0009}, 7.1792},
    {{50.0000, 2.4900, -0.0010}, {50.0000, -2.4900, 0.0010}, 7.1792},
    {{50.0000, 2.4900, -0.0010}, {50.0000, -2.4900, 0.0011}, 7.2195},
    {{50.0000, 2.4900, -0.0010}, {50.0000, -2.4900, 0.0012}, 7.2195},
    {{50.0000, -0.0010, 2.4900}, {50.0000, 0.0009, -2.4900}, 4.8045},
    {{50.0000, -0.0010, 2.4900}, {50.0000, 0.0010, -2.4900}, 4.8045},
    {{50.0000, -0.0010, 2.4900}, {50.0000, 0.0011, -2.4900}, 4.7461},
    {{50.0000, 2.5000, 0.0000}, {50.0000, 0.0000, -2.5000}, 4.3065},
    {{50.0000, 2.5000, 0.0000}, {73.0000, 25.0000, -18.0000}, 27.1492},
    {{50.0000, 2.5000, 0.0000}, {61.0000, -5.0000, 29.0000}, 22.8977},
    {{50.0000, 2.5000, 0.0000}, {56.0000, -27.0000, -3.0000}, 31.9030},
    {{50.0000, 2.5000, 0.0000}, {58.0000, 24.0000, 15.0000}, 19.4535},
    {{50.0000, 2.5000, 0.0000}, {50.0000, 3.1736, 0.5854}, 1.0000},
    {{50.0000, 2.5000, 0.0000}, {50.0000, 3.2972, 0.0000}, 1.0000},
    {{50.0000, 2.5000, 0.0000}, {50.0000, 1.8634, 0.5757}, 1.0000},
    {{50.0000, 2.5000, 0.0000}, {50.0000, 3.2592, 0.3350}, 1.0000},
    {{60.2574, -34.0099, 36.2677}, {60.4626, -34.1751, 39.4387}, 1.2644},
    {{63.0109, -31.0961, -5.8663}, {62.8187, -29.7946, -4.0864}, 1.2630},
    {{61.2901, 3.7196, -5.3901}, {61.4292, 2.2480, -4.9620}, 1.8731},
    {{35.0831, -44.1164, 3.7933}, {35.0232, -40.0716, 1.5901}, 1.8645},
    {{22.7233, 20.0904, -46.6940}, {23.0331, 14.9730, -42.5619}, 2.0373},
    {{36.4612, 47.8580, 18.3852}, {36.2715, 50.5065, 21.2231}, 1.4146},
    {{90.8027, -2.0831, 1.4410}, {91.1528, -1.6435, 0.0447}, 1.4441},
    {{90.9257, -0.5406, -0.9208}, {88.6381, -0.8985, -0.7239}, 1.5381},
    {{6.7747, -0.2908, -2.4247}, {5.8714, -0.0985, -2.2286}, 0.6377},
    {{2.0776, 0.0795, -1.1350}, {0.9033, -0.0636, -0.5514}, 0.9082},
};

}  // namespace

TEST_CASE("psnr closed forms") {
  const ImageTensor a = rand_image(16, 16, 1);
  CHECK(psnr(a, a) == 100.0);

  ImageTensor b = uniform_image(16, 16, 0.5f, 0.5f, 0.5f);
  ImageTensor c = uniform_image(16, 16, 0.6f, 0.6f, 0.6f);
  CHECK(psnr(c, b) == doctest::Approx(20.0).epsilon(1e-5));

  // more error never increases PSNR
  ImageTensor d = uniform_image(16, 16, 0.7f, 0.7f, 0.7f);
  CHECK(psnr(d, b) < psnr(c, b));

  ImageTensor wrong;
  wrong.tensor = Tensor(8, 8, 3);
  CHECK_THROWS_AS((void)psnr(wrong, b), ShapeError);
}

TEST_CASE("ssim identity, anticorrelation, and reference agreement") {
  const ImageTensor a = rand_image(32, 32, 7);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));

  // high-contrast checkerboard vs its inverse
  ImageTensor pat = uniform_image(32, 32, 0.0f, 0.0f, 0.0f);
  ImageTensor inv = uniform_image(32, 32, 0.0f, 0.0f, 0.0f);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      for (int ch = 0; ch < 3; ++ch) {
        const float v = ((x / 4 + y / 4) % 2 == 0) ? 1.0f : 0.0f;
        pat.tensor.at(y, x, ch) = v;
        inv.tensor.at(y, x, ch) = 1.0f - v;
      }
  CHECK(ssim(pat, inv) < 0.5);

  for (int trial = 0; trial < 50; ++trial) {
    const ImageTensor x = rand_image(32, 32, 100 + trial);
    const ImageTensor y = rand_image(32, 32, 200 + trial);
    CHECK(ssim(x, y) ==
          doctest::Approx(test::ssim_naive(x.tensor, y.tensor)).epsilon(1e-4));
  }

  // symmetry
  const ImageTensor x = rand_image(32, 32, 500);
  const ImageTensor y = rand_image(32, 32, 501);
  CHECK(ssim(x, y) == doctest::Approx(ssim(y, x)).epsilon(1e-12));
}

TEST_CASE("ssim rejects images smaller than the window") {
  CHECK_THROWS_AS((void)ssim(rand_image(8, 8, 1), rand_image(8, 8, 2)),
                  ShapeError);
}

TEST_CASE("ciede2000 passes all 34 published verification pairs") {
  for (int i = 0; i < 34; ++i) {
    CAPTURE(i);
    const auto& c = kCiedeCases[std::size_t(i)];
    CHECK(std::abs(ciede2000(c.lab1, c.lab2) - c.want) <= 1e-4);
  }
}

TEST_CASE("delta_e2000 identity and symmetry") {
  const ImageTensor a = rand_image(16, 16, 3);
  const ImageTensor b = rand_image(16, 16, 4);
  CHECK(delta_e2000(a, a) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(delta_e2000(a, b) == doctest::Approx(delta_e2000(b, a)).epsilon(1e-9));
  CHECK(delta_e2000(a, b) > 0.0);
}

TEST_CASE("angular error trivial cases") {
  const ImageTensor a = rand_image(8, 8, 5, 0.1f, 1.0f);
  const AngularErrorResult same = angular_error(a, a);
  CHECK(same.mean_deg == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(same.median_deg == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(same.avg_deg == doctest::Approx(0.0).epsilon(1e-5));

  const ImageTensor red = uniform_image(1, 1, 1.0f, 0.0f, 0.0f);
  const ImageTensor green = uniform_image(1, 1, 0.0f, 1.0f, 0.0f);
  const AngularErrorResult ortho = angular_error(red, green);
  CHECK(ortho.mean_deg == doctest::Approx(90.0).epsilon(1e-9));
  CHECK(ortho.median_deg == doctest::Approx(90.0).epsilon(1e-9));
  CHECK(ortho.avg_deg == doctest::Approx(90.0).epsilon(1e-9));

  // scale invariance
  ImageTensor scaled = a;
  for (auto& v : scaled.tensor.data) v *= 0.37f;
  const AngularErrorResult scale_inv = angular_error(scaled, a);
  CHECK(scale_inv.mean_deg == doctest::Approx(0.0).epsilon(1e-4));

  // symmetry
  const ImageTensor b = rand_image(8, 8, 6, 0.1f, 1.0f);
  CHECK(angular_error(a, b).mean_deg ==
        doctest::Approx(angular_error(b, a).mean_deg).epsilon(1e-9));

  // all-black pair excludes every pixel
  const ImageTensor black = uniform_image(4, 4, 0.0f, 0.0f, 0.0f);
  CHECK_THROWS_AS((void)angular_error(black, black), DegenerateInputError);
}

TEST_CASE("colorfulness oracles") {
  CHECK(colorfulness(uniform_image(8, 8, 0.42f, 0.42f, 0.42f)) ==
        doctest::Approx(0.0).epsilon(1e-9));

  // two-pixel hand case: {(255,0,0), (0,255,0)} -> 293.25
  ImageTensor two;
  two.tensor = Tensor(1, 2, 3);
  two.tensor.at(0, 0, 0) = 1.0f;
  two.tensor.at(0, 1, 1) = 1.0f;
  CHECK(colorfulness(two) == doctest::Approx(293.25).epsilon(1e-9));

  ImageTensor gray;
  gray.tensor = Tensor(8, 8, 1);
  CHECK_THROWS_AS((void)colorfulness(gray), ShapeError);
}

TEST_CASE("secondary metrics closed forms and reference agreement") {
  const ImageTensor a = rand_image(32, 32, 9);
  const SecondaryMetrics ident = secondary_full_reference(a, a);
  CHECK(ident.rmse == 0.0);
  CHECK(ident.uqi == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ident.sam_deg == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(ident.srer_db == 100.0);

  const ImageTensor half = uniform_image(16, 16, 0.5f, 0.5f, 0.5f);
  const ImageTensor six = uniform_image(16, 16, 0.6f, 0.6f, 0.6f);
  const SecondaryMetrics uniform = secondary_full_reference(six, half);
  CHECK(uniform.rmse == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(uniform.srer_db ==
        doctest::Approx(10.0 * std::log10(0.25 / 0.01)).epsilon(1e-6));

  for (int trial = 0; trial < 50; ++trial) {
    const ImageTensor x = rand_image(32, 32, 300 + trial);
    const ImageTensor y = rand_image(32, 32, 400 + trial);
    const SecondaryMetrics m = secondary_full_reference(x, y);
    CHECK(m.uqi ==
          doctest::Approx(test::uqi_naive(x.tensor, y.tensor)).epsilon(1e-4));
  }
}

TEST_CASE("sam is scale invariant while rmse is not") {
  const ImageTensor gt = rand_image(16, 16, 11, 0.2f, 0.8f);
  ImageTensor scaled = gt;
  for (auto& v : scaled.tensor.data) v *= 1.2f;
  const SecondaryMetrics m = secondary_full_reference(scaled, gt);
  CHECK(m.sam_deg == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(m.rmse > 0.01);
  const AngularErrorResult ang = angular_error(scaled, gt);
  CHECK(ang.mean_deg == doctest::Approx(0.0).epsilon(1e-4));
}
