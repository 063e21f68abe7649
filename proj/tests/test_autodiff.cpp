#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lle/core/graph.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace lle;
using test::grad_check;
using test::jagged_tensor;
using test::rand_tensor;

namespace {

constexpr double kTol = 1e-3;

TensorD rand_conv_weight(int kh, int kw, int cin, int cout, Rng& rng) {
  TensorD w(kh * kw * cin, cout, 1);
  for (auto& v : w.data) v = 0.5 * (2.0 * rng.uniform() - 1.0);
  return w;
}

}  // namespace

TEST_CASE("conv2d forward matches the naive convolution") {
  Rng rng(3);
  for (const int stride : {1, 2}) {
    const TensorD x = rand_tensor(8, 10, 3, rng, -1.0, 1.0);
    const TensorD w = rand_conv_weight(3, 3, 3, 5, rng);
    TensorD b(1, 1, 5);
    for (auto& v : b.data) v = rng.uniform();

    GraphD g;
    const int xid = g.leaf(x);
    const int wid = g.leaf(w);
    const int bid = g.leaf(b);
    const int out = g.conv2d(xid, wid, bid, 3, 3, stride, 1);

    const TensorD want =
        test::conv2d_naive(x, w, b.data, 3, 3, stride, 1);
    REQUIRE(g.val(out).same_shape(want));
    for (std::size_t i = 0; i < want.size(); ++i)
      REQUIRE(g.val(out).data[i] == doctest::Approx(want.data[i]).epsilon(1e-9));
  }
}

TEST_CASE("conv2d gradients pass the finite-difference check") {
  Rng rng(5);
  for (const int stride : {1, 2}) {
    CAPTURE(stride);
    const TensorD x = rand_tensor(6, 6, 2, rng, -1.0, 1.0);
    const TensorD w = rand_conv_weight(3, 3, 2, 3, rng);
    const TensorD b = rand_tensor(1, 1, 3, rng, -0.5, 0.5);
    const auto report = grad_check(
        {x, w, b},
        [&](GraphD& g, const std::vector<int>& in) {
          return g.mean_all(
              g.square(g.conv2d(in[0], in[1], in[2], 3, 3, stride, 1)));
        });
    CHECK(report.max_rel_err <= kTol);
  }
}

TEST_CASE("elementwise and shape ops pass the finite-difference check") {
  Rng rng(7);
  const TensorD a = rand_tensor(6, 5, 3, rng, 0.1, 0.9);
  const TensorD b = rand_tensor(6, 5, 3, rng, 1.1, 1.9);  // margin from a
  const TensorD i1 = rand_tensor(6, 5, 1, rng, 0.2, 0.8);

  SUBCASE("add/sub/mul/scale") {
    const auto report = grad_check({a, b}, [](GraphD& g, const auto& in) {
      const int s = g.sub(g.add(in[0], in[1]), g.scale(in[1], 0.3));
      return g.mean_all(g.square(g.mul(s, in[0])));
    });
    CHECK(report.max_rel_err <= kTol);
  }
  SUBCASE("broadcast mul 3ch x 1ch") {
    const auto report = grad_check({a, i1}, [](GraphD& g, const auto& in) {
      return g.mean_all(g.square(g.mul(in[0], in[1])));
    });
    CHECK(report.max_rel_err <= kTol);
  }
  SUBCASE("abs with margin") {
    const auto report = grad_check({a, b}, [](GraphD& g, const auto& in) {
      return g.mean_all(g.abs(g.sub(in[0], in[1])));
    });
    CHECK(report.max_rel_err <= kTol);
  }
  SUBCASE("exp and sigmoid") {
    const auto report = grad_check({a}, [](GraphD& g, const auto& in) {
      return g.mean_all(g.mul(g.exp(g.scale(in[0], -2.0)), g.sigmoid(in[0])));
    });
    CHECK(report.max_rel_err <= kTol);
  }
  SUBCASE("leaky_relu off the kink") {
    TensorD shifted = a;
    for (auto& v : shifted.data) v += v > 0.5 ? 0.5 : -1.5;  // |v| >= ~0.1
    const auto report = grad_check({shifted}, [](GraphD& g, const auto& in) {
      return g.mean_all(g.square(g.leaky_relu(in[0], 0.2)));
    });
    CHECK(report.max_rel_err <= kTol);
  }
  SUBCASE("concat and slice") {
    const auto report = grad_check({a, i1}, [](GraphD& g, const auto& in) {
      const int cat = g.concat_c(in[0], in[1]);
      return g.mean_all(g.square(g.slice_c(cat, 1, 4)));
    });
    CHECK(report.max_rel_err <= kTol);
  }
  SUBCASE("channel_mean and affine_c") {
    const auto report = grad_check({a}, [](GraphD& g, const auto& in) {
      const int norm = g.affine_c(in[0], {2.0, 3.0, 4.0}, {0.1, -0.2, 0.3});
      return g.mean_all(g.square(g.channel_mean(norm)));
    });
    CHECK(report.max_rel_err <= kTol);
  }
  SUBCASE("grad_h and grad_v") {
    const TensorD jag = jagged_tensor(6, 5, 2, rng);
    const auto report = grad_check({jag}, [](GraphD& g, const auto& in) {
      return g.add(g.mean_all(g.square(g.grad_h(in[0]))),
                   g.mean_all(g.square(g.grad_v(in[0]))));
    });
    CHECK(report.max_rel_err <= kTol);
  }
  SUBCASE("weighted_sum") {
    const auto report = grad_check({a, b}, [](GraphD& g, const auto& in) {
      const int s1 = g.mean_all(g.square(in[0]));
      const int s2 = g.mean_all(g.square(in[1]));
      return g.weighted_sum({{s1, 0.25}, {s2, 1.75}});
    });
    CHECK(report.max_rel_err <= kTol);
  }
}

TEST_CASE("upsample and maxpool gradients") {
  Rng rng(11);
  const TensorD x = rand_tensor(6, 6, 2, rng, -1.0, 1.0);
  SUBCASE("upsample_nearest2") {
    const auto report = grad_check({x}, [](GraphD& g, const auto& in) {
      return g.mean_all(g.square(g.upsample_nearest2(in[0])));
    });
    CHECK(report.max_rel_err <= kTol);
  }
  SUBCASE("maxpool2") {
    const auto report = grad_check({x}, [](GraphD& g, const auto& in) {
      return g.mean_all(g.square(g.maxpool2(in[0])));
    });
    CHECK(report.max_rel_err <= kTol);
  }
}

TEST_CASE("maxpool forward picks window maxima") {
  GraphD g;
  TensorD x(2, 4, 1);
  x.data = {1, 5, 2, 0, 3, -1, 8, 4};
  const int out = g.maxpool2(g.leaf(x));
  REQUIRE(g.val(out).h == 1);
  REQUIRE(g.val(out).w == 2);
  CHECK(g.val(out).data[0] == 5);
  CHECK(g.val(out).data[1] == 8);
}

TEST_CASE("detach blocks gradient flow") {
  Rng rng(13);
  const TensorD a = rand_tensor(4, 4, 1, rng);
  GraphD g;
  const int leaf = g.leaf(a, true);
  const int loss =
      g.mean_all(g.square(g.sub(g.detach(leaf), g.scale(leaf, 0.0))));
  g.backward(loss);
  const TensorD grad = g.grad_of(leaf);
  for (const double v : grad.data) CHECK(v == 0.0);
}

TEST_CASE("forward passes are pure") {
  Rng rng(17);
  const TensorD x = rand_tensor(8, 8, 3, rng);
  const TensorD w = rand_conv_weight(3, 3, 3, 4, rng);
  const TensorD b = rand_tensor(1, 1, 4, rng);
  auto run = [&] {
    GraphD g;
    return g.val(
        g.sigmoid(g.conv2d(g.leaf(x), g.leaf(w), g.leaf(b), 3, 3, 1, 1)));
  };
  const TensorD first = run();
  const TensorD second = run();
  CHECK(first.data == second.data);
}

TEST_CASE("frozen weights receive no gradient and no buffers") {
  Rng rng(19);
  const TensorD x = rand_tensor(8, 8, 2, rng);
  const TensorD w = rand_conv_weight(3, 3, 2, 2, rng);
  const TensorD b = rand_tensor(1, 1, 2, rng);
  GraphD g;
  const int xid = g.leaf(x, true);
  const int wid = g.leaf(w, false);
  const int bid = g.leaf(b, false);
  const int loss = g.mean_all(g.square(g.conv2d(xid, wid, bid, 3, 3, 1, 1)));
  g.backward(loss);
  const TensorD gw = g.grad_of(wid);
  for (const double v : gw.data) CHECK(v == 0.0);
  const TensorD gx = g.grad_of(xid);
  double norm = 0;
  for (const double v : gx.data) norm += v * v;
  CHECK(norm > 0.0);
}
