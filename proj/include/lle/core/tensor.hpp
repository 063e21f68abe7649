#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lle/core/errors.hpp"

namespace lle {

// Dense H x W x C array, row-major with interleaved channels (HWC).
// Network parameters reuse the same container with their own shape
// conventions (conv kernels are stored as a [kh*kw*cin] x [cout] matrix,
// h = kh*kw*cin, w = cout, c = 1).
template <class T>
struct TensorT {
  int h = 0, w = 0, c = 0;
  std::vector<T> data;

  TensorT() = default;
  TensorT(int h_, int w_, int c_)
      : h(h_), w(w_), c(c_), data(std::size_t(h_) * w_ * c_, T(0)) {}

  static TensorT full(int h, int w, int c, T value) {
    TensorT t(h, w, c);
    std::fill(t.data.begin(), t.data.end(), value);
    return t;
  }

  std::size_t size() const { return data.size(); }

  T& at(int y, int x, int ch) {
    return data[(std::size_t(y) * w + x) * c + ch];
  }
  T at(int y, int x, int ch) const {
    return data[(std::size_t(y) * w + x) * c + ch];
  }

  bool same_shape(const TensorT& o) const {
    return h == o.h && w == o.w && c == o.c;
  }

  std::string shape_str() const {
    return std::to_string(h) + "x" + std::to_string(w) + "x" +
           std::to_string(c);
  }

  bool all_finite() const {
    for (const T v : data)
      if (!std::isfinite(double(v))) return false;
    return true;
  }
};

using Tensor = TensorT<float>;
using TensorD = TensorT<double>;

template <class To, class From>
TensorT<To> tensor_cast(const TensorT<From>& src) {
  TensorT<To> out(src.h, src.w, src.c);
  for (std::size_t i = 0; i < src.data.size(); ++i)
    out.data[i] = To(src.data[i]);
  return out;
}

template <class T>
void require_same_shape(const TensorT<T>& a, const TensorT<T>& b,
                        const char* where) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(where) + ": shape mismatch " + a.shape_str() +
                     " vs " + b.shape_str());
}

}  // namespace lle
