#pragma once

#include <cmath>
#include <cstring>
#include <utility>

namespace lle {

namespace detail {

template <class T>
void im2col(const TensorT<T>& x, int kh, int kw, int stride, int pad, int ho,
            int wo, T* out) {
  const int cin = x.c;
  const int cols = kh * kw * cin;
#pragma omp parallel for schedule(static)
  for (int oy = 0; oy < ho; ++oy) {
    for (int ox = 0; ox < wo; ++ox) {
      T* row = out + (std::size_t(oy) * wo + ox) * cols;
      for (int ky = 0; ky < kh; ++ky) {
        const int iy = oy * stride - pad + ky;
        for (int kx = 0; kx < kw; ++kx) {
          const int ix = ox * stride - pad + kx;
          T* dst = row + (ky * kw + kx) * cin;
          if (iy >= 0 && iy < x.h && ix >= 0 && ix < x.w) {
            const T* src = &x.data[(std::size_t(iy) * x.w + ix) * cin];
            for (int ch = 0; ch < cin; ++ch) dst[ch] = src[ch];
          } else {
            for (int ch = 0; ch < cin; ++ch) dst[ch] = T(0);
          }
        }
      }
    }
  }
}

template <class T>
void col2im_accum(const T* cols, int kh, int kw, int stride, int pad, int ho,
                  int wo, TensorT<T>& gx) {
  const int cin = gx.c;
  const int ncols = kh * kw * cin;
  for (int oy = 0; oy < ho; ++oy) {
    for (int ox = 0; ox < wo; ++ox) {
      const T* row = cols + (std::size_t(oy) * wo + ox) * ncols;
      for (int ky = 0; ky < kh; ++ky) {
        const int iy = oy * stride - pad + ky;
        if (iy < 0 || iy >= gx.h) continue;
        for (int kx = 0; kx < kw; ++kx) {
          const int ix = ox * stride - pad + kx;
          if (ix < 0 || ix >= gx.w) continue;
          T* dst = &gx.data[(std::size_t(iy) * gx.w + ix) * cin];
          const T* src = row + (ky * kw + kx) * cin;
          for (int ch = 0; ch < cin; ++ch) dst[ch] += src[ch];
        }
      }
    }
  }
}

}  // namespace detail

template <class T>
int Graph<T>::make(TensorT<T> value, bool requires_grad, BackwardFn fn) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return int(nodes_.size()) - 1;
}

template <class T>
int Graph<T>::leaf(TensorT<T> value, bool requires_grad) {
  return make(std::move(value), requires_grad, nullptr);
}

template <class T>
TensorT<T>& Graph<T>::gbuf(int id) {
  Node& n = nodes_[id];
  if (!n.grad_alloc) {
    n.grad = TensorT<T>(n.value.h, n.value.w, n.value.c);
    n.grad_alloc = true;
  }
  return n.grad;
}

template <class T>
TensorT<T> Graph<T>::grad_of(int id) const {
  const Node& n = nodes_[id];
  if (n.grad_alloc) return n.grad;
  return TensorT<T>(n.value.h, n.value.w, n.value.c);
}

template <class T>
void Graph<T>::backward(int root) {
  if (nodes_[root].value.size() != 1)
    throw ShapeError("backward: root must be a scalar node");
  gbuf(root).data[0] = T(1);
  for (int id = root; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.grad_alloc || !n.backward) continue;
    n.backward(*this);
    // Leaf gradients stay readable; interior grads and closure buffers are
    // released as soon as they have been consumed.
    n.backward = nullptr;
    n.grad = TensorT<T>();
    n.grad_alloc = false;
  }
}

template <class T>
int Graph<T>::conv2d(int x, int w, int b, int kh, int kw, int stride,
                     int pad) {
  const TensorT<T>& xv = nodes_[x].value;
  const TensorT<T>& wv = nodes_[w].value;
  const TensorT<T>& bv = nodes_[b].value;
  const int cin = xv.c;
  const int cout = wv.w;
  if (wv.h != kh * kw * cin || wv.c != 1)
    throw ShapeError("conv2d: weight shape " + wv.shape_str() +
                     " does not match kernel " + std::to_string(kh) + "x" +
                     std::to_string(kw) + " over " + std::to_string(cin) +
                     " channels");
  if (int(bv.size()) != cout) throw ShapeError("conv2d: bias size mismatch");
  const int ho = (xv.h + 2 * pad - kh) / stride + 1;
  const int wo = (xv.w + 2 * pad - kw) / stride + 1;
  const int M = ho * wo;
  const int K = kh * kw * cin;

  auto cols = std::make_shared<std::vector<T>>(std::size_t(M) * K);
  detail::im2col(xv, kh, kw, stride, pad, ho, wo, cols->data());

  TensorT<T> out(ho, wo, cout);
  simd::gemm<T>(M, cout, K, T(1), cols->data(), K, wv.data.data(), cout, T(0),
                out.data.data(), cout);
  for (int pix = 0; pix < M; ++pix) {
    T* row = &out.data[std::size_t(pix) * cout];
    for (int ch = 0; ch < cout; ++ch) row[ch] += bv.data[ch];
  }

  const bool wants_w = nodes_[w].requires_grad;
  const bool wants_x = nodes_[x].requires_grad;
  const bool wants_b = nodes_[b].requires_grad;
  if (!wants_w) cols.reset();  // frozen nets keep no im2col buffers

  const int id = make(std::move(out), wants_x || wants_w || wants_b, nullptr);
  if (!nodes_[id].requires_grad) return id;

  nodes_[id].backward = [=](Graph& g) mutable {
    const TensorT<T>& go = g.nodes_[id].grad;
    const TensorT<T>& wval = g.nodes_[w].value;
    const TensorT<T>& xval = g.nodes_[x].value;
    if (wants_b) {
      TensorT<T>& gb = g.gbuf(b);
      for (int pix = 0; pix < M; ++pix) {
        const T* row = &go.data[std::size_t(pix) * cout];
        for (int ch = 0; ch < cout; ++ch) gb.data[ch] += row[ch];
      }
    }
    if (wants_w) {
      std::vector<T> colsT(std::size_t(K) * M);
      simd::ref::transpose(M, K, cols->data(), K, colsT.data(), M);
      TensorT<T>& gw = g.gbuf(w);
      simd::gemm<T>(K, cout, M, T(1), colsT.data(), M, go.data.data(), cout,
                    T(1), gw.data.data(), cout);
      cols.reset();
    }
    if (wants_x) {
      std::vector<T> wT(std::size_t(cout) * K);
      simd::ref::transpose(K, cout, wval.data.data(), cout, wT.data(), K);
      std::vector<T> gcols(std::size_t(M) * K);
      simd::gemm<T>(M, K, cout, T(1), go.data.data(), cout, wT.data(), K, T(0),
                    gcols.data(), K);
      TensorT<T>& gx = g.gbuf(x);
      detail::col2im_accum(gcols.data(), kh, kw, stride, pad, ho, wo, gx);
    }
    (void)xval;
  };
  return id;
}

template <class T>
int Graph<T>::leaky_relu(int x, T slope) {
  const TensorT<T>& xv = nodes_[x].value;
  TensorT<T> out(xv.h, xv.w, xv.c);
  simd::lrelu<T>(int(xv.size()), xv.data.data(), slope, out.data.data());
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    const TensorT<T>& xval = g.nodes_[x].value;
    TensorT<T>& gx = g.gbuf(x);
    simd::lrelu_bwd<T>(int(xval.size()), xval.data.data(), slope,
                       go.data.data(), gx.data.data());
  };
  return id;
}

template <class T>
int Graph<T>::relu(int x) {
  return leaky_relu(x, T(0));
}

template <class T>
int Graph<T>::sigmoid(int x) {
  const TensorT<T>& xv = nodes_[x].value;
  TensorT<T> out(xv.h, xv.w, xv.c);
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const T v = xv.data[i];
    if (v >= T(0)) {
      out.data[i] = T(1) / (T(1) + std::exp(-v));
    } else {
      const T e = std::exp(v);
      out.data[i] = e / (T(1) + e);
    }
  }
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    const TensorT<T>& y = g.nodes_[id].value;
    TensorT<T>& gx = g.gbuf(x);
    for (std::size_t i = 0; i < y.size(); ++i)
      gx.data[i] += go.data[i] * y.data[i] * (T(1) - y.data[i]);
  };
  return id;
}

template <class T>
int Graph<T>::upsample_nearest2(int x) {
  const TensorT<T>& xv = nodes_[x].value;
  TensorT<T> out(xv.h * 2, xv.w * 2, xv.c);
  const int c = xv.c;
  for (int y = 0; y < out.h; ++y)
    for (int xx = 0; xx < out.w; ++xx) {
      const T* src = &xv.data[(std::size_t(y / 2) * xv.w + xx / 2) * c];
      T* dst = &out.data[(std::size_t(y) * out.w + xx) * c];
      for (int ch = 0; ch < c; ++ch) dst[ch] = src[ch];
    }
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    TensorT<T>& gx = g.gbuf(x);
    const int cch = gx.c;
    for (int y = 0; y < go.h; ++y)
      for (int xx = 0; xx < go.w; ++xx) {
        const T* src = &go.data[(std::size_t(y) * go.w + xx) * cch];
        T* dst = &gx.data[(std::size_t(y / 2) * gx.w + xx / 2) * cch];
        for (int ch = 0; ch < cch; ++ch) dst[ch] += src[ch];
      }
  };
  return id;
}

template <class T>
int Graph<T>::maxpool2(int x) {
  const TensorT<T>& xv = nodes_[x].value;
  if (xv.h % 2 != 0 || xv.w % 2 != 0)
    throw ShapeError("maxpool2: spatial size must be even, got " +
                     xv.shape_str());
  const int c = xv.c;
  TensorT<T> out(xv.h / 2, xv.w / 2, c);
  auto argmax = std::make_shared<std::vector<std::uint8_t>>(out.size());
  for (int oy = 0; oy < out.h; ++oy)
    for (int ox = 0; ox < out.w; ++ox)
      for (int ch = 0; ch < c; ++ch) {
        T best = xv.at(2 * oy, 2 * ox, ch);
        std::uint8_t which = 0;
        const T cands[3] = {xv.at(2 * oy, 2 * ox + 1, ch),
                            xv.at(2 * oy + 1, 2 * ox, ch),
                            xv.at(2 * oy + 1, 2 * ox + 1, ch)};
        for (int k = 0; k < 3; ++k)
          if (cands[k] > best) {
            best = cands[k];
            which = std::uint8_t(k + 1);
          }
        out.at(oy, ox, ch) = best;
        (*argmax)[(std::size_t(oy) * out.w + ox) * c + ch] = which;
      }
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    TensorT<T>& gx = g.gbuf(x);
    const int cch = gx.c;
    for (int oy = 0; oy < go.h; ++oy)
      for (int ox = 0; ox < go.w; ++ox)
        for (int ch = 0; ch < cch; ++ch) {
          const std::uint8_t which =
              (*argmax)[(std::size_t(oy) * go.w + ox) * cch + ch];
          const int iy = 2 * oy + (which >> 1);
          const int ix = 2 * ox + (which & 1);
          gx.at(iy, ix, ch) += go.at(oy, ox, ch);
        }
  };
  return id;
}

template <class T>
int Graph<T>::concat_c(int a, int b) {
  const TensorT<T>& av = nodes_[a].value;
  const TensorT<T>& bv = nodes_[b].value;
  if (av.h != bv.h || av.w != bv.w)
    throw ShapeError("concat_c: spatial mismatch " + av.shape_str() + " vs " +
                     bv.shape_str());
  TensorT<T> out(av.h, av.w, av.c + bv.c);
  const int ca = av.c, cb = bv.c;
  for (int pix = 0; pix < av.h * av.w; ++pix) {
    T* dst = &out.data[std::size_t(pix) * (ca + cb)];
    const T* pa = &av.data[std::size_t(pix) * ca];
    const T* pb = &bv.data[std::size_t(pix) * cb];
    for (int ch = 0; ch < ca; ++ch) dst[ch] = pa[ch];
    for (int ch = 0; ch < cb; ++ch) dst[ca + ch] = pb[ch];
  }
  const bool req = nodes_[a].requires_grad || nodes_[b].requires_grad;
  const int id = make(std::move(out), req, nullptr);
  if (!req) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    const int npix = go.h * go.w;
    if (g.nodes_[a].requires_grad) {
      TensorT<T>& ga = g.gbuf(a);
      for (int pix = 0; pix < npix; ++pix) {
        const T* src = &go.data[std::size_t(pix) * (ca + cb)];
        T* dst = &ga.data[std::size_t(pix) * ca];
        for (int ch = 0; ch < ca; ++ch) dst[ch] += src[ch];
      }
    }
    if (g.nodes_[b].requires_grad) {
      TensorT<T>& gb = g.gbuf(b);
      for (int pix = 0; pix < npix; ++pix) {
        const T* src = &go.data[std::size_t(pix) * (ca + cb)];
        T* dst = &gb.data[std::size_t(pix) * cb];
        for (int ch = 0; ch < cb; ++ch) dst[ch] += src[ca + ch];
      }
    }
  };
  return id;
}

template <class T>
int Graph<T>::slice_c(int x, int c0, int c1) {
  const TensorT<T>& xv = nodes_[x].value;
  if (c0 < 0 || c1 > xv.c || c0 >= c1)
    throw ShapeError("slice_c: bad channel range");
  const int cs = c1 - c0;
  TensorT<T> out(xv.h, xv.w, cs);
  for (int pix = 0; pix < xv.h * xv.w; ++pix) {
    const T* src = &xv.data[std::size_t(pix) * xv.c + c0];
    T* dst = &out.data[std::size_t(pix) * cs];
    for (int ch = 0; ch < cs; ++ch) dst[ch] = src[ch];
  }
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  const int cx = xv.c;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    TensorT<T>& gx = g.gbuf(x);
    for (int pix = 0; pix < go.h * go.w; ++pix) {
      const T* src = &go.data[std::size_t(pix) * cs];
      T* dst = &gx.data[std::size_t(pix) * cx + c0];
      for (int ch = 0; ch < cs; ++ch) dst[ch] += src[ch];
    }
  };
  return id;
}

template <class T>
int Graph<T>::add(int a, int b) {
  const TensorT<T>& av = nodes_[a].value;
  const TensorT<T>& bv = nodes_[b].value;
  require_same_shape(av, bv, "add");
  TensorT<T> out(av.h, av.w, av.c);
  for (std::size_t i = 0; i < av.size(); ++i)
    out.data[i] = av.data[i] + bv.data[i];
  const bool req = nodes_[a].requires_grad || nodes_[b].requires_grad;
  const int id = make(std::move(out), req, nullptr);
  if (!req) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    if (g.nodes_[a].requires_grad) {
      TensorT<T>& ga = g.gbuf(a);
      for (std::size_t i = 0; i < go.size(); ++i) ga.data[i] += go.data[i];
    }
    if (g.nodes_[b].requires_grad) {
      TensorT<T>& gb = g.gbuf(b);
      for (std::size_t i = 0; i < go.size(); ++i) gb.data[i] += go.data[i];
    }
  };
  return id;
}

template <class T>
int Graph<T>::sub(int a, int b) {
  const TensorT<T>& av = nodes_[a].value;
  const TensorT<T>& bv = nodes_[b].value;
  require_same_shape(av, bv, "sub");
  TensorT<T> out(av.h, av.w, av.c);
  for (std::size_t i = 0; i < av.size(); ++i)
    out.data[i] = av.data[i] - bv.data[i];
  const bool req = nodes_[a].requires_grad || nodes_[b].requires_grad;
  const int id = make(std::move(out), req, nullptr);
  if (!req) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    if (g.nodes_[a].requires_grad) {
      TensorT<T>& ga = g.gbuf(a);
      for (std::size_t i = 0; i < go.size(); ++i) ga.data[i] += go.data[i];
    }
    if (g.nodes_[b].requires_grad) {
      TensorT<T>& gb = g.gbuf(b);
      for (std::size_t i = 0; i < go.size(); ++i) gb.data[i] -= go.data[i];
    }
  };
  return id;
}

template <class T>
int Graph<T>::mul(int a, int b) {
  const TensorT<T>& av = nodes_[a].value;
  const TensorT<T>& bv = nodes_[b].value;
  if (av.h != bv.h || av.w != bv.w)
    throw ShapeError("mul: spatial mismatch " + av.shape_str() + " vs " +
                     bv.shape_str());
  if (av.c != bv.c && av.c != 1 && bv.c != 1)
    throw ShapeError("mul: incompatible channel counts");
  const int co = std::max(av.c, bv.c);
  const int npix = av.h * av.w;
  TensorT<T> out(av.h, av.w, co);
  for (int pix = 0; pix < npix; ++pix) {
    const T* pa = &av.data[std::size_t(pix) * av.c];
    const T* pb = &bv.data[std::size_t(pix) * bv.c];
    T* dst = &out.data[std::size_t(pix) * co];
    for (int ch = 0; ch < co; ++ch)
      dst[ch] = pa[av.c == 1 ? 0 : ch] * pb[bv.c == 1 ? 0 : ch];
  }
  const bool req = nodes_[a].requires_grad || nodes_[b].requires_grad;
  const int id = make(std::move(out), req, nullptr);
  if (!req) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    const TensorT<T>& aval = g.nodes_[a].value;
    const TensorT<T>& bval = g.nodes_[b].value;
    if (g.nodes_[a].requires_grad) {
      TensorT<T>& ga = g.gbuf(a);
      for (int pix = 0; pix < npix; ++pix) {
        const T* gout = &go.data[std::size_t(pix) * co];
        const T* pb = &bval.data[std::size_t(pix) * bval.c];
        T* dst = &ga.data[std::size_t(pix) * aval.c];
        for (int ch = 0; ch < co; ++ch)
          dst[aval.c == 1 ? 0 : ch] += gout[ch] * pb[bval.c == 1 ? 0 : ch];
      }
    }
    if (g.nodes_[b].requires_grad) {
      TensorT<T>& gb = g.gbuf(b);
      for (int pix = 0; pix < npix; ++pix) {
        const T* gout = &go.data[std::size_t(pix) * co];
        const T* pa = &aval.data[std::size_t(pix) * aval.c];
        T* dst = &gb.data[std::size_t(pix) * bval.c];
        for (int ch = 0; ch < co; ++ch)
          dst[bval.c == 1 ? 0 : ch] += gout[ch] * pa[aval.c == 1 ? 0 : ch];
      }
    }
  };
  return id;
}

template <class T>
int Graph<T>::scale(int x, T s) {
  const TensorT<T>& xv = nodes_[x].value;
  TensorT<T> out(xv.h, xv.w, xv.c);
  for (std::size_t i = 0; i < xv.size(); ++i) out.data[i] = s * xv.data[i];
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    TensorT<T>& gx = g.gbuf(x);
    for (std::size_t i = 0; i < go.size(); ++i) gx.data[i] += s * go.data[i];
  };
  return id;
}

template <class T>
int Graph<T>::abs(int x) {
  const TensorT<T>& xv = nodes_[x].value;
  TensorT<T> out(xv.h, xv.w, xv.c);
  for (std::size_t i = 0; i < xv.size(); ++i)
    out.data[i] = std::abs(xv.data[i]);
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    const TensorT<T>& xval = g.nodes_[x].value;
    TensorT<T>& gx = g.gbuf(x);
    for (std::size_t i = 0; i < go.size(); ++i) {
      const T v = xval.data[i];
      const T sign = v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0));
      gx.data[i] += sign * go.data[i];
    }
  };
  return id;
}

template <class T>
int Graph<T>::square(int x) {
  const TensorT<T>& xv = nodes_[x].value;
  TensorT<T> out(xv.h, xv.w, xv.c);
  for (std::size_t i = 0; i < xv.size(); ++i)
    out.data[i] = xv.data[i] * xv.data[i];
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    const TensorT<T>& xval = g.nodes_[x].value;
    TensorT<T>& gx = g.gbuf(x);
    for (std::size_t i = 0; i < go.size(); ++i)
      gx.data[i] += T(2) * xval.data[i] * go.data[i];
  };
  return id;
}

template <class T>
int Graph<T>::exp(int x) {
  const TensorT<T>& xv = nodes_[x].value;
  TensorT<T> out(xv.h, xv.w, xv.c);
  for (std::size_t i = 0; i < xv.size(); ++i)
    out.data[i] = std::exp(xv.data[i]);
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    const TensorT<T>& y = g.nodes_[id].value;
    TensorT<T>& gx = g.gbuf(x);
    for (std::size_t i = 0; i < go.size(); ++i)
      gx.data[i] += y.data[i] * go.data[i];
  };
  return id;
}

template <class T>
int Graph<T>::grad_h(int x) {
  const TensorT<T>& xv = nodes_[x].value;
  TensorT<T> out(xv.h, xv.w, xv.c);
  const int c = xv.c;
  for (int y = 0; y < xv.h; ++y)
    for (int xx = 0; xx + 1 < xv.w; ++xx)
      for (int ch = 0; ch < c; ++ch)
        out.at(y, xx, ch) = xv.at(y, xx + 1, ch) - xv.at(y, xx, ch);
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    TensorT<T>& gx = g.gbuf(x);
    for (int y = 0; y < go.h; ++y)
      for (int xx = 0; xx + 1 < go.w; ++xx)
        for (int ch = 0; ch < c; ++ch) {
          const T v = go.at(y, xx, ch);
          gx.at(y, xx + 1, ch) += v;
          gx.at(y, xx, ch) -= v;
        }
  };
  return id;
}

template <class T>
int Graph<T>::grad_v(int x) {
  const TensorT<T>& xv = nodes_[x].value;
  TensorT<T> out(xv.h, xv.w, xv.c);
  const int c = xv.c;
  for (int y = 0; y + 1 < xv.h; ++y)
    for (int xx = 0; xx < xv.w; ++xx)
      for (int ch = 0; ch < c; ++ch)
        out.at(y, xx, ch) = xv.at(y + 1, xx, ch) - xv.at(y, xx, ch);
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    TensorT<T>& gx = g.gbuf(x);
    for (int y = 0; y + 1 < go.h; ++y)
      for (int xx = 0; xx < go.w; ++xx)
        for (int ch = 0; ch < c; ++ch) {
          const T v = go.at(y, xx, ch);
          gx.at(y + 1, xx, ch) += v;
          gx.at(y, xx, ch) -= v;
        }
  };
  return id;
}

template <class T>
int Graph<T>::channel_mean(int x) {
  const TensorT<T>& xv = nodes_[x].value;
  const int c = xv.c;
  TensorT<T> out(xv.h, xv.w, 1);
  for (int pix = 0; pix < xv.h * xv.w; ++pix) {
    T s = T(0);
    const T* src = &xv.data[std::size_t(pix) * c];
    for (int ch = 0; ch < c; ++ch) s += src[ch];
    out.data[pix] = s / T(c);
  }
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    TensorT<T>& gx = g.gbuf(x);
    for (int pix = 0; pix < go.h * go.w; ++pix) {
      const T v = go.data[pix] / T(c);
      T* dst = &gx.data[std::size_t(pix) * c];
      for (int ch = 0; ch < c; ++ch) dst[ch] += v;
    }
  };
  return id;
}

template <class T>
int Graph<T>::mean_all(int x) {
  const TensorT<T>& xv = nodes_[x].value;
  const std::size_t n = xv.size();
  TensorT<T> out(1, 1, 1);
  out.data[0] = simd::sum<T>(int(n), xv.data.data()) / T(n);
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=](Graph& g) {
    const T v = g.nodes_[id].grad.data[0] / T(n);
    TensorT<T>& gx = g.gbuf(x);
    for (std::size_t i = 0; i < n; ++i) gx.data[i] += v;
  };
  return id;
}

template <class T>
int Graph<T>::detach(int x) {
  return make(nodes_[x].value, false, nullptr);
}

template <class T>
int Graph<T>::affine_c(int x, std::vector<T> mul_c, std::vector<T> add_c) {
  const TensorT<T>& xv = nodes_[x].value;
  if (int(mul_c.size()) != xv.c || int(add_c.size()) != xv.c)
    throw ShapeError("affine_c: coefficient count mismatch");
  TensorT<T> out(xv.h, xv.w, xv.c);
  const int c = xv.c;
  for (int pix = 0; pix < xv.h * xv.w; ++pix) {
    const T* src = &xv.data[std::size_t(pix) * c];
    T* dst = &out.data[std::size_t(pix) * c];
    for (int ch = 0; ch < c; ++ch) dst[ch] = src[ch] * mul_c[ch] + add_c[ch];
  }
  const int id = make(std::move(out), nodes_[x].requires_grad, nullptr);
  if (!nodes_[id].requires_grad) return id;
  nodes_[id].backward = [=, mc = std::move(mul_c)](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    TensorT<T>& gx = g.gbuf(x);
    for (int pix = 0; pix < go.h * go.w; ++pix) {
      const T* src = &go.data[std::size_t(pix) * c];
      T* dst = &gx.data[std::size_t(pix) * c];
      for (int ch = 0; ch < c; ++ch) dst[ch] += src[ch] * mc[ch];
    }
  };
  return id;
}

template <class T>
int Graph<T>::weighted_sum(const std::vector<std::pair<int, T>>& terms) {
  if (terms.empty()) throw ShapeError("weighted_sum: no terms");
  const TensorT<T>& first = nodes_[terms[0].first].value;
  TensorT<T> out(first.h, first.w, first.c);
  bool req = false;
  for (const auto& [tid, wgt] : terms) {
    const TensorT<T>& tv = nodes_[tid].value;
    require_same_shape(first, tv, "weighted_sum");
    for (std::size_t i = 0; i < tv.size(); ++i) out.data[i] += wgt * tv.data[i];
    req = req || nodes_[tid].requires_grad;
  }
  const int id = make(std::move(out), req, nullptr);
  if (!req) return id;
  nodes_[id].backward = [=, ts = terms](Graph& g) {
    const TensorT<T>& go = g.nodes_[id].grad;
    for (const auto& [tid, wgt] : ts) {
      if (!g.nodes_[tid].requires_grad) continue;
      TensorT<T>& gt = g.gbuf(tid);
      for (std::size_t i = 0; i < go.size(); ++i)
        gt.data[i] += wgt * go.data[i];
    }
  };
  return id;
}

}  // namespace lle
