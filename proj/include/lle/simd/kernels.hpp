#pragma once

// Data-parallel inner-loop kernels. Single-precision entry points are
// dispatched at runtime between a scalar reference implementation and an
// AVX2+FMA implementation; lle::simd::ref holds the templated scalar
// versions that double-precision callers (gradient checking) use directly.
//
// Reductions run over a fixed block decomposition (LLE_REDUCE_BLOCK) and
// combine block partials in index order, so a given build produces
// bit-identical results independent of scheduling.

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace lle::simd {

inline constexpr int kReduceBlock = 4096;

struct KernelTable {
  // Row-major C[M x N] = alpha * A[M x K] * B[K x N] + beta * C.
  void (*sgemm)(int M, int N, int K, float alpha, const float* A, int lda,
                const float* B, int ldb, float beta, float* C, int ldc);
  void (*axpy)(int n, float a, const float* x, float* y);          // y += a*x
  void (*vmul)(int n, const float* a, const float* b, float* out);
  void (*vadd)(int n, const float* a, const float* b, float* out);
  void (*vsub)(int n, const float* a, const float* b, float* out);
  void (*lrelu)(int n, const float* x, float slope, float* y);
  void (*lrelu_bwd)(int n, const float* x, float slope, const float* gy,
                    float* gx);                                    // gx += ...
  float (*sum)(int n, const float* x);
  float (*dot)(int n, const float* a, const float* b);
  float (*sum_abs)(int n, const float* x);
  float (*sum_sq)(int n, const float* x);
  void (*adam_update)(int n, float* w, const float* g, float* m, float* v,
                      float lr, float beta1, float beta2, float eps,
                      float bias1, float bias2);
};

// Active table, chosen once from CPUID (override with LLE_SIMD=scalar|avx2).
const KernelTable& kernels();
const char* active_isa();
// Test hook; returns false when the requested ISA is not available.
bool force_isa(const char* name);

namespace ref {

template <class T>
void gemm(int M, int N, int K, T alpha, const T* __restrict A, int lda,
          const T* __restrict B, int ldb, T beta, T* __restrict C, int ldc) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < M; ++i) {
    T* __restrict crow = C + std::size_t(i) * ldc;
    if (beta == T(0)) {
      std::fill(crow, crow + N, T(0));
    } else if (beta != T(1)) {
      for (int j = 0; j < N; ++j) crow[j] *= beta;
    }
    const T* __restrict arow = A + std::size_t(i) * lda;
    for (int k = 0; k < K; ++k) {
      const T a = alpha * arow[k];
      const T* __restrict brow = B + std::size_t(k) * ldb;
      for (int j = 0; j < N; ++j) crow[j] += a * brow[j];
    }
  }
}

template <class T>
void axpy(int n, T a, const T* x, T* y) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

template <class T>
void vmul(int n, const T* a, const T* b, T* out) {
  for (int i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

template <class T>
void vadd(int n, const T* a, const T* b, T* out) {
  for (int i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

template <class T>
void vsub(int n, const T* a, const T* b, T* out) {
  for (int i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

template <class T>
void lrelu(int n, const T* x, T slope, T* y) {
  for (int i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : slope * x[i];
}

template <class T>
void lrelu_bwd(int n, const T* x, T slope, const T* gy, T* gx) {
  for (int i = 0; i < n; ++i) gx[i] += x[i] > T(0) ? gy[i] : slope * gy[i];
}

template <class T, class Body>
T blocked_reduce(int n, Body body) {
  T total = T(0);
  for (int b0 = 0; b0 < n; b0 += kReduceBlock) {
    const int b1 = std::min(n, b0 + kReduceBlock);
    total += body(b0, b1);
  }
  return total;
}

template <class T>
T sum(int n, const T* x) {
  return blocked_reduce<T>(n, [&](int b0, int b1) {
    T s = T(0);
    for (int i = b0; i < b1; ++i) s += x[i];
    return s;
  });
}

template <class T>
T dot(int n, const T* a, const T* b) {
  return blocked_reduce<T>(n, [&](int b0, int b1) {
    T s = T(0);
    for (int i = b0; i < b1; ++i) s += a[i] * b[i];
    return s;
  });
}

template <class T>
T sum_abs(int n, const T* x) {
  return blocked_reduce<T>(n, [&](int b0, int b1) {
    T s = T(0);
    for (int i = b0; i < b1; ++i) s += std::abs(x[i]);
    return s;
  });
}

template <class T>
T sum_sq(int n, const T* x) {
  return blocked_reduce<T>(n, [&](int b0, int b1) {
    T s = T(0);
    for (int i = b0; i < b1; ++i) s += x[i] * x[i];
    return s;
  });
}

template <class T>
void adam_update(int n, T* w, const T* g, T* m, T* v, T lr, T beta1, T beta2,
                 T eps, T bias1, T bias2) {
  for (int i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (T(1) - beta1) * g[i];
    v[i] = beta2 * v[i] + (T(1) - beta2) * g[i] * g[i];
    const T mhat = m[i] / bias1;
    const T vhat = v[i] / bias2;
    w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

// Blocked out-of-place transpose, dst[N x M] = src[M x N]^T.
template <class T>
void transpose(int M, int N, const T* src, int lds, T* dst, int ldd) {
  constexpr int kTile = 32;
  for (int i0 = 0; i0 < M; i0 += kTile) {
    const int i1 = std::min(M, i0 + kTile);
    for (int j0 = 0; j0 < N; j0 += kTile) {
      const int j1 = std::min(N, j0 + kTile);
      for (int i = i0; i < i1; ++i)
        for (int j = j0; j < j1; ++j)
          dst[std::size_t(j) * ldd + i] = src[std::size_t(i) * lds + j];
    }
  }
}

}  // namespace ref

// Type-generic front ends: float goes through the dispatch table, other
// scalar types use the reference path.
template <class T>
void gemm(int M, int N, int K, T alpha, const T* A, int lda, const T* B,
          int ldb, T beta, T* C, int ldc) {
  if constexpr (std::is_same_v<T, float>) {
    kernels().sgemm(M, N, K, alpha, A, lda, B, ldb, beta, C, ldc);
  } else {
    ref::gemm(M, N, K, alpha, A, lda, B, ldb, beta, C, ldc);
  }
}

template <class T>
T sum(int n, const T* x) {
  if constexpr (std::is_same_v<T, float>) return kernels().sum(n, x);
  else return ref::sum(n, x);
}

template <class T>
T dot(int n, const T* a, const T* b) {
  if constexpr (std::is_same_v<T, float>) return kernels().dot(n, a, b);
  else return ref::dot(n, a, b);
}

template <class T>
T sum_abs(int n, const T* x) {
  if constexpr (std::is_same_v<T, float>) return kernels().sum_abs(n, x);
  else return ref::sum_abs(n, x);
}

template <class T>
T sum_sq(int n, const T* x) {
  if constexpr (std::is_same_v<T, float>) return kernels().sum_sq(n, x);
  else return ref::sum_sq(n, x);
}

template <class T>
void axpy(int n, T a, const T* x, T* y) {
  if constexpr (std::is_same_v<T, float>) kernels().axpy(n, a, x, y);
  else ref::axpy(n, a, x, y);
}

template <class T>
void lrelu(int n, const T* x, T slope, T* y) {
  if constexpr (std::is_same_v<T, float>) kernels().lrelu(n, x, slope, y);
  else ref::lrelu(n, x, slope, y);
}

template <class T>
void lrelu_bwd(int n, const T* x, T slope, const T* gy, T* gx) {
  if constexpr (std::is_same_v<T, float>) kernels().lrelu_bwd(n, x, slope, gy, gx);
  else ref::lrelu_bwd(n, x, slope, gy, gx);
}

}  // namespace lle::simd
