// AVX2+FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; dispatch.cpp routes here only when CPUID reports both.

#include <immintrin.h>

#include <cstddef>
#include <vector>

#include "lle/simd/kernels.hpp"

namespace lle::simd {

namespace {

constexpr int MR = 6;   // microkernel rows
constexpr int NR = 16;  // microkernel cols (two ymm lanes)

alignas(32) constexpr int kMaskTable[16] = {-1, -1, -1, -1, -1, -1, -1, -1,
                                            0,  0,  0,  0,  0,  0,  0,  0};

inline __m256i tail_mask(int live) {
  // live in [0,8): mask with `live` leading active lanes
  return _mm256_loadu_si256(
      reinterpret_cast<const __m256i*>(kMaskTable + 8 - live));
}

inline float hsum8(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  __m128 s = _mm_add_ps(lo, hi);
  s = _mm_add_ps(s, _mm_movehl_ps(s, s));
  s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 1));
  return _mm_cvtss_f32(s);
}

// B panel layout: bp[k*NR + j] for one 16-column panel, zero padded.
void pack_b_panels(int K, int N, const float* B, int ldb, float* bp) {
  const int panels = (N + NR - 1) / NR;
#pragma omp parallel for schedule(static)
  for (int p = 0; p < panels; ++p) {
    const int j0 = p * NR;
    const int nr = N - j0 < NR ? N - j0 : NR;
    float* dst = bp + std::size_t(p) * K * NR;
    for (int k = 0; k < K; ++k) {
      const float* src = B + std::size_t(k) * ldb + j0;
      int j = 0;
      for (; j < nr; ++j) dst[j] = src[j];
      for (; j < NR; ++j) dst[j] = 0.0f;
      dst += NR;
    }
  }
}

// A panel layout: ap[k*MR + r], rows beyond mr zero padded.
void pack_a_panel(int K, const float* A, int lda, int mr, float* ap) {
  for (int k = 0; k < K; ++k)
    for (int r = 0; r < MR; ++r)
      ap[std::size_t(k) * MR + r] = r < mr ? A[std::size_t(r) * lda + k] : 0.0f;
}

template <int ROWS>
void micro_kernel(int K, const float* ap, const float* bp, float alpha,
                  float beta, float* c, int ldc, int nr) {
  __m256 acc0[ROWS], acc1[ROWS];
  for (int r = 0; r < ROWS; ++r) {
    acc0[r] = _mm256_setzero_ps();
    acc1[r] = _mm256_setzero_ps();
  }
  for (int k = 0; k < K; ++k) {
    const __m256 b0 = _mm256_load_ps(bp + std::size_t(k) * NR);
    const __m256 b1 = _mm256_load_ps(bp + std::size_t(k) * NR + 8);
    const float* arow = ap + std::size_t(k) * MR;
    for (int r = 0; r < ROWS; ++r) {
      const __m256 a = _mm256_broadcast_ss(arow + r);
      acc0[r] = _mm256_fmadd_ps(a, b0, acc0[r]);
      acc1[r] = _mm256_fmadd_ps(a, b1, acc1[r]);
    }
  }
  const __m256 va = _mm256_set1_ps(alpha);
  const __m256 vb = _mm256_set1_ps(beta);
  for (int r = 0; r < ROWS; ++r) {
    float* crow = c + std::size_t(r) * ldc;
    __m256 r0 = _mm256_mul_ps(acc0[r], va);
    __m256 r1 = _mm256_mul_ps(acc1[r], va);
    if (nr == NR) {
      if (beta != 0.0f) {
        r0 = _mm256_fmadd_ps(vb, _mm256_loadu_ps(crow), r0);
        r1 = _mm256_fmadd_ps(vb, _mm256_loadu_ps(crow + 8), r1);
      }
      _mm256_storeu_ps(crow, r0);
      _mm256_storeu_ps(crow + 8, r1);
    } else {
      const int n0 = nr < 8 ? nr : 8;
      const int n1 = nr - n0;
      const __m256i m0 = tail_mask(n0);
      if (beta != 0.0f)
        r0 = _mm256_fmadd_ps(vb, _mm256_maskload_ps(crow, m0), r0);
      _mm256_maskstore_ps(crow, m0, r0);
      if (n1 > 0) {
        const __m256i m1 = tail_mask(n1);
        if (beta != 0.0f)
          r1 = _mm256_fmadd_ps(vb, _mm256_maskload_ps(crow + 8, m1), r1);
        _mm256_maskstore_ps(crow + 8, m1, r1);
      }
    }
  }
}

using MicroFn = void (*)(int, const float*, const float*, float, float, float*,
                         int, int);
constexpr MicroFn kMicro[MR] = {micro_kernel<1>, micro_kernel<2>,
                                micro_kernel<3>, micro_kernel<4>,
                                micro_kernel<5>, micro_kernel<6>};

void sgemm_avx2(int M, int N, int K, float alpha, const float* A, int lda,
                const float* B, int ldb, float beta, float* C, int ldc) {
  if (M <= 0 || N <= 0) return;
  if (K <= 0 || alpha == 0.0f) {
    for (int i = 0; i < M; ++i) {
      float* crow = C + std::size_t(i) * ldc;
      if (beta == 0.0f)
        for (int j = 0; j < N; ++j) crow[j] = 0.0f;
      else if (beta != 1.0f)
        for (int j = 0; j < N; ++j) crow[j] *= beta;
    }
    return;
  }

  const int panels = (N + NR - 1) / NR;
  std::vector<float> bpack(std::size_t(panels) * K * NR + 8);
  float* bp = bpack.data();
  bp += (reinterpret_cast<std::uintptr_t>(bp) / 4) % 8 == 0
            ? 0
            : 8 - (reinterpret_cast<std::uintptr_t>(bp) / 4) % 8;
  pack_b_panels(K, N, B, ldb, bp);

#pragma omp parallel
  {
    std::vector<float> apack(std::size_t(K) * MR);
#pragma omp for schedule(static)
    for (int i0 = 0; i0 < M; i0 += MR) {
      const int mr = M - i0 < MR ? M - i0 : MR;
      pack_a_panel(K, A + std::size_t(i0) * lda, lda, mr, apack.data());
      for (int p = 0; p < panels; ++p) {
        const int j0 = p * NR;
        const int nr = N - j0 < NR ? N - j0 : NR;
        kMicro[mr - 1](K, apack.data(), bp + std::size_t(p) * K * NR, alpha,
                       beta, C + std::size_t(i0) * ldc + j0, ldc, nr);
      }
    }
  }
}

void axpy_avx2(int n, float a, const float* x, float* y) {
  const __m256 va = _mm256_set1_ps(a);
  int i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i,
                     _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i),
                                     _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void vmul_avx2(int n, const float* a, const float* b, float* out) {
  int i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i),
                                            _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void vadd_avx2(int n, const float* a, const float* b, float* out) {
  int i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i, _mm256_add_ps(_mm256_loadu_ps(a + i),
                                            _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void vsub_avx2(int n, const float* a, const float* b, float* out) {
  int i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i, _mm256_sub_ps(_mm256_loadu_ps(a + i),
                                            _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void lrelu_avx2(int n, const float* x, float slope, float* y) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 zero = _mm256_setzero_ps();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 neg = _mm256_mul_ps(v, vs);
    const __m256 mask = _mm256_cmp_ps(v, zero, _CMP_GT_OQ);
    _mm256_storeu_ps(y + i, _mm256_blendv_ps(neg, v, mask));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void lrelu_bwd_avx2(int n, const float* x, float slope, const float* gy,
                    float* gx) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 zero = _mm256_setzero_ps();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 g = _mm256_loadu_ps(gy + i);
    const __m256 mask = _mm256_cmp_ps(v, zero, _CMP_GT_OQ);
    const __m256 gsel = _mm256_blendv_ps(_mm256_mul_ps(g, vs), g, mask);
    _mm256_storeu_ps(gx + i, _mm256_add_ps(_mm256_loadu_ps(gx + i), gsel));
  }
  for (; i < n; ++i) gx[i] += x[i] > 0.0f ? gy[i] : slope * gy[i];
}

template <class BlockBody>
float blocked_reduce_avx2(int n, BlockBody body) {
  float total = 0.0f;
  for (int b0 = 0; b0 < n; b0 += kReduceBlock) {
    const int b1 = b0 + kReduceBlock < n ? b0 + kReduceBlock : n;
    total += body(b0, b1);
  }
  return total;
}

float sum_avx2(int n, const float* x) {
  return blocked_reduce_avx2(n, [&](int b0, int b1) {
    __m256 acc = _mm256_setzero_ps();
    int i = b0;
    for (; i + 8 <= b1; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(x + i));
    float s = hsum8(acc);
    for (; i < b1; ++i) s += x[i];
    return s;
  });
}

float dot_avx2(int n, const float* a, const float* b) {
  return blocked_reduce_avx2(n, [&](int b0, int b1) {
    __m256 acc = _mm256_setzero_ps();
    int i = b0;
    for (; i + 8 <= b1; i += 8)
      acc = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc);
    float s = hsum8(acc);
    for (; i < b1; ++i) s += a[i] * b[i];
    return s;
  });
}

float sum_abs_avx2(int n, const float* x) {
  const __m256 absmask =
      _mm256_castsi256_ps(_mm256_set1_epi32(0x7fffffff));
  return blocked_reduce_avx2(n, [&](int b0, int b1) {
    __m256 acc = _mm256_setzero_ps();
    int i = b0;
    for (; i + 8 <= b1; i += 8)
      acc = _mm256_add_ps(acc, _mm256_and_ps(absmask, _mm256_loadu_ps(x + i)));
    float s = hsum8(acc);
    for (; i < b1; ++i) s += x[i] < 0.0f ? -x[i] : x[i];
    return s;
  });
}

float sum_sq_avx2(int n, const float* x) {
  return blocked_reduce_avx2(n, [&](int b0, int b1) {
    __m256 acc = _mm256_setzero_ps();
    int i = b0;
    for (; i + 8 <= b1; i += 8) {
      const __m256 v = _mm256_loadu_ps(x + i);
      acc = _mm256_fmadd_ps(v, v, acc);
    }
    float s = hsum8(acc);
    for (; i < b1; ++i) s += x[i] * x[i];
    return s;
  });
}

void adam_avx2(int n, float* w, const float* g, float* m, float* v, float lr,
               float beta1, float beta2, float eps, float bias1, float bias2) {
  const __m256 vb1 = _mm256_set1_ps(beta1);
  const __m256 vb2 = _mm256_set1_ps(beta2);
  const __m256 vc1 = _mm256_set1_ps(1.0f - beta1);
  const __m256 vc2 = _mm256_set1_ps(1.0f - beta2);
  const __m256 vib1 = _mm256_set1_ps(1.0f / bias1);
  const __m256 vib2 = _mm256_set1_ps(1.0f / bias2);
  const __m256 veps = _mm256_set1_ps(eps);
  const __m256 vlr = _mm256_set1_ps(lr);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 gi = _mm256_loadu_ps(g + i);
    __m256 mi = _mm256_fmadd_ps(vb1, _mm256_loadu_ps(m + i),
                                _mm256_mul_ps(vc1, gi));
    __m256 vi = _mm256_fmadd_ps(vb2, _mm256_loadu_ps(v + i),
                                _mm256_mul_ps(vc2, _mm256_mul_ps(gi, gi)));
    _mm256_storeu_ps(m + i, mi);
    _mm256_storeu_ps(v + i, vi);
    const __m256 mhat = _mm256_mul_ps(mi, vib1);
    const __m256 vhat = _mm256_mul_ps(vi, vib2);
    const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(vhat), veps);
    const __m256 step = _mm256_div_ps(_mm256_mul_ps(vlr, mhat), denom);
    _mm256_storeu_ps(w + i, _mm256_sub_ps(_mm256_loadu_ps(w + i), step));
  }
  ref::adam_update(n - i, w + i, g + i, m + i, v + i, lr, beta1, beta2, eps,
                   bias1, bias2);
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{
      sgemm_avx2, axpy_avx2,    vmul_avx2,    vadd_avx2,
      vsub_avx2,  lrelu_avx2,   lrelu_bwd_avx2, sum_avx2,
      dot_avx2,   sum_abs_avx2, sum_sq_avx2,  adam_avx2,
  };
  return table;
}

}  // namespace lle::simd
