#include "lle/simd/kernels.hpp"

namespace lle::simd {

namespace {

void sgemm_scalar(int M, int N, int K, float alpha, const float* A, int lda,
                  const float* B, int ldb, float beta, float* C, int ldc) {
  ref::gemm(M, N, K, alpha, A, lda, B, ldb, beta, C, ldc);
}

void axpy_scalar(int n, float a, const float* x, float* y) { ref::axpy(n, a, x, y); }
void vmul_scalar(int n, const float* a, const float* b, float* o) { ref::vmul(n, a, b, o); }
void vadd_scalar(int n, const float* a, const float* b, float* o) { ref::vadd(n, a, b, o); }
void vsub_scalar(int n, const float* a, const float* b, float* o) { ref::vsub(n, a, b, o); }
void lrelu_scalar(int n, const float* x, float s, float* y) { ref::lrelu(n, x, s, y); }
void lrelu_bwd_scalar(int n, const float* x, float s, const float* gy, float* gx) {
  ref::lrelu_bwd(n, x, s, gy, gx);
}
float sum_scalar(int n, const float* x) { return ref::sum(n, x); }
float dot_scalar(int n, const float* a, const float* b) { return ref::dot(n, a, b); }
float sum_abs_scalar(int n, const float* x) { return ref::sum_abs(n, x); }
float sum_sq_scalar(int n, const float* x) { return ref::sum_sq(n, x); }
void adam_scalar(int n, float* w, const float* g, float* m, float* v, float lr,
                 float b1, float b2, float eps, float bias1, float bias2) {
  ref::adam_update(n, w, g, m, v, lr, b1, b2, eps, bias1, bias2);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      sgemm_scalar, axpy_scalar,    vmul_scalar,    vadd_scalar,
      vsub_scalar,  lrelu_scalar,   lrelu_bwd_scalar, sum_scalar,
      dot_scalar,   sum_abs_scalar, sum_sq_scalar,  adam_scalar,
  };
  return table;
}

}  // namespace lle::simd
