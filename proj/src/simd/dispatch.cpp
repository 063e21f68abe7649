#include <cstdlib>
#include <cstring>

#include "lle/simd/kernels.hpp"

namespace lle::simd {

const KernelTable& scalar_kernels();
#if LLE_BUILD_AVX2
const KernelTable& avx2_kernels();
#endif

namespace {

bool cpu_has_avx2() {
#if LLE_BUILD_AVX2 && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Dispatch {
  const KernelTable* table = nullptr;
  const char* isa = "scalar";
};

Dispatch& dispatch() {
  static Dispatch d = [] {
    Dispatch init;
    const char* env = std::getenv("LLE_SIMD");
    const bool want_scalar = env && std::strcmp(env, "scalar") == 0;
#if LLE_BUILD_AVX2
    if (!want_scalar && cpu_has_avx2()) {
      init.table = &avx2_kernels();
      init.isa = "avx2";
      return init;
    }
#endif
    (void)want_scalar;
    init.table = &scalar_kernels();
    init.isa = "scalar";
    return init;
  }();
  return d;
}

}  // namespace

const KernelTable& kernels() { return *dispatch().table; }

const char* active_isa() { return dispatch().isa; }

bool force_isa(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    dispatch().table = &scalar_kernels();
    dispatch().isa = "scalar";
    return true;
  }
#if LLE_BUILD_AVX2
  if (std::strcmp(name, "avx2") == 0 && cpu_has_avx2()) {
    dispatch().table = &avx2_kernels();
    dispatch().isa = "avx2";
    return true;
  }
#endif
  return false;
}

}  // namespace lle::simd
