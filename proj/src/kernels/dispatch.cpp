#include "parnorm/kernels.hpp"

#include <cstdlib>
#include <string_view>

#include "kernels/kernel_impl.hpp"

namespace parnorm::kernels {

namespace {

constexpr KernelTable kScalar{
    "scalar",          scalar::abs_sum,        scalar::abs_max,
    scalar::sum_squares, scalar::weighted_abs_sum, scalar::abs_diff_sum,
    scalar::accumulate_abs, scalar::gemv,
};

#if defined(PARNORM_HAVE_AVX2)
constexpr KernelTable kAvx2{
    "avx2",          avx2::abs_sum,        avx2::abs_max,
    avx2::sum_squares, avx2::weighted_abs_sum, avx2::abs_diff_sum,
    avx2::accumulate_abs, avx2::gemv,
};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& select() {
  const char* env = std::getenv("PARNORM_SIMD");
  const std::string_view want = env ? env : "auto";
  if (want == "scalar") return kScalar;
  if (const KernelTable* t = avx2_table()) return *t;
  return kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(PARNORM_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace parnorm::kernels
