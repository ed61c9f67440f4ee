#pragma once

// Real double-precision inner loops used by the norm, ergodicity and
// sampling code. Every kernel has a scalar reference implementation; SIMD
// variants are compiled into separate translation units and picked once at
// startup (override with PARNORM_SIMD=scalar|avx2|auto).

#include <cstddef>
#include <string_view>

namespace parnorm::kernels {

struct KernelTable {
  std::string_view name;

  // sum_i |x_i|
  double (*abs_sum)(const double* x, std::size_t n);
  // max_i |x_i|, 0 for n == 0
  double (*abs_max)(const double* x, std::size_t n);
  // sum_i x_i^2
  double (*sum_squares)(const double* x, std::size_t n);
  // sum_i w_i |x_i|
  double (*weighted_abs_sum)(const double* w, const double* x, std::size_t n);
  // sum_i |a_i - b_i|
  double (*abs_diff_sum)(const double* a, const double* b, std::size_t n);
  // acc_i += |x_i|
  void (*accumulate_abs)(const double* x, double* acc, std::size_t n);
  // y = A x, A column-major rows x cols with leading dimension `rows`
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x,
               double* y);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table();

// The table selected for this process.
const KernelTable& active();

}  // namespace parnorm::kernels
