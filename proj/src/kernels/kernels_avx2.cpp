// Compiled with -mavx2 -mfma; only reached through the dispatch table after
// a CPU feature check.

#include "kernels/kernel_impl.hpp"

#include <immintrin.h>

#include <cmath>

namespace parnorm::kernels::avx2 {

namespace {

inline __m256d abs_pd(__m256d v) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign, v);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

}  // namespace

double abs_sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, abs_pd(_mm256_loadu_pd(x + i)));
    acc1 = _mm256_add_pd(acc1, abs_pd(_mm256_loadu_pd(x + i + 4)));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, abs_pd(_mm256_loadu_pd(x + i)));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

double abs_max(const double* x, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(x + i)));
  double r = hmax(m);
  for (; i < n; ++i) {
    const double v = std::fabs(x[i]);
    if (v > r) r = v;
  }
  return r;
}

double sum_squares(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d a = _mm256_loadu_pd(x + i);
    const __m256d b = _mm256_loadu_pd(x + i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(x + i);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

double weighted_abs_sum(const double* w, const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), abs_pd(_mm256_loadu_pd(x + i)), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * std::fabs(x[i]);
  return s;
}

double abs_diff_sum(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(
        acc0, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
    acc1 = _mm256_add_pd(
        acc1, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4))));
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_add_pd(
        acc0, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

void accumulate_abs(const double* x, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(acc + i), abs_pd(_mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(acc + i, v);
  }
  for (; i < n; ++i) acc[i] += std::fabs(x[i]);
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  std::size_t i = 0;
  // Four rows per register, accumulate across all columns.
  for (; i + 4 <= rows; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < cols; ++j)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + j * rows + i), _mm256_set1_pd(x[j]), acc);
    _mm256_storeu_pd(y + i, acc);
  }
  for (; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += a[j * rows + i] * x[j];
    y[i] = s;
  }
}

}  // namespace parnorm::kernels::avx2
