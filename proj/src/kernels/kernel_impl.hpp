#pragma once

#include <cstddef>

namespace parnorm::kernels {

namespace scalar {
double abs_sum(const double* x, std::size_t n);
double abs_max(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double weighted_abs_sum(const double* w, const double* x, std::size_t n);
double abs_diff_sum(const double* a, const double* b, std::size_t n);
void accumulate_abs(const double* x, double* acc, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace scalar

#if defined(PARNORM_HAVE_AVX2)
namespace avx2 {
double abs_sum(const double* x, std::size_t n);
double abs_max(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double weighted_abs_sum(const double* w, const double* x, std::size_t n);
double abs_diff_sum(const double* a, const double* b, std::size_t n);
void accumulate_abs(const double* x, double* acc, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace avx2
#endif

}  // namespace parnorm::kernels
