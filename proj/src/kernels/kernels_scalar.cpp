#include "kernels/kernel_impl.hpp"

#include <cmath>

namespace parnorm::kernels::scalar {

double abs_sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

double abs_max(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::fabs(x[i]);
    if (v > m) m = v;
  }
  return m;
}

double sum_squares(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double weighted_abs_sum(const double* w, const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::fabs(x[i]);
  return s;
}

double abs_diff_sum(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

void accumulate_abs(const double* x, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += std::fabs(x[i]);
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    const double xj = x[j];
    const double* col = a + j * rows;
    for (std::size_t i = 0; i < rows; ++i) y[i] += col[i] * xj;
  }
}

}  // namespace parnorm::kernels::scalar
