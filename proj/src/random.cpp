#include "parnorm/random.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace parnorm {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

CMatrix random_complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

Matrix random_orthogonal(Eigen::Index n, Rng& rng) {
  const Matrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Matrix random_stochastic(Eigen::Index n, Rng& rng, double zero_prob) {
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> pick(0, std::max<Eigen::Index>(n - 1, 0));
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = ex(rng);
      m(i, j) = (zero_prob > 0.0 && u(rng) < zero_prob) ? 0.0 : v;
    }
    if (m.col(j).sum() == 0.0) m(pick(rng), j) = 1.0;
    m.col(j) /= m.col(j).sum();
  }
  return m;
}

Vector random_probability(Eigen::Index n, Rng& rng) {
  std::exponential_distribution<double> ex(1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = ex(rng);
  return v / v.sum();
}

Matrix random_permutation_matrix(Eigen::Index n, Rng& rng) {
  std::vector<Eigen::Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m(p[static_cast<std::size_t>(j)], j) = 1.0;
  return m;
}

}  // namespace parnorm
