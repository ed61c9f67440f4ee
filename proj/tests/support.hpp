#pragma once

// Shared constructions for the unit and acceptance suites.

#include <algorithm>
#include <numeric>
#include <vector>

#include "parnorm/contraction.hpp"
#include "parnorm/random.hpp"

namespace support {

using namespace parnorm;

inline Matrix running() {
  Matrix a(2, 2);
  a << 0.9, 0.2, 0.1, 0.8;
  return a;
}

// Nonexpansive A = S diag(C, I) S^-1 whose range R(I - A) is span S_H and
// fixed space N(I - A) is span S_K, scaled so that nu^0_H(A) = k under `base`.
struct Nonexpansive {
  Matrix a;
  Subspace<double> h, k;
  double target = 0.0;
};

inline Matrix well_conditioned(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  for (;;) {
    Matrix s = random_gaussian(rows, cols, rng);
    Eigen::JacobiSVD<Matrix> svd(s);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 0.2 * sv(0)) return s;
  }
}

// For L1 and Linf bases the range is a coordinate subspace so that the
// partial norm has a closed form; for L2 it is arbitrary.
inline Nonexpansive random_nonexpansive(Eigen::Index n, Eigen::Index dim_h, NormKind base_kind,
                                        double k, Rng& rng) {
  const Eigen::Index dim_k = n - dim_h;
  Matrix s(n, n);
  if (base_kind == NormKind::L2) {
    s = well_conditioned(n, n, rng);
  } else {
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    s.setZero();
    for (Eigen::Index j = 0; j < dim_h; ++j) s(perm[static_cast<std::size_t>(j)], j) = 1.0;
    for (;;) {
      s.rightCols(dim_k) = random_gaussian(n, dim_k, rng);
      Eigen::JacobiSVD<Matrix> svd(s);
      const auto& sv = svd.singularValues();
      if (sv(n - 1) > 0.1 * sv(0)) break;
    }
  }
  Matrix c = random_gaussian(dim_h, dim_h, rng);
  Matrix d = Matrix::Identity(n, n);
  d.topLeftCorner(dim_h, dim_h) = c;
  const Matrix sinv = s.inverse();
  Nonexpansive out;
  out.h = Subspace<double>::span(s.leftCols(dim_h));
  out.k = Subspace<double>::span(s.rightCols(dim_k));
  out.a = s * d * sinv;
  NormSpec<double> base = base_kind == NormKind::L2   ? NormSpec<double>::l2()
                          : base_kind == NormKind::L1 ? NormSpec<double>::l1()
                                                      : NormSpec<double>::linf();
  const double k0 = partial_norm(out.a, out.h, base).value;
  d.topLeftCorner(dim_h, dim_h) = c * (k / k0);
  out.a = s * d * sinv;
  out.target = k;
  return out;
}

// Entrywise positive-looking stochastic matrix different from the identity.
inline Matrix non_identity_stochastic(Eigen::Index n, Rng& rng, double zero_prob = 0.0) {
  for (;;) {
    Matrix a = random_stochastic(n, rng, zero_prob);
    if (!a.isIdentity(1e-6)) return a;
  }
}

}  // namespace support
