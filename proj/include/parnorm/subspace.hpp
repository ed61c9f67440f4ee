#pragma once

#include <optional>
#include <vector>

#include "parnorm/types.hpp"

namespace parnorm {

// A subspace of F^n held as an n x d matrix with orthonormal columns.
template <class S>
class Subspace {
 public:
  Subspace() = default;

  static Subspace zero(Eigen::Index n);
  static Subspace full(Eigen::Index n);
  // Spanned by the columns of `vectors`; columns whose Gram-Schmidt residual
  // falls below rank_tol (relative to the largest column) are dropped.
  // The order of the input columns is preserved, so coordinate vectors stay
  // coordinate vectors.
  static Subspace span(const Mat<S>& vectors, double rank_tol = 1e-10, double tol = 1e-9);
  static Subspace coordinate(Eigen::Index n, const std::vector<Eigen::Index>& indices);
  // Takes the basis as given after checking orthonormality within tol.
  static Subspace from_orthonormal(Mat<S> basis, double tol = 1e-9);

  Eigen::Index ambient_dim() const { return basis_.rows(); }
  Eigen::Index dim() const { return basis_.cols(); }
  const Mat<S>& basis() const { return basis_; }
  double tol() const { return tol_; }

  Mat<S> projector() const { return basis_ * basis_.adjoint(); }
  Vec<S> project(const Vec<S>& x) const { return basis_ * (basis_.adjoint() * x); }
  Vec<S> coords(const Vec<S>& x) const { return basis_.adjoint() * x; }
  // ||x - P x||_2
  double distance(const Vec<S>& x) const;
  // distance(x) <= tol * max(1, ||x||_2)
  bool contains(const Vec<S>& x) const;
  // other is a subspace of this (within tol)
  bool contains_subspace(const Subspace& other) const;
  bool same_span(const Subspace& other) const;
  // Sorted indices i with H = span{e_i}, when H is a coordinate subspace
  // (whatever its basis).
  std::optional<std::vector<Eigen::Index>> coordinate_indices() const;
  // Rows where some basis column has modulus above tol.
  std::vector<Eigen::Index> support() const;

 private:
  Subspace(Mat<S> basis, double tol) : basis_(std::move(basis)), tol_(tol) {}

  Mat<S> basis_;
  double tol_ = 1e-9;
};

// Orthonormality defect max |B^H B - I|.
template <class S>
double orthonormality_defect(const Mat<S>& basis);

extern template class Subspace<double>;
extern template class Subspace<Complex>;

}  // namespace parnorm
