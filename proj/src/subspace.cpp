#include "parnorm/subspace.hpp"

#include <algorithm>
#include <cmath>

namespace parnorm {

template <class S>
double orthonormality_defect(const Mat<S>& basis) {
  if (basis.cols() == 0) return 0.0;
  const Mat<S> g = basis.adjoint() * basis - Mat<S>::Identity(basis.cols(), basis.cols());
  return g.cwiseAbs().maxCoeff();
}

template <class S>
Subspace<S> Subspace<S>::zero(Eigen::Index n) {
  return Subspace(Mat<S>(n, 0), 1e-9);
}

template <class S>
Subspace<S> Subspace<S>::full(Eigen::Index n) {
  return Subspace(Mat<S>::Identity(n, n), 1e-9);
}

template <class S>
Subspace<S> Subspace<S>::span(const Mat<S>& vectors, double rank_tol, double tol) {
  if (!vectors.allFinite()) throw ValidationError("subspace spanning set has non-finite entries");
  const Eigen::Index n = vectors.rows();
  double scale = 0.0;
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) scale = std::max(scale, vectors.col(j).norm());
  Mat<S> q(n, 0);
  if (scale == 0.0) return Subspace(q, tol);
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Vec<S> v = vectors.col(j);
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index k = 0; k < q.cols(); ++k) v -= q.col(k) * q.col(k).dot(v);
    const double r = v.norm();
    if (r <= rank_tol * scale) continue;
    q.conservativeResize(n, q.cols() + 1);
    q.col(q.cols() - 1) = v / r;
  }
  return Subspace(std::move(q), tol);
}

template <class S>
Subspace<S> Subspace<S>::coordinate(Eigen::Index n, const std::vector<Eigen::Index>& indices) {
  Mat<S> b = Mat<S>::Zero(n, static_cast<Eigen::Index>(indices.size()));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const Eigen::Index i = indices[j];
    if (i < 0 || i >= n) throw DimensionError("coordinate index out of range");
    if (seen[static_cast<std::size_t>(i)]) throw ValidationError("repeated coordinate index");
    seen[static_cast<std::size_t>(i)] = true;
    b(i, static_cast<Eigen::Index>(j)) = S(1);
  }
  return Subspace(std::move(b), 1e-9);
}

template <class S>
Subspace<S> Subspace<S>::from_orthonormal(Mat<S> basis, double tol) {
  if (!basis.allFinite()) throw ValidationError("subspace basis has non-finite entries");
  if (basis.cols() > basis.rows()) throw DimensionError("basis has more columns than rows");
  const double defect = orthonormality_defect(basis);
  if (defect > tol)
    throw ValidationError("basis is not orthonormal (defect " + std::to_string(defect) + ")");
  return Subspace(std::move(basis), tol);
}

template <class S>
double Subspace<S>::distance(const Vec<S>& x) const {
  if (x.size() != ambient_dim()) throw DimensionError("vector length does not match subspace");
  return (x - project(x)).norm();
}

template <class S>
bool Subspace<S>::contains(const Vec<S>& x) const {
  return distance(x) <= tol_ * std::max(1.0, x.norm());
}

template <class S>
bool Subspace<S>::contains_subspace(const Subspace& other) const {
  if (other.ambient_dim() != ambient_dim()) return false;
  if (other.dim() > dim()) return false;
  if (other.dim() == 0) return true;
  const Mat<S> r = other.basis() - basis_ * (basis_.adjoint() * other.basis());
  return r.norm() <= std::max(tol_, other.tol());
}

template <class S>
bool Subspace<S>::same_span(const Subspace& other) const {
  return other.dim() == dim() && contains_subspace(other);
}

template <class S>
std::optional<std::vector<Eigen::Index>> Subspace<S>::coordinate_indices() const {
  // H lies in the span of the coordinates in its support, and the two agree
  // exactly when their dimensions do.
  auto rows = support();
  if (static_cast<Eigen::Index>(rows.size()) != dim() || dim() == 0) return std::nullopt;
  for (Eigen::Index i : rows) {
    const double diag = std::abs(basis_.row(i).squaredNorm());
    if (std::abs(diag - 1.0) > tol_) return std::nullopt;
  }
  return rows;
}

template <class S>
std::vector<Eigen::Index> Subspace<S>::support() const {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < ambient_dim(); ++i) {
    bool nz = false;
    for (Eigen::Index j = 0; j < dim() && !nz; ++j) nz = std::abs(basis_(i, j)) > tol_;
    if (nz) rows.push_back(i);
  }
  return rows;
}

template class Subspace<double>;
template class Subspace<Complex>;
template double orthonormality_defect(const Mat<double>&);
template double orthonormality_defect(const Mat<Complex>&);

}  // namespace parnorm
