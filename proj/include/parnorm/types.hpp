#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace parnorm {

using Complex = std::complex<double>;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Matrix = Mat<double>;
using Vector = Vec<double>;
using CMatrix = Mat<Complex>;
using CVector = Vec<Complex>;

template <class S>
inline constexpr bool is_complex_v = !std::is_same_v<S, double>;

// Tolerances used when the caller does not supply one.
struct Tolerances {
  double invariance = 1e-9;
  double rank_floor = 1e-10;
  double norm_compare = 1e-8;
  double fixed_residual = 1e-9;  // Ax != x iff nu(Ax - x) > this * nu(x)
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input does not satisfy a documented precondition (non-finite entries,
// a stochastic matrix with a bad column, k outside [0, 1), ...).
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::string pointer = {})
      : Error(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

class InvarianceError : public Error {
 public:
  InvarianceError(const std::string& what, double residual, long index = -1)
      : Error(what), residual_(residual), index_(index) {}
  double residual() const { return residual_; }
  // Sequence index (1-based) of the offending factor, -1 for a single matrix.
  long index() const { return index_; }

 private:
  double residual_;
  long index_;
};

// Ill-conditioned direct sums, ambiguous rank decisions that the caller asked
// to treat as fatal, overflow in product streams.
class NumericalError : public Error {
 public:
  using Error::Error;
};

template <class S>
void require_square_finite(const Mat<S>& a, const char* what = "matrix") {
  if (a.rows() != a.cols())
    throw DimensionError(std::string(what) + " must be square, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  if (!a.allFinite()) throw ValidationError(std::string(what) + " has non-finite entries");
}

}  // namespace parnorm
