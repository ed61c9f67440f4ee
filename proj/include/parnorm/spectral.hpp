#pragma once

#include <optional>
#include <string>

#include "parnorm/norms.hpp"

namespace parnorm {

struct MultiplicityOptions {
  // Absolute clustering radius; default 1e-6 * nu0(A) for the L1 operator norm.
  std::optional<double> cluster_tol;
  // Relative to max(sigma_1(A), |lambda|).
  double rank_tol = 1e-9;
};

struct MultiplicityReport {
  Complex lambda{0.0, 0.0};
  int algebraic = 0;
  int geometric = 0;
  double cluster_tol = 0.0;
  double rank_tol = 0.0;
  // An eigenvalue sits between cluster_tol and 100 * cluster_tol from lambda.
  bool ambiguous = false;
  double nearest_outside = 0.0;  // distance of the closest eigenvalue not counted
};

template <class S>
MultiplicityReport multiplicities(const Mat<S>& a, Complex lambda,
                                  const MultiplicityOptions& opts = {});

// rank(A - I) == rank((A - I)^2): eigenvalue 1 has index at most one.
template <class S>
bool index_one_at_one(const Mat<S>& a, double rank_tol = 1e-9);

struct BoundsReport {
  Eigen::Index n = 0;
  Eigen::Index dim_h = 0;
  MultiplicityReport full;
  MultiplicityReport restricted;
  bool algebraic_pass = false;  // alpha(A) <= alpha(A|H) + n - dim H
  bool geometric_pass = false;  // gamma(A) <= gamma(A|H) + n - dim H
};

template <class S>
BoundsReport check_multiplicity_bounds(const Mat<S>& a, const Subspace<S>& h, Complex lambda,
                                       const MultiplicityOptions& opts = {});

enum class BoundVerdict { Pass, Fail, Undecidable };
std::string to_string(BoundVerdict v);

struct HighModulusReport {
  BoundVerdict verdict = BoundVerdict::Undecidable;
  double partial = 0.0;  // mu0_H(A)
  Method method = Method::ClosedForm;
  double margin = 0.0;   // |lambda| - mu0_H(A)
  Eigen::Index bound = 0;  // n - dim H
  MultiplicityReport mult;
  std::string diagnostics;
};

template <class S>
HighModulusReport high_modulus_bound(const Mat<S>& a, const Subspace<S>& h,
                                     const NormSpec<S>& norm, Complex lambda,
                                     double margin_tol = 1e-8,
                                     const MultiplicityOptions& mopts = {},
                                     const SearchOptions& sopts = {});

struct SimpleOneReport {
  double coefficient = 0.0;  // nu0_H(A) on e-perp
  MultiplicityReport one;
  double subdominant = 0.0;  // max |lambda| over eigenvalues away from 1
  bool pass = false;
};

// Throws ValidationError when the coefficient is not below 1.
SimpleOneReport stochastic_simple_one(const Matrix& a, const NormSpec<double>& norm,
                                      double tol = 1e-8, const SearchOptions& sopts = {});

}  // namespace parnorm
