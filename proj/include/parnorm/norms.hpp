#pragma once

#include <cstdint>
#include <string>

#include "parnorm/norm_spec.hpp"
#include "parnorm/subspace.hpp"
#include "parnorm/types.hpp"

namespace parnorm {

enum class Method { ClosedForm, Optimized };

std::string to_string(Method m);

// Value of an operator norm or partial norm together with a vector that
// attains it. For Method::Optimized the value is nu(A w)/nu(w) at the
// returned witness w, hence a certified lower bound of the supremum.
template <class S>
struct NormEstimate {
  double value = 0.0;
  Vec<S> witness;
  Method method = Method::ClosedForm;
  std::string route;
  double tol = 1e-8;
  bool zero_subspace = false;
  std::size_t samples = 0;      // random directions drawn
  std::size_t evaluations = 0;  // ratio evaluations including refinement
};

// Controls for the sampling optimizer used when no closed form applies.
struct SearchOptions {
  std::size_t samples = 2000;
  std::size_t refine_starts = 6;
  std::size_t max_refine_evaluations = 40000;  // per start
  double min_step = 1e-12;
  bool structured_probes = true;
  // Skip every closed form except the zero subspace. Used to obtain
  // independent sampling estimates of closed-form quantities.
  bool force_optimized = false;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  double invariance_tol = 1e-9;
};

struct InvarianceCheck {
  bool invariant = false;
  double residual = 0.0;  // ||(I - P_H) A B_H||_F
};

struct RankDecision {
  Eigen::Index rank = 0;
  double gap = 0.0;  // sigma_rank / sigma_{rank+1}, +inf when the split is exact
  bool ambiguous = false;
  Vector singular_values;
};

template <class S>
struct FixedPointSplit {
  Subspace<S> fixed;  // K = N(I - A)
  Subspace<S> range;  // H = R(I - A)
  bool complementary = false;
  RankDecision rank;
};

// Rank by the largest relative gap among singular values that fall below
// gray_ceiling * scale, where anything below floor * scale is zero and
// scale = max(sigma_1, 1).
RankDecision decide_rank(const Vector& singular_values, double floor = 1e-10,
                         double gray_ceiling = 1e-6);

template <class S>
NormEstimate<S> operator_norm(const Mat<S>& a, const NormSpec<S>& norm,
                              const SearchOptions& opts = {});

template <class S>
InvarianceCheck check_invariance(const Mat<S>& a, const Subspace<S>& h, double tol = 1e-9);

// sup over nonzero x in H of nu(Ax)/nu(x). Throws InvarianceError when H is
// not invariant under A within opts.invariance_tol.
template <class S>
NormEstimate<S> partial_norm(const Mat<S>& a, const Subspace<S>& h, const NormSpec<S>& norm,
                             const SearchOptions& opts = {});

// Matrix of A restricted to H in the basis of H: B^H A B.
template <class S>
Mat<S> restrict(const Mat<S>& a, const Subspace<S>& h, double tol = 1e-9);

template <class S>
FixedPointSplit<S> fixed_point_split(const Mat<S>& a, double rank_floor = 1e-10);
template <class S>
Subspace<S> fixed_point_space(const Mat<S>& a, double rank_floor = 1e-10);
template <class S>
Subspace<S> range_complement(const Mat<S>& a, double rank_floor = 1e-10);

// True when H is e-perp = {x : e^T x = 0} in R^n.
bool is_ergodicity_subspace(const Subspace<double>& h);

}  // namespace parnorm
