#include "parnorm/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parnorm/kernels.hpp"
#include "sup_ratio.hpp"

namespace parnorm {

std::string to_string(Method m) { return m == Method::ClosedForm ? "ClosedForm" : "Optimized"; }

RankDecision decide_rank(const Vector& sv, double floor, double gray_ceiling) {
  RankDecision out;
  out.singular_values = sv;
  const Eigen::Index n = sv.size();
  if (n == 0) {
    out.gap = std::numeric_limits<double>::infinity();
    return out;
  }
  const double scale = std::max(sv(0), 1.0);
  const double zero = floor * scale;
  const double gray = gray_ceiling * scale;
  Eigen::Index r_lo = 0;  // count above the gray zone
  Eigen::Index r_hi = 0;  // count above the zero floor
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sv(i) > gray) ++r_lo;
    if (sv(i) > zero) ++r_hi;
  }
  auto sigma = [&](Eigen::Index i) {  // 1-based, sigma_0 = scale / gray_ceiling, sigma_{n+1} = 0
    if (i <= 0) return scale / gray_ceiling;
    if (i > n) return 0.0;
    return sv(i - 1);
  };
  auto ratio = [&](Eigen::Index r) {
    const double below = sigma(r + 1);
    return below > 0.0 ? sigma(r) / below : std::numeric_limits<double>::infinity();
  };
  Eigen::Index best = r_lo;
  for (Eigen::Index r = r_lo; r <= r_hi; ++r)
    if (ratio(r) > ratio(best)) best = r;
  out.rank = best;
  out.gap = ratio(best);
  out.ambiguous = r_lo != r_hi;
  return out;
}

namespace {

template <class S>
void require_dims(const Mat<S>& a, const NormSpec<S>& norm) {
  require_square_finite(a);
  if (auto d = norm.dimension(); d && *d != a.rows())
    throw DimensionError("norm dimension " + std::to_string(*d) + " does not match matrix " +
                         std::to_string(a.rows()));
}

template <class S>
S unit_phase(S v) {
  if (std::abs(v) == 0.0) return S(1);
  if constexpr (std::is_same_v<S, double>) {
    return v > 0 ? 1.0 : -1.0;
  } else {
    return std::conj(v) / std::abs(v);
  }
}

// Closed forms for the coordinate norms on the whole space.
template <class S>
NormEstimate<S> coordinate_operator_norm(const Mat<S>& a, const NormSpec<S>& norm) {
  const Eigen::Index n = a.rows();
  NormEstimate<S> out;
  out.method = Method::ClosedForm;
  out.witness = Vec<S>::Zero(n);
  if (n == 0) return out;
  switch (norm.kind()) {
    case NormKind::L1:
    case NormKind::WeightedL1: {
      const bool weighted = norm.kind() == NormKind::WeightedL1;
      Eigen::Index arg = 0;
      double best = -1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        double s;
        if constexpr (std::is_same_v<S, double>) {
          const auto& kt = kernels::active();
          s = weighted ? kt.weighted_abs_sum(norm.weights().data(), a.col(j).data(),
                                             static_cast<std::size_t>(n)) /
                             norm.weights()(j)
                       : kt.abs_sum(a.col(j).data(), static_cast<std::size_t>(n));
        } else {
          s = weighted ? norm.weights().dot(a.col(j).cwiseAbs()) / norm.weights()(j)
                       : a.col(j).cwiseAbs().sum();
        }
        if (s > best) {
          best = s;
          arg = j;
        }
      }
      out.value = best;
      out.witness(arg) = S(1);
      out.route = weighted ? "max weighted column sum" : "max column sum";
      break;
    }
    case NormKind::Linf: {
      Vector rows = Vector::Zero(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        if constexpr (std::is_same_v<S, double>) {
          kernels::active().accumulate_abs(a.col(j).data(), rows.data(),
                                           static_cast<std::size_t>(n));
        } else {
          rows += a.col(j).cwiseAbs();
        }
      }
      Eigen::Index arg = 0;
      out.value = rows.maxCoeff(&arg);
      for (Eigen::Index j = 0; j < n; ++j) out.witness(j) = unit_phase(a(arg, j));
      out.route = "max row sum";
      break;
    }
    case NormKind::L2: {
      const Mat<S> g = a.adjoint() * a;
      Eigen::SelfAdjointEigenSolver<Mat<S>> es(g);
      out.value = std::sqrt(std::max(0.0, es.eigenvalues()(n - 1)));
      out.witness = es.eigenvectors().col(n - 1);
      out.route = "sqrt of largest eigenvalue of A^H A";
      break;
    }
    case NormKind::Composite:
      throw Error("coordinate_operator_norm on composite norm");
  }
  return out;
}

// sup over x in span(basis) of num(Ax)/den(x), closed form where A maps the
// span into itself and den restricted to it has a closed-form operator norm.
template <class S>
NormEstimate<S> mixed_sup(const Mat<S>& a, const Subspace<S>& sub, const NormSpec<S>& num,
                          const NormSpec<S>& den, const SearchOptions& opts) {
  if (check_invariance(a, sub, opts.invariance_tol).invariant) {
    // num = composite, den = its base: on an invariant summand they agree.
    auto est = partial_norm(a, sub, den, opts);
    est.route = "invariant summand: " + est.route;
    return est;
  }
  return detail::maximize_ratio(a, sub.basis(), num, den, opts);
}

}  // namespace

template <class S>
InvarianceCheck check_invariance(const Mat<S>& a, const Subspace<S>& h, double tol) {
  if (a.rows() != a.cols() || a.rows() != h.ambient_dim())
    throw DimensionError("matrix and subspace dimensions differ");
  InvarianceCheck out;
  if (h.dim() == 0) {
    out.invariant = true;
    return out;
  }
  const Mat<S> ab = a * h.basis();
  const Mat<S> r = ab - h.basis() * (h.basis().adjoint() * ab);
  out.residual = r.norm();
  out.invariant = out.residual <= tol * std::max(1.0, a.norm());
  return out;
}

template <class S>
NormEstimate<S> operator_norm(const Mat<S>& a, const NormSpec<S>& norm,
                              const SearchOptions& opts) {
  require_dims(a, norm);
  if (norm.kind() != NormKind::Composite) {
    if (!opts.force_optimized) return coordinate_operator_norm(a, norm);
    return detail::maximize_ratio(a, Mat<S>(Mat<S>::Identity(a.rows(), a.rows())), norm, norm,
                                  opts);
  }
  if (opts.force_optimized)
    return detail::maximize_ratio(a, Mat<S>(Mat<S>::Identity(a.rows(), a.rows())), norm, norm,
                                  opts);
  // Extreme points of the unit ball of an additive norm lie in H or in K, so
  // the operator norm is the larger of the two one-sided suprema.
  NormEstimate<S> best;
  best.witness = Vec<S>::Zero(a.rows());
  bool any = false;
  bool all_closed = true;
  std::size_t evals = 0;
  for (const Subspace<S>* sub : {&norm.h(), &norm.k()}) {
    if (sub->dim() == 0) continue;
    auto est = mixed_sup(a, *sub, norm, norm.base(), opts);
    evals += est.evaluations;
    all_closed = all_closed && est.method == Method::ClosedForm;
    if (!any || est.value > best.value) best = std::move(est);
    any = true;
  }
  best.method = all_closed ? Method::ClosedForm : Method::Optimized;
  // Normalize the witness to unit composite norm.
  if (any) {
    const double w = norm(best.witness);
    if (w > 0.0) best.witness /= w;
  }
  best.route = "additive split: " + best.route;
  best.evaluations = evals;
  return best;
}

bool is_ergodicity_subspace(const Subspace<double>& h) {
  const Eigen::Index n = h.ambient_dim();
  if (n < 1 || h.dim() != n - 1) return false;
  if (h.dim() == 0) return true;
  const Vector e = Vector::Ones(n);
  return (h.basis().transpose() * e).norm() <= h.tol() * std::sqrt(static_cast<double>(n));
}

template <class S>
NormEstimate<S> partial_norm(const Mat<S>& a, const Subspace<S>& h, const NormSpec<S>& norm,
                             const SearchOptions& opts) {
  require_dims(a, norm);
  if (h.ambient_dim() != a.rows()) throw DimensionError("subspace dimension does not match");
  const auto inv = check_invariance(a, h, opts.invariance_tol);
  if (!inv.invariant)
    throw InvarianceError("subspace is not invariant (residual " + std::to_string(inv.residual) +
                              ")",
                          inv.residual);
  const Eigen::Index n = a.rows();
  const Eigen::Index d = h.dim();
  NormEstimate<S> out;
  out.method = Method::ClosedForm;
  if (d == 0) {
    out.zero_subspace = true;
    out.witness = Vec<S>::Zero(n);
    out.route = "zero subspace (0 by convention)";
    return out;
  }
  if (opts.force_optimized) return detail::maximize_ratio(a, h.basis(), norm, norm, opts);

  {
    const Mat<S> ab = a * h.basis();
    const double scale = std::max(1.0, static_cast<double>(a.norm()));
    const bool fixes = (ab - h.basis()).norm() <= opts.invariance_tol * scale;
    const bool vanishes = ab.norm() <= opts.invariance_tol * static_cast<double>(a.norm());
    if (fixes || vanishes) {
      out.witness = h.basis().col(0);
      out.witness /= norm(out.witness);
      out.value = fixes ? 1.0 : 0.0;
      out.route = fixes ? "A fixes H pointwise" : "A vanishes on H";
      return out;
    }
  }

  if (d == 1) {
    const Vec<S> b = h.basis().col(0);
    const double nb = norm(b);
    out.value = norm(Vec<S>(a * b)) / nb;
    out.witness = b / nb;
    out.route = "one-dimensional subspace";
    return out;
  }
  if (norm.kind() == NormKind::L2) {
    // nu(Bc) = ||c||_2 for orthonormal B.
    const Mat<S> ab = a * h.basis();
    const Mat<S> g = ab.adjoint() * ab;
    Eigen::SelfAdjointEigenSolver<Mat<S>> es(g);
    out.value = std::sqrt(std::max(0.0, es.eigenvalues()(d - 1)));
    out.witness = h.basis() * es.eigenvectors().col(d - 1);
    out.route = "largest singular value of A B_H";
    return out;
  }
  if constexpr (std::is_same_v<S, double>) {
    if (norm.kind() == NormKind::L1 && is_ergodicity_subspace(h)) {
      // Extreme points of the L1 ball in e-perp are (e_j - e_l)/2.
      const auto& kt = kernels::active();
      double best = -1.0;
      Eigen::Index bj = 0, bl = 1;
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index l = j + 1; l < n; ++l) {
          const double s =
              kt.abs_diff_sum(a.col(j).data(), a.col(l).data(), static_cast<std::size_t>(n));
          if (s > best) {
            best = s;
            bj = j;
            bl = l;
          }
        }
      out.value = 0.5 * best;
      out.witness = Vector::Zero(n);
      out.witness(bj) = 0.5;
      out.witness(bl) = -0.5;
      out.route = "half max L1 distance between columns";
      return out;
    }
  }
  if (norm.kind() == NormKind::L1 || norm.kind() == NormKind::Linf ||
      norm.kind() == NormKind::WeightedL1) {
    if (auto idx = h.coordinate_indices()) {
      Mat<S> e = Mat<S>::Zero(n, d);
      for (Eigen::Index j = 0; j < d; ++j) e((*idx)[static_cast<std::size_t>(j)], j) = S(1.0);
      const Mat<S> r = e.transpose() * a * e;
      NormSpec<S> local = norm;
      if (norm.kind() == NormKind::WeightedL1) {
        Vector w(d);
        for (Eigen::Index j = 0; j < d; ++j) w(j) = norm.weights()((*idx)[static_cast<std::size_t>(j)]);
        local = NormSpec<S>::weighted_l1(w);
      }
      auto est = coordinate_operator_norm(r, local);
      out.value = est.value;
      out.witness = e * est.witness;
      out.witness /= norm(out.witness);
      out.route = "coordinate subspace: " + est.route + " of restriction";
      return out;
    }
  }
  if (norm.kind() == NormKind::Composite) {
    for (const Subspace<S>* part : {&norm.h(), &norm.k()}) {
      if (part->dim() > 0 && part->contains_subspace(h)) {
        auto est = partial_norm(a, h, norm.base(), opts);
        est.route = "inside additive summand: " + est.route;
        return est;
      }
    }
  }
  return detail::maximize_ratio(a, h.basis(), norm, norm, opts);
}

template <class S>
Mat<S> restrict(const Mat<S>& a, const Subspace<S>& h, double tol) {
  const auto inv = check_invariance(a, h, tol);
  if (!inv.invariant)
    throw InvarianceError("cannot restrict: subspace is not invariant (residual " +
                              std::to_string(inv.residual) + ")",
                          inv.residual);
  return h.basis().adjoint() * a * h.basis();
}

template <class S>
FixedPointSplit<S> fixed_point_split(const Mat<S>& a, double rank_floor) {
  require_square_finite(a);
  const Eigen::Index n = a.rows();
  FixedPointSplit<S> out;
  if (n == 0) {
    out.fixed = Subspace<S>::zero(0);
    out.range = Subspace<S>::zero(0);
    out.complementary = true;
    return out;
  }
  const Mat<S> m = Mat<S>::Identity(n, n) - a;
  Eigen::JacobiSVD<Mat<S>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.rank = decide_rank(svd.singularValues(), rank_floor);
  const Eigen::Index r = out.rank.rank;
  out.range = Subspace<S>::from_orthonormal(svd.matrixU().leftCols(r), 1e-8);
  out.fixed = Subspace<S>::from_orthonormal(svd.matrixV().rightCols(n - r), 1e-8);
  bool comp = out.fixed.dim() + out.range.dim() == n;
  if (comp && n > 0) {
    Mat<S> joined(n, n);
    joined << out.fixed.basis(), out.range.basis();
    Eigen::JacobiSVD<Mat<S>> js(joined);
    const auto& sv = js.singularValues();
    comp = sv(n - 1) > 1e-8 * sv(0);
  }
  out.complementary = comp;
  return out;
}

template <class S>
Subspace<S> fixed_point_space(const Mat<S>& a, double rank_floor) {
  return fixed_point_split(a, rank_floor).fixed;
}

template <class S>
Subspace<S> range_complement(const Mat<S>& a, double rank_floor) {
  return fixed_point_split(a, rank_floor).range;
}

#define PARNORM_INSTANTIATE(S)                                                                  \
  template NormEstimate<S> operator_norm(const Mat<S>&, const NormSpec<S>&,                    \
                                         const SearchOptions&);                                \
  template InvarianceCheck check_invariance(const Mat<S>&, const Subspace<S>&, double);        \
  template NormEstimate<S> partial_norm(const Mat<S>&, const Subspace<S>&, const NormSpec<S>&, \
                                        const SearchOptions&);                                 \
  template Mat<S> restrict(const Mat<S>&, const Subspace<S>&, double);                         \
  template FixedPointSplit<S> fixed_point_split(const Mat<S>&, double);                        \
  template Subspace<S> fixed_point_space(const Mat<S>&, double);                               \
  template Subspace<S> range_complement(const Mat<S>&, double);

PARNORM_INSTANTIATE(double)
PARNORM_INSTANTIATE(Complex)
#undef PARNORM_INSTANTIATE

}  // namespace parnorm
