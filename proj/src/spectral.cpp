#include "parnorm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "parnorm/stochastic.hpp"

namespace parnorm {

std::string to_string(BoundVerdict v) {
  switch (v) {
    case BoundVerdict::Pass: return "Pass";
    case BoundVerdict::Fail: return "Fail";
    case BoundVerdict::Undecidable: return "Undecidable";
  }
  return "?";
}

namespace {

CVector eigenvalues(const CMatrix& a) {
  if (a.rows() == 0) return CVector(0);
  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation did not converge");
  return es.eigenvalues();
}

Eigen::Index numerical_rank(const CMatrix& m, double rank_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const Vector s = svd.singularValues();
  const double scale = std::max(s(0), 1.0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > rank_tol * scale;
  return r;
}

MultiplicityReport count(const CMatrix& a, Complex lambda, double cluster_tol, double rank_tol) {
  MultiplicityReport rep;
  rep.lambda = lambda;
  rep.cluster_tol = cluster_tol;
  rep.rank_tol = rank_tol;
  const Eigen::Index n = a.rows();
  if (n == 0) return rep;
  const CVector ev = eigenvalues(a);
  rep.nearest_outside = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = std::abs(ev(i) - lambda);
    if (d <= cluster_tol) {
      ++rep.algebraic;
    } else {
      rep.nearest_outside = std::min(rep.nearest_outside, d);
      rep.ambiguous = rep.ambiguous || d <= 100.0 * cluster_tol;
    }
  }
  const CMatrix shifted = a - lambda * CMatrix::Identity(n, n);
  Eigen::JacobiSVD<CMatrix> sa(a);
  Eigen::JacobiSVD<CMatrix> ss(shifted);
  double scale = std::max(sa.singularValues()(0), std::abs(lambda));
  if (!(scale > 0.0)) scale = 1.0;
  for (Eigen::Index i = 0; i < n; ++i)
    rep.geometric += ss.singularValues()(i) <= rank_tol * scale;
  return rep;
}

}  // namespace

template <class S>
MultiplicityReport multiplicities(const Mat<S>& a, Complex lambda,
                                  const MultiplicityOptions& opts) {
  require_square_finite(a);
  const CMatrix ac = a.template cast<Complex>();
  double ct;
  if (opts.cluster_tol) {
    ct = *opts.cluster_tol;
  } else {
    ct = a.rows() ? 1e-6 * ac.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
  }
  return count(ac, lambda, ct, opts.rank_tol);
}

template <class S>
bool index_one_at_one(const Mat<S>& a, double rank_tol) {
  require_square_finite(a);
  const Eigen::Index n = a.rows();
  const CMatrix m = a.template cast<Complex>() - CMatrix::Identity(n, n);
  return numerical_rank(m, rank_tol) == numerical_rank(CMatrix(m * m), rank_tol);
}

template <class S>
BoundsReport check_multiplicity_bounds(const Mat<S>& a, const Subspace<S>& h, Complex lambda,
                                       const MultiplicityOptions& opts) {
  BoundsReport rep;
  rep.n = a.rows();
  rep.dim_h = h.dim();
  rep.full = multiplicities(a, lambda, opts);
  MultiplicityOptions sub = opts;
  sub.cluster_tol = rep.full.cluster_tol;
  const Mat<S> r = restrict(a, h);
  rep.restricted = multiplicities(r, lambda, sub);
  const Eigen::Index slack = rep.n - rep.dim_h;
  rep.algebraic_pass = rep.full.algebraic <= rep.restricted.algebraic + slack;
  rep.geometric_pass = rep.full.geometric <= rep.restricted.geometric + slack;
  return rep;
}

template <class S>
HighModulusReport high_modulus_bound(const Mat<S>& a, const Subspace<S>& h,
                                     const NormSpec<S>& norm, Complex lambda, double margin_tol,
                                     const MultiplicityOptions& mopts,
                                     const SearchOptions& sopts) {
  HighModulusReport rep;
  const auto est = partial_norm(a, h, norm, sopts);
  rep.partial = est.value;
  rep.method = est.method;
  rep.margin = std::abs(lambda) - est.value;
  rep.bound = a.rows() - h.dim();
  rep.mult = multiplicities(a, lambda, mopts);
  std::ostringstream os;
  os << "|lambda| = " << std::abs(lambda) << ", partial norm = " << est.value << " ("
     << to_string(est.method) << "), margin = " << rep.margin << ", alpha = "
     << rep.mult.algebraic << ", gamma = " << rep.mult.geometric << ", n - dim H = " << rep.bound
     << ", cluster_tol = " << rep.mult.cluster_tol;
  rep.diagnostics = os.str();
  if (rep.margin <= margin_tol) {
    rep.diagnostics += "; margin below tolerance";
    return rep;
  }
  if (est.method == Method::Optimized) {
    rep.diagnostics += "; partial norm is a sampled lower bound, margin not certified";
    return rep;
  }
  const bool ok = rep.mult.algebraic <= rep.bound && rep.mult.geometric <= rep.bound;
  rep.verdict = ok ? BoundVerdict::Pass : BoundVerdict::Fail;
  if (!ok) rep.diagnostics += "; bound violated, check cluster_tol and rank_tol";
  return rep;
}

SimpleOneReport stochastic_simple_one(const Matrix& a, const NormSpec<double>& norm, double tol,
                                      const SearchOptions& sopts) {
  SimpleOneReport rep;
  rep.coefficient = general_coefficient(a, norm, sopts).value;
  if (!(rep.coefficient < 1.0))
    throw ValidationError("precondition unmet: coefficient of ergodicity is " +
                          std::to_string(rep.coefficient) + ", not below 1");
  rep.one = multiplicities(a, Complex(1.0, 0.0));
  const CVector ev = eigenvalues(a.cast<Complex>());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i) - 1.0) > rep.one.cluster_tol)
      rep.subdominant = std::max(rep.subdominant, std::abs(ev(i)));
  rep.pass = rep.one.algebraic == 1 && rep.subdominant <= rep.coefficient + tol;
  return rep;
}

#define PARNORM_INSTANTIATE(S)                                                                \
  template MultiplicityReport multiplicities(const Mat<S>&, Complex,                          \
                                             const MultiplicityOptions&);                     \
  template bool index_one_at_one(const Mat<S>&, double);                                      \
  template BoundsReport check_multiplicity_bounds(const Mat<S>&, const Subspace<S>&, Complex, \
                                                  const MultiplicityOptions&);                \
  template HighModulusReport high_modulus_bound(const Mat<S>&, const Subspace<S>&,            \
                                                const NormSpec<S>&, Complex, double,          \
                                                const MultiplicityOptions&,                   \
                                                const SearchOptions&);

PARNORM_INSTANTIATE(double)
PARNORM_INSTANTIATE(Complex)
#undef PARNORM_INSTANTIATE

}  // namespace parnorm
