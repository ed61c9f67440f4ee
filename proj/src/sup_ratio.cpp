#include "sup_ratio.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "parnorm/kernels.hpp"

namespace parnorm::detail {

namespace {

template <class S>
S random_scalar(std::mt19937_64& rng, std::normal_distribution<double>& nd) {
  if constexpr (std::is_same_v<S, double>) {
    return nd(rng);
  } else {
    const double re = nd(rng);
    const double im = nd(rng);
    return S(re, im);
  }
}

template <class S>
class RatioObjective {
 public:
  RatioObjective(const Mat<S>& a, const NormSpec<S>& num, const NormSpec<S>& den)
      : a_(a), num_(num), den_(den), ax_(a.rows()) {}

  // Returns -1 when den(x) vanishes.
  double operator()(const Vec<S>& x) {
    ++evaluations;
    const double d = den_(x);
    if (!(d > 0.0)) return -1.0;
    if constexpr (std::is_same_v<S, double>) {
      kernels::active().gemv(a_.data(), static_cast<std::size_t>(a_.rows()),
                             static_cast<std::size_t>(a_.cols()), x.data(), ax_.data());
    } else {
      ax_.noalias() = a_ * x;
    }
    return num_(ax_) / d;
  }

  double den(const Vec<S>& x) const { return den_(x); }

  std::size_t evaluations = 0;

 private:
  const Mat<S>& a_;
  const NormSpec<S>& num_;
  const NormSpec<S>& den_;
  Vec<S> ax_;
};

struct Candidate {
  double value;
  std::size_t index;
};

template <class S>
std::vector<Vec<S>> search_directions(const Mat<S>& basis) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index d = basis.cols();
  std::vector<Vec<S>> dirs;
  auto push = [&](Vec<S> v) {
    const double nv = v.norm();
    if (nv <= 1e-12) return;
    v /= nv;
    for (const auto& w : dirs)
      if ((w - v).norm() < 1e-12 || (w + v).norm() < 1e-12) return;
    dirs.push_back(std::move(v));
  };
  for (Eigen::Index j = 0; j < d; ++j) push(basis.col(j));
  const Mat<S> proj = basis * basis.adjoint();
  for (Eigen::Index i = 0; i < n; ++i) push(proj.col(i));
  if (n <= 24)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) push(proj.col(i) - proj.col(j));
  if constexpr (is_complex_v<S>) {
    const std::size_t real_count = dirs.size();
    for (std::size_t k = 0; k < real_count; ++k) dirs.push_back(dirs[k] * S(0.0, 1.0));
  }
  return dirs;
}

}  // namespace

template <class S>
NormEstimate<S> maximize_ratio(const Mat<S>& a, const Mat<S>& basis, const NormSpec<S>& num,
                               const NormSpec<S>& den, const SearchOptions& opts) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index d = basis.cols();
  NormEstimate<S> out;
  out.method = Method::Optimized;
  out.route = "sampling+pattern-search";
  if (d == 0) {
    out.zero_subspace = true;
    out.witness = Vec<S>::Zero(n);
    return out;
  }

  RatioObjective<S> f(a, num, den);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_int_distribution<int> tern(-1, 1);

  std::vector<Vec<S>> pool;
  std::vector<double> values;
  // Candidates that are rounding residue of a projection carry no direction.
  auto consider = [&](Vec<S> x, double scale = 1.0) {
    if (x.norm() <= 1e-8 * scale) return;
    const double v = f(x);
    if (v < 0.0) return;
    pool.push_back(std::move(x));
    values.push_back(v);
  };

  const Mat<S> proj = basis * basis.adjoint();
  if (opts.structured_probes) {
    for (Eigen::Index j = 0; j < d; ++j) consider(basis.col(j));
    for (Eigen::Index i = 0; i < n; ++i) consider(proj.col(i));
    if (n <= 24)
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) consider(proj.col(i) - proj.col(j), std::sqrt(2.0));
  }
  Vec<S> c(d);
  Vec<S> t(n);
  for (std::size_t s = 0; s < opts.samples; ++s) {
    if (s % 2 == 0) {
      for (Eigen::Index j = 0; j < d; ++j) c(j) = random_scalar<S>(rng, nd);
      consider(basis * c);
    } else {
      // Projected sign patterns reach the vertices of polyhedral balls.
      for (Eigen::Index i = 0; i < n; ++i) t(i) = S(static_cast<double>(tern(rng)));
      consider(proj * t, t.norm());
    }
  }
  out.samples = opts.samples;
  if (pool.empty()) {
    out.witness = basis.col(0);
    out.value = std::max(0.0, f(out.witness));
    out.evaluations = f.evaluations;
    return out;
  }

  std::vector<Candidate> order;
  order.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) order.push_back({values[i], i});
  std::stable_sort(order.begin(), order.end(),
                   [](const Candidate& l, const Candidate& r) { return l.value > r.value; });

  const auto dirs = search_directions(basis);
  double best = order.front().value;
  Vec<S> best_x = pool[order.front().index];

  const std::size_t starts = std::min(opts.refine_starts, order.size());
  std::vector<Vec<S>> started;
  for (std::size_t k = 0, used = 0; k < order.size() && used < starts; ++k) {
    Vec<S> x = pool[order[k].index];
    x /= f.den(x);
    bool dup = false;
    for (const auto& s : started) dup = dup || (s - x).norm() < 1e-6 || (s + x).norm() < 1e-6;
    if (dup) continue;
    started.push_back(x);
    ++used;

    double fx = f(x);
    double step = 0.5;
    const std::size_t budget_end = f.evaluations + opts.max_refine_evaluations;
    Vec<S> y(n);
    while (step > opts.min_step && f.evaluations < budget_end) {
      bool improved = false;
      for (const auto& dir : dirs) {
        for (double sgn : {1.0, -1.0}) {
          y = x + (sgn * step) * dir;
          if (y.norm() <= 1e-8 * x.norm()) continue;
          double fy = f(y);
          if (!(fy > fx * (1.0 + 1e-15))) continue;
          // Expand along a successful direction.
          double s2 = step;
          for (int e = 0; e < 30; ++e) {
            s2 *= 2.0;
            Vec<S> z = x + (sgn * s2) * dir;
            const double fz = f(z);
            if (!(fz > fy)) break;
            y = std::move(z);
            fy = fz;
          }
          x = y / f.den(y);
          fx = fy;
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
    }
    if (fx > best) {
      best = fx;
      best_x = x;
    }
  }

  best_x /= f.den(best_x);
  out.witness = best_x;
  out.value = f(best_x);
  out.evaluations = f.evaluations;
  return out;
}

template NormEstimate<double> maximize_ratio(const Mat<double>&, const Mat<double>&,
                                             const NormSpec<double>&, const NormSpec<double>&,
                                             const SearchOptions&);
template NormEstimate<Complex> maximize_ratio(const Mat<Complex>&, const Mat<Complex>&,
                                              const NormSpec<Complex>&,
                                              const NormSpec<Complex>&, const SearchOptions&);

}  // namespace parnorm::detail
