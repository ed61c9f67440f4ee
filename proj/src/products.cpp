#include "parnorm/products.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "parnorm/random.hpp"

namespace parnorm {

namespace {

template <class S>
Eigen::Index common_dim(const std::vector<Mat<S>>& ms, const char* what) {
  if (ms.empty()) throw ValidationError(std::string(what) + " needs at least one matrix");
  const Eigen::Index n = ms.front().rows();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    require_square_finite(ms[i], what);
    if (ms[i].rows() != n)
      throw DimensionError(std::string(what) + ": matrix " + std::to_string(i + 1) +
                           " has dimension " + std::to_string(ms[i].rows()) + ", expected " +
                           std::to_string(n));
  }
  return n;
}

}  // namespace

template <class S>
MatrixSequence<S> MatrixSequence<S>::list(std::vector<Mat<S>> ms) {
  const Eigen::Index n = common_dim(ms, "sequence list");
  const std::size_t len = ms.size();
  auto data = std::make_shared<const std::vector<Mat<S>>>(std::move(ms));
  return generator(
      n,
      [data](std::size_t i) -> Mat<S> {
        if (i == 0 || i > data->size())
          throw ValidationError("explicit sequence exhausted at index " + std::to_string(i));
        return (*data)[i - 1];
      },
      "list", len);
}

template <class S>
MatrixSequence<S> MatrixSequence<S>::constant(Mat<S> a) {
  require_square_finite(a);
  const Eigen::Index n = a.rows();
  return generator(n, [a = std::move(a)](std::size_t) { return a; }, "constant");
}

template <class S>
MatrixSequence<S> MatrixSequence<S>::periodic(std::vector<Mat<S>> ms) {
  const Eigen::Index n = common_dim(ms, "periodic sequence");
  auto data = std::make_shared<const std::vector<Mat<S>>>(std::move(ms));
  return generator(
      n, [data](std::size_t i) { return (*data)[(i - 1) % data->size()]; }, "periodic");
}

template <class S>
MatrixSequence<S> MatrixSequence<S>::prefix_periodic(std::vector<Mat<S>> prefix,
                                                     std::vector<Mat<S>> tail) {
  const Eigen::Index n = common_dim(tail, "periodic tail");
  if (!prefix.empty() && common_dim(prefix, "sequence prefix") != n)
    throw DimensionError("prefix and tail dimensions differ");
  auto pre = std::make_shared<const std::vector<Mat<S>>>(std::move(prefix));
  auto tl = std::make_shared<const std::vector<Mat<S>>>(std::move(tail));
  return generator(
      n,
      [pre, tl](std::size_t i) {
        if (i <= pre->size()) return (*pre)[i - 1];
        return (*tl)[(i - 1 - pre->size()) % tl->size()];
      },
      "prefix_periodic");
}

template <class S>
MatrixSequence<S> MatrixSequence<S>::scaled(const MatrixSequence& base, TailModel scale) {
  auto len = base.length();
  if (auto ml = scale.length()) len = len ? std::min(*len, *ml) : *ml;
  return generator(
      base.dim(), [base, scale = std::move(scale)](std::size_t i) { return Mat<S>(scale.value(i) * base.at(i)); },
      "scaled(" + base.name() + ")", len);
}

template <class S>
MatrixSequence<S> MatrixSequence<S>::geometric(Mat<S> b, double c) {
  require_square_finite(b);
  const Eigen::Index n = b.rows();
  return generator(
      n, [b = std::move(b), c](std::size_t i) { return Mat<S>(std::pow(c, double(i)) * b); },
      "geometric");
}

template <class S>
MatrixSequence<S> MatrixSequence<S>::generator(Eigen::Index n, Generator g, std::string name,
                                               std::optional<std::size_t> length) {
  MatrixSequence s;
  s.n_ = n;
  s.gen_ = std::move(g);
  s.name_ = std::move(name);
  s.length_ = length;
  return s;
}

template <class S>
Mat<S> MatrixSequence<S>::at(std::size_t i) const {
  if (i == 0) throw ValidationError("sequence indices start at 1");
  if (length_ && i > *length_)
    throw ValidationError("sequence '" + name_ + "' exhausted at index " + std::to_string(i));
  Mat<S> a = gen_(i);
  if (a.rows() != n_ || a.cols() != n_)
    throw DimensionError("sequence term " + std::to_string(i) + " has wrong dimension");
  if (!a.allFinite())
    throw ValidationError("sequence term " + std::to_string(i) + " has non-finite entries");
  return a;
}

Permutation Permutation::identity() { return {}; }

Permutation Permutation::prefix(std::vector<std::size_t> leading) {
  Permutation p;
  p.kind_ = Kind::Prefix;
  std::size_t mx = 0;
  for (auto v : leading) {
    if (v == 0) throw ValidationError("permutation indices start at 1");
    mx = std::max(mx, v);
  }
  std::vector<bool> used(mx + 1, false);
  for (auto v : leading) {
    if (used[v]) throw ValidationError("permutation prefix repeats index " + std::to_string(v));
    used[v] = true;
  }
  p.leading_ = leading;
  p.table_ = std::move(leading);
  for (std::size_t v = 1; v <= mx; ++v)
    if (!used[v]) p.table_.push_back(v);
  return p;
}

Permutation Permutation::block_shuffle(std::size_t size, std::uint64_t seed) {
  if (size == 0) throw ValidationError("block size must be positive");
  Permutation p;
  p.kind_ = Kind::BlockShuffle;
  p.block_ = size;
  p.seed_ = seed;
  return p;
}

std::size_t Permutation::operator()(std::size_t j) const {
  if (j == 0) throw ValidationError("permutation indices start at 1");
  switch (kind_) {
    case Kind::Identity:
      return j;
    case Kind::Prefix:
      return j <= table_.size() ? table_[j - 1] : j;
    case Kind::BlockShuffle: {
      const std::size_t b = (j - 1) / block_;
      std::vector<std::size_t> idx(block_);
      std::iota(idx.begin(), idx.end(), b * block_ + 1);
      Rng rng(derive_seed(seed_, b));
      std::shuffle(idx.begin(), idx.end(), rng);
      return idx[(j - 1) % block_];
    }
  }
  return j;
}

std::string Permutation::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Identity:
      os << "identity";
      break;
    case Kind::Prefix:
      os << "prefix[";
      for (std::size_t i = 0; i < leading_.size(); ++i) os << (i ? "," : "") << leading_[i];
      os << "]";
      break;
    case Kind::BlockShuffle:
      os << "block_shuffle(" << block_ << ", seed " << seed_ << ")";
      break;
  }
  return os.str();
}

std::string to_string(Ordering o) {
  switch (o) {
    case Ordering::LeftAppend: return "LeftAppend";
    case Ordering::RightAppend: return "RightAppend";
    case Ordering::SeededRandomOrder: return "SeededRandomOrder";
    case Ordering::ExplicitOrders: return "ExplicitOrders";
  }
  return "?";
}

Ordering ordering_from_string(const std::string& s) {
  for (auto o : {Ordering::LeftAppend, Ordering::RightAppend, Ordering::SeededRandomOrder,
                 Ordering::ExplicitOrders})
    if (to_string(o) == s) return o;
  throw ValidationError("unknown ordering policy '" + s + "'");
}

std::string to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::ConvergedBelow: return "ConvergedBelow";
    case TraceStatus::BoundedBy: return "BoundedBy";
    case TraceStatus::Exhausted: return "Exhausted";
  }
  return "?";
}

template <class S>
GeneralProductStream<S>::GeneralProductStream(MatrixSequence<S> seq, ProductSchedule sched)
    : seq_(std::move(seq)), sched_(std::move(sched)) {}

template <class S>
std::size_t GeneralProductStream<S>::window_index(std::size_t k) const {
  return sched_.permutation(sched_.p + k);
}

template <class S>
const Mat<S>& GeneralProductStream<S>::window_factor(std::size_t k) {
  while (window_.size() < k) window_.push_back(seq_.at(window_index(window_.size() + 1)));
  return window_[k - 1];
}

template <class S>
std::optional<ProductStep<S>> GeneralProductStream<S>::next() {
  if (overflow_) return std::nullopt;
  const std::size_t r = ++r_;
  const Eigen::Index n = seq_.dim();
  std::vector<std::size_t> order;
  switch (sched_.ordering) {
    case Ordering::LeftAppend:
    case Ordering::RightAppend: {
      const Mat<S> b = seq_.at(window_index(r));
      const bool left = sched_.ordering == Ordering::LeftAppend;
      if (r == 1)
        current_ = b;
      else
        current_ = left ? Mat<S>(current_ * b) : Mat<S>(b * current_);
      if (left)
        factors_.push_back(window_index(r));
      else
        factors_.insert(factors_.begin(), window_index(r));
      break;
    }
    case Ordering::SeededRandomOrder: {
      order.resize(r);
      std::iota(order.begin(), order.end(), std::size_t{1});
      Rng rng(derive_seed(sched_.seed, r));
      std::shuffle(order.begin(), order.end(), rng);
      break;
    }
    case Ordering::ExplicitOrders: {
      if (r > sched_.orders.size())
        throw ValidationError("ordering list has " + std::to_string(sched_.orders.size()) +
                              " entries, step " + std::to_string(r) + " requested");
      order = sched_.orders[r - 1];
      std::vector<std::size_t> sorted = order;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t k = 0; k < sorted.size(); ++k)
        if (sorted[k] != k + 1 || sorted.size() != r)
          throw ValidationError("order for step " + std::to_string(r) +
                                " is not a permutation of positions 1.." + std::to_string(r));
      break;
    }
  }
  if (!order.empty()) {
    Mat<S> c = Mat<S>::Identity(n, n);
    factors_.clear();
    for (auto k : order) {
      c = c * window_factor(k);
      factors_.push_back(window_index(k));
    }
    current_ = std::move(c);
  }
  if (!current_.allFinite() || (n > 0 && current_.cwiseAbs().maxCoeff() > 1e300)) {
    overflow_ = true;
    return std::nullopt;
  }
  return ProductStep<S>{r, current_, factors_};
}

template <class S>
std::vector<ProductStep<S>> stream_general_product(const MatrixSequence<S>& seq,
                                                   const ProductSchedule& sched,
                                                   std::size_t max_r) {
  if (max_r == 0) throw ValidationError("max_r must be at least 1");
  GeneralProductStream<S> st(seq, sched);
  std::vector<ProductStep<S>> out;
  for (std::size_t r = 1; r <= max_r; ++r) {
    auto s = st.next();
    if (!s) throw NumericalError("product overflow at step " + std::to_string(r));
    out.push_back(std::move(*s));
  }
  return out;
}

bool factor_multiset_ok(const std::vector<std::size_t>& factors, const ProductSchedule& sched,
                        std::size_t r) {
  std::vector<std::size_t> want;
  for (std::size_t k = 1; k <= r; ++k) want.push_back(sched.permutation(sched.p + k));
  std::vector<std::size_t> got = factors;
  std::sort(want.begin(), want.end());
  std::sort(got.begin(), got.end());
  return want == got;
}

template <class S>
Measure<S> operator_norm_measure(NormSpec<S> norm, SearchOptions opts) {
  return [norm = std::move(norm), opts](const Mat<S>& c) {
    return operator_norm(c, norm, opts).value;
  };
}

template <class S>
Measure<S> partial_norm_measure(Subspace<S> h, NormSpec<S> norm, SearchOptions opts) {
  return [h = std::move(h), norm = std::move(norm), opts](const Mat<S>& c) {
    return partial_norm(c, h, norm, opts).value;
  };
}

template <class S>
std::vector<double> bound_from_condition_C(const MatrixSequence<S>& seq,
                                           const ProductSchedule& sched, const Measure<S>& mu,
                                           std::size_t r_max) {
  std::vector<double> out;
  double m = 1.0;
  for (std::size_t i = 1; i <= r_max; ++i) {
    m *= mu_plus(mu(seq.at(sched.permutation(sched.p + i))));
    out.push_back(m);
  }
  return out;
}

template <class S>
ConvergenceTrace monitor_convergence(const MatrixSequence<S>& seq, const ProductSchedule& sched,
                                     const Measure<S>& mu, double threshold, std::size_t max_r,
                                     const MonitorOptions& opts) {
  if (!(threshold > 0.0)) throw ValidationError("threshold must be positive");
  if (max_r == 0) throw ValidationError("max_r must be at least 1");
  ConvergenceTrace tr;
  tr.ordering = sched.ordering;
  tr.threshold = threshold;
  GeneralProductStream<S> st(seq, sched);
  double m_plus = 1.0, m_minus = 1.0;
  for (std::size_t r = 1; r <= max_r; ++r) {
    auto step = st.next();
    if (!step) {
      tr.overflow = true;
      break;
    }
    tr.factors_ok = tr.factors_ok && factor_multiset_ok(step->factors, sched, r);
    const double f = mu(seq.at(sched.permutation(sched.p + r)));
    m_plus *= mu_plus(f);
    m_minus *= mu_minus(f);
    TraceStep ts;
    ts.r = r;
    ts.mu = mu(step->product);
    if (!std::isfinite(ts.mu) || ts.mu > opts.overflow_limit) {
      tr.overflow = true;
      break;
    }
    if (ts.mu < opts.underflow_clamp) {
      ts.mu = opts.underflow_clamp;
      ts.clamped = true;
    }
    ts.bound = m_plus;
    ts.envelope = std::max(m_plus * m_minus, opts.underflow_clamp);
    tr.steps.push_back(ts);
    if (!tr.crossed_at && ts.mu < threshold) {
      tr.crossed_at = r;
      if (opts.stop_at_threshold) break;
    }
  }
  tr.bound_M = m_plus;
  if (tr.crossed_at)
    tr.status = TraceStatus::ConvergedBelow;
  else if (m_plus > 1.0)
    tr.status = TraceStatus::BoundedBy;
  else
    tr.status = TraceStatus::Exhausted;
  return tr;
}

template <class S>
MatrixSequence<S> restrict_stream(const MatrixSequence<S>& seq, const Subspace<S>& h,
                                  double tol) {
  if (h.ambient_dim() != seq.dim())
    throw DimensionError("subspace and sequence dimensions differ");
  return MatrixSequence<S>::generator(
      h.dim(),
      [seq, h, tol](std::size_t i) {
        const Mat<S> a = seq.at(i);
        const auto inv = check_invariance(a, h, tol);
        if (!inv.invariant)
          throw InvarianceError("subspace not invariant under sequence term " + std::to_string(i),
                                inv.residual, static_cast<long>(i));
        return restrict(a, h, tol);
      },
      "restrict(" + seq.name() + ")", seq.length());
}

#define PARNORM_INSTANTIATE(S)                                                               \
  template class MatrixSequence<S>;                                                          \
  template class GeneralProductStream<S>;                                                    \
  template std::vector<ProductStep<S>> stream_general_product(                               \
      const MatrixSequence<S>&, const ProductSchedule&, std::size_t);                        \
  template Measure<S> operator_norm_measure(NormSpec<S>, SearchOptions);                     \
  template Measure<S> partial_norm_measure(Subspace<S>, NormSpec<S>, SearchOptions);         \
  template std::vector<double> bound_from_condition_C(                                       \
      const MatrixSequence<S>&, const ProductSchedule&, const Measure<S>&, std::size_t);     \
  template ConvergenceTrace monitor_convergence(const MatrixSequence<S>&,                    \
                                                const ProductSchedule&, const Measure<S>&,   \
                                                double, std::size_t, const MonitorOptions&); \
  template MatrixSequence<S> restrict_stream(const MatrixSequence<S>&, const Subspace<S>&,   \
                                             double);

PARNORM_INSTANTIATE(double)
PARNORM_INSTANTIATE(Complex)
#undef PARNORM_INSTANTIATE

}  // namespace parnorm
