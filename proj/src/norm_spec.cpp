#include "parnorm/norm_spec.hpp"

#include <cmath>

#include "parnorm/kernels.hpp"

namespace parnorm {

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return "L1";
    case NormKind::L2: return "L2";
    case NormKind::Linf: return "Linf";
    case NormKind::WeightedL1: return "WeightedL1";
    case NormKind::Composite: return "Composite";
  }
  return "?";
}

template <class S>
struct NormSpec<S>::CompositeData {
  NormSpec base;
  Subspace<S> h;
  Subspace<S> k;
  Mat<S> coeff;  // [B_H B_K]^{-1}
  double cond = 1.0;
};

template <class S>
NormSpec<S> NormSpec<S>::weighted_l1(Vector weights) {
  if (weights.size() == 0) throw ValidationError("weighted L1 norm needs weights");
  if (!weights.allFinite() || weights.minCoeff() <= 0.0)
    throw ValidationError("weighted L1 weights must be finite and positive");
  NormSpec n(NormKind::WeightedL1);
  n.weights_ = std::move(weights);
  return n;
}

template <class S>
NormSpec<S> NormSpec<S>::composite(NormSpec base, Subspace<S> h, Subspace<S> k,
                                   double cond_limit) {
  const Eigen::Index n = h.ambient_dim();
  if (k.ambient_dim() != n) throw DimensionError("H and K live in different spaces");
  if (auto bd = base.dimension(); bd && *bd != n)
    throw DimensionError("base norm dimension does not match H and K");
  if (h.dim() + k.dim() != n)
    throw ValidationError("H + K is not a direct sum decomposition: dim H + dim K = " +
                          std::to_string(h.dim() + k.dim()) + ", n = " + std::to_string(n));
  Mat<S> joined(n, n);
  joined << h.basis(), k.basis();
  double cond = 1.0;
  if (n > 0) {
    Eigen::JacobiSVD<Mat<S>> svd(joined);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  }
  if (!(cond <= cond_limit))
    throw NumericalError("H and K intersect (or nearly): condition number " +
                         std::to_string(cond));
  auto data = std::make_shared<CompositeData>();
  data->base = std::move(base);
  data->h = std::move(h);
  data->k = std::move(k);
  data->coeff = n > 0 ? Mat<S>(joined.inverse()) : Mat<S>(0, 0);
  data->cond = cond;
  NormSpec out(NormKind::Composite);
  out.comp_ = std::move(data);
  return out;
}

template <class S>
const NormSpec<S>& NormSpec<S>::base() const {
  if (!comp_) throw Error("base() on a non-composite norm");
  return comp_->base;
}

template <class S>
const Subspace<S>& NormSpec<S>::h() const {
  if (!comp_) throw Error("h() on a non-composite norm");
  return comp_->h;
}

template <class S>
const Subspace<S>& NormSpec<S>::k() const {
  if (!comp_) throw Error("k() on a non-composite norm");
  return comp_->k;
}

template <class S>
double NormSpec<S>::condition() const {
  return comp_ ? comp_->cond : 1.0;
}

template <class S>
std::pair<Vec<S>, Vec<S>> NormSpec<S>::split(const Vec<S>& x) const {
  if (!comp_) throw Error("split() on a non-composite norm");
  const auto& c = *comp_;
  if (x.size() != c.coeff.rows()) throw DimensionError("vector length does not match norm");
  const Vec<S> coef = c.coeff * x;
  const Eigen::Index dh = c.h.dim();
  Vec<S> y = c.h.basis() * coef.head(dh);
  Vec<S> z = c.k.basis() * coef.tail(c.k.dim());
  return {std::move(y), std::move(z)};
}

template <class S>
double NormSpec<S>::operator()(const Vec<S>& x) const {
  const auto n = static_cast<std::size_t>(x.size());
  if constexpr (std::is_same_v<S, double>) {
    const auto& kt = kernels::active();
    switch (kind_) {
      case NormKind::L1: return kt.abs_sum(x.data(), n);
      case NormKind::L2: return std::sqrt(kt.sum_squares(x.data(), n));
      case NormKind::Linf: return kt.abs_max(x.data(), n);
      case NormKind::WeightedL1:
        if (weights_.size() != x.size()) throw DimensionError("weights do not match vector");
        return kt.weighted_abs_sum(weights_.data(), x.data(), n);
      case NormKind::Composite: break;
    }
  } else {
    switch (kind_) {
      case NormKind::L1: return x.cwiseAbs().sum();
      case NormKind::L2: return x.norm();
      case NormKind::Linf: return n == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
      case NormKind::WeightedL1:
        if (weights_.size() != x.size()) throw DimensionError("weights do not match vector");
        return weights_.dot(x.cwiseAbs());
      case NormKind::Composite: break;
    }
  }
  const auto [y, z] = split(x);
  return comp_->base(y) + comp_->base(z);
}

template <class S>
std::optional<Eigen::Index> NormSpec<S>::dimension() const {
  if (kind_ == NormKind::WeightedL1) return weights_.size();
  if (kind_ == NormKind::Composite) return comp_->h.ambient_dim();
  return std::nullopt;
}

template <class S>
std::string NormSpec<S>::describe() const {
  if (kind_ != NormKind::Composite) return to_string(kind_);
  return "Composite(" + comp_->base.describe() + ", dim H=" + std::to_string(comp_->h.dim()) +
         ", dim K=" + std::to_string(comp_->k.dim()) + ")";
}

template class NormSpec<double>;
template class NormSpec<Complex>;

}  // namespace parnorm
