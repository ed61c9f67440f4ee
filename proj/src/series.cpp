#include "parnorm/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "parnorm/types.hpp"

namespace parnorm {

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::Holds: return "Holds";
    case SeriesVerdict::Fails: return "Fails";
    case SeriesVerdict::Undecidable: return "Undecidable";
  }
  return "?";
}

std::string to_string(Side s) { return s == Side::Above ? "Above" : "Below"; }

double mu_plus(double v) {
  if (!(v >= 0.0)) throw ValidationError("mu_plus needs a nonnegative value");
  return std::max(v, 1.0);
}

double mu_minus(double v) {
  if (!(v >= 0.0)) throw ValidationError("mu_minus needs a nonnegative value");
  return std::min(v, 1.0);
}

namespace {

void require_nonnegative(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] >= 0.0) || !std::isfinite(v[i]))
      throw ValidationError(std::string(what) + ": term " + std::to_string(i + 1) +
                            " is not a finite nonnegative number");
}

std::size_t count_within(std::size_t m, const Subfamily& s) {
  return m > s.offset ? (m - s.offset - 1) / s.stride + 1 : 0;
}

}  // namespace

TailModel TailModel::finite_support(std::vector<double> values) {
  TailModel t;
  t.family_ = Family::FiniteSupport;
  t.values_ = std::move(values);
  t.validate();
  return t;
}

TailModel TailModel::p_series(double a, double p, Side side) {
  return power(1.0, a, p, side);
}

TailModel TailModel::power(double limit, double a, double p, Side side, double index_scale,
                           double index_shift) {
  TailModel t;
  t.family_ = Family::Power;
  t.limit_ = limit;
  t.a_ = a;
  t.p_ = p;
  t.side_ = side;
  t.scale_ = index_scale;
  t.shift_ = index_shift;
  t.validate();
  return t;
}

TailModel TailModel::constant(double c) {
  TailModel t;
  t.family_ = Family::Constant;
  t.limit_ = c;
  t.validate();
  return t;
}

TailModel TailModel::periodic(std::vector<double> values) {
  TailModel t;
  t.family_ = Family::Periodic;
  t.values_ = std::move(values);
  t.validate();
  return t;
}

TailModel TailModel::prefix(std::vector<double> values, TailModel tail) {
  TailModel t;
  t.family_ = Family::Prefix;
  t.values_ = std::move(values);
  t.tail_ = std::make_shared<const TailModel>(std::move(tail));
  t.validate();
  return t;
}

TailModel TailModel::finite(std::vector<double> values) {
  TailModel t;
  t.family_ = Family::Finite;
  t.values_ = std::move(values);
  t.validate();
  return t;
}

void TailModel::validate() const {
  switch (family_) {
    case Family::FiniteSupport:
    case Family::Prefix:
    case Family::Finite:
      require_nonnegative(values_, "tail model");
      break;
    case Family::Periodic:
      if (values_.empty()) throw ValidationError("periodic model needs at least one value");
      require_nonnegative(values_, "periodic model");
      break;
    case Family::Constant:
      if (!(limit_ >= 0.0) || !std::isfinite(limit_))
        throw ValidationError("constant model needs a finite nonnegative value");
      break;
    case Family::Power:
      if (!(a_ >= 0.0) || !(p_ > 0.0) || !(scale_ > 0.0) || !(scale_ + shift_ > 0.0) ||
          !std::isfinite(limit_) || !std::isfinite(a_) || !std::isfinite(shift_))
        throw ValidationError("power model needs a >= 0, p > 0, scale > 0, scale + shift > 0");
      if (side_ == Side::Below && value(1) < 0.0)
        throw ValidationError("power model produces a negative first term");
      if (limit_ < 0.0) throw ValidationError("power model needs a nonnegative limit");
      break;
  }
}

double TailModel::value(std::size_t i) const {
  if (i == 0) throw std::out_of_range("tail model indices start at 1");
  switch (family_) {
    case Family::FiniteSupport:
      return i <= values_.size() ? values_[i - 1] : 1.0;
    case Family::Power: {
      const double d = a_ / std::pow(scale_ * static_cast<double>(i) + shift_, p_);
      return side_ == Side::Above ? limit_ + d : limit_ - d;
    }
    case Family::Constant:
      return limit_;
    case Family::Periodic:
      return values_[(i - 1) % values_.size()];
    case Family::Prefix:
      return i <= values_.size() ? values_[i - 1] : tail_->value(i);
    case Family::Finite:
      if (i > values_.size()) throw std::out_of_range("finite model exhausted");
      return values_[i - 1];
  }
  return 0.0;
}

std::vector<double> TailModel::take(std::size_t count) const {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) out.push_back(value(i));
  return out;
}

std::optional<std::size_t> TailModel::length() const {
  if (family_ == Family::Finite) return values_.size();
  return std::nullopt;
}

TailModel TailModel::subsample(const Subfamily& s) const {
  if (s.stride == 0) throw ValidationError("subfamily stride must be positive");
  auto pick = [&](std::size_t count) {
    std::vector<double> v;
    for (std::size_t j = 1; j <= count; ++j) v.push_back(value(s.offset + 1 + s.stride * (j - 1)));
    return v;
  };
  switch (family_) {
    case Family::Constant:
      return *this;
    case Family::Power:
      return power(limit_, a_, p_, side_, scale_ * static_cast<double>(s.stride),
                   scale_ * (static_cast<double>(s.offset) + 1.0 - static_cast<double>(s.stride)) +
                       shift_);
    case Family::Periodic:
      return periodic(pick(values_.size()));
    case Family::FiniteSupport:
      return finite_support(pick(count_within(values_.size(), s)));
    case Family::Prefix:
      return prefix(pick(count_within(values_.size(), s)), tail_->subsample(s));
    case Family::Finite:
      return finite(pick(count_within(values_.size(), s)));
  }
  return *this;
}

std::optional<std::vector<double>> TailModel::accumulation_points() const {
  switch (family_) {
    case Family::Constant:
    case Family::Power:
      return std::vector<double>{limit_};
    case Family::Periodic: {
      std::vector<double> v = values_;
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      return v;
    }
    case Family::FiniteSupport:
      return std::vector<double>{1.0};
    case Family::Prefix:
      return tail_->accumulation_points();
    case Family::Finite:
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

SeriesVerdict bounded_from(const TailModel& t, std::size_t start) {
  using F = TailModel::Family;
  auto all_le = [](const std::vector<double>& v, std::size_t from) {
    for (std::size_t i = from; i <= v.size(); ++i)
      if (v[i - 1] > 1.0) return false;
    return true;
  };
  switch (t.family()) {
    case F::Constant:
      return t.limit() <= 1.0 ? SeriesVerdict::Holds : SeriesVerdict::Fails;
    case F::Periodic:
      return all_le(t.values(), 1) ? SeriesVerdict::Holds : SeriesVerdict::Fails;
    case F::FiniteSupport:
      return all_le(t.values(), start) ? SeriesVerdict::Holds : SeriesVerdict::Fails;
    case F::Power:
      if (t.side() == Side::Below || t.a() == 0.0)
        return t.limit() <= 1.0 ? SeriesVerdict::Holds : SeriesVerdict::Fails;
      return t.value(start) <= 1.0 ? SeriesVerdict::Holds : SeriesVerdict::Fails;
    case F::Prefix:
      if (!all_le(t.values(), start)) return SeriesVerdict::Fails;
      return bounded_from(*t.tail(), std::max(start, t.values().size() + 1));
    case F::Finite:
      return SeriesVerdict::Undecidable;
  }
  return SeriesVerdict::Undecidable;
}

}  // namespace

SeriesVerdict TailModel::bounded_by_one() const { return bounded_from(*this, 1); }

std::string TailModel::describe() const {
  std::ostringstream os;
  auto list = [&](const std::vector<double>& v) {
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ']';
  };
  switch (family_) {
    case Family::FiniteSupport:
      os << "finite_support";
      list(values_);
      break;
    case Family::Power:
      os << limit_ << (side_ == Side::Above ? " + " : " - ") << a_ << "/(" << scale_ << "*i + "
         << shift_ << ")^" << p_;
      break;
    case Family::Constant:
      os << "constant " << limit_;
      break;
    case Family::Periodic:
      os << "periodic";
      list(values_);
      break;
    case Family::Prefix:
      os << "prefix";
      list(values_);
      os << " then " << tail_->describe();
      break;
    case Family::Finite:
      os << "finite";
      list(values_);
      break;
  }
  return os.str();
}

bool TailModel::operator==(const TailModel& o) const {
  if (family_ != o.family_ || values_ != o.values_) return false;
  switch (family_) {
    case Family::Power:
      return limit_ == o.limit_ && a_ == o.a_ && p_ == o.p_ && side_ == o.side_ &&
             scale_ == o.scale_ && shift_ == o.shift_;
    case Family::Constant:
      return limit_ == o.limit_;
    case Family::Prefix:
      return *tail_ == *o.tail_;
    default:
      return true;
  }
}

SeriesVerdict check_condition_C(const TailModel& m) {
  using F = TailModel::Family;
  switch (m.family()) {
    case F::FiniteSupport:
      return SeriesVerdict::Holds;
    case F::Constant:
      return m.limit() <= 1.0 ? SeriesVerdict::Holds : SeriesVerdict::Fails;
    case F::Power:
      if (m.limit() != 1.0 || m.a() == 0.0)
        return m.limit() <= 1.0 ? SeriesVerdict::Holds : SeriesVerdict::Fails;
      if (m.side() == Side::Below) return SeriesVerdict::Holds;
      return m.p() > 1.0 ? SeriesVerdict::Holds : SeriesVerdict::Fails;
    case F::Periodic:
      for (double v : m.values())
        if (v > 1.0) return SeriesVerdict::Fails;
      return SeriesVerdict::Holds;
    case F::Prefix:
      return check_condition_C(*m.tail());
    case F::Finite:
      return SeriesVerdict::Undecidable;
  }
  return SeriesVerdict::Undecidable;
}

SeriesVerdict check_condition_D(const TailModel& m) {
  using F = TailModel::Family;
  switch (m.family()) {
    case F::FiniteSupport:
      return SeriesVerdict::Fails;
    case F::Constant:
      return m.limit() < 1.0 ? SeriesVerdict::Holds : SeriesVerdict::Fails;
    case F::Power:
      if (m.limit() != 1.0 || m.a() == 0.0)
        return m.limit() < 1.0 ? SeriesVerdict::Holds : SeriesVerdict::Fails;
      if (m.side() == Side::Above) return SeriesVerdict::Fails;
      return m.p() <= 1.0 ? SeriesVerdict::Holds : SeriesVerdict::Fails;
    case F::Periodic:
      for (double v : m.values())
        if (v < 1.0) return SeriesVerdict::Holds;
      return SeriesVerdict::Fails;
    case F::Prefix:
      return check_condition_D(*m.tail());
    case F::Finite:
      return SeriesVerdict::Undecidable;
  }
  return SeriesVerdict::Undecidable;
}

SubsequenceVerdict check_condition_D_subsequence(const TailModel& model,
                                                 const std::vector<Subfamily>& candidates) {
  SubsequenceVerdict out;
  bool all_decided = !candidates.empty();
  for (const auto& c : candidates) {
    const auto v = check_condition_D(model.subsample(c));
    if (v == SeriesVerdict::Holds) {
      out.verdict = SeriesVerdict::Holds;
      out.witness = c;
      return out;
    }
    all_decided = all_decided && v == SeriesVerdict::Fails;
  }
  out.verdict = all_decided ? SeriesVerdict::Fails : SeriesVerdict::Undecidable;
  return out;
}

std::vector<Subfamily> scan_subsequences(const TailModel& m, double threshold) {
  using F = TailModel::Family;
  std::vector<Subfamily> out;
  switch (m.family()) {
    case F::Constant:
      if (m.limit() < threshold) out.push_back({0, 1});
      break;
    case F::Power:
      if (m.limit() < threshold) {
        std::size_t i = 1;
        if (m.side() == Side::Above)
          while (!(m.value(i) < threshold)) i *= 2;
        out.push_back({i - 1, 1});
      }
      break;
    case F::Periodic:
      for (std::size_t k = 0; k < m.values().size(); ++k)
        if (m.values()[k] < threshold) out.push_back({k, m.values().size()});
      break;
    case F::FiniteSupport:
      if (1.0 < threshold) out.push_back({m.values().size(), 1});
      break;
    case F::Prefix: {
      const std::size_t len = m.values().size();
      for (auto s : scan_subsequences(*m.tail(), threshold)) {
        if (s.offset < len) s.offset += s.stride * ((len - s.offset + s.stride - 1) / s.stride);
        out.push_back(s);
      }
      break;
    }
    case F::Finite:
      break;
  }
  return out;
}

PartialSumReport partial_sum_diagnostics(const std::vector<double>& values) {
  require_nonnegative(values, "partial_sum_diagnostics");
  PartialSumReport r;
  double se = 0.0, sd = 0.0, pp = 1.0, pm = 1.0;
  for (double v : values) {
    se += mu_plus(v) - 1.0;
    sd += 1.0 - mu_minus(v);
    pp *= mu_plus(v);
    pm *= mu_minus(v);
    r.sum_excess.push_back(se);
    r.sum_deficit.push_back(sd);
    r.prod_plus.push_back(pp);
    r.prod_minus.push_back(pm);
  }
  return r;
}

}  // namespace parnorm
