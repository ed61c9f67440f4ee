#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace parnorm {

enum class SeriesVerdict { Holds, Fails, Undecidable };
enum class Side { Above, Below };

std::string to_string(SeriesVerdict v);
std::string to_string(Side s);

double mu_plus(double v);
double mu_minus(double v);

// Every stride-th term after skipping `offset` terms: term j is term
// offset + 1 + stride*(j - 1) of the parent (j >= 1).
struct Subfamily {
  std::size_t offset = 0;
  std::size_t stride = 1;
};

// Analytic description of a sequence of norm values mu_1, mu_2, ...
class TailModel {
 public:
  enum class Family { FiniteSupport, Power, Constant, Periodic, Prefix, Finite };

  // values for i <= N, then 1.
  static TailModel finite_support(std::vector<double> values);
  // 1 + a / i^p (Above) or 1 - a / i^p (Below).
  static TailModel p_series(double a, double p, Side side);
  // limit +- a / (scale * i + shift)^p.
  static TailModel power(double limit, double a, double p, Side side, double index_scale = 1.0,
                         double index_shift = 0.0);
  static TailModel constant(double c);
  static TailModel periodic(std::vector<double> values);
  // Overrides the first values.size() terms of `tail` (indices stay absolute).
  static TailModel prefix(std::vector<double> values, TailModel tail);
  // Raw data: diagnostics only, never a verdict.
  static TailModel finite(std::vector<double> values);

  Family family() const { return family_; }
  const std::vector<double>& values() const { return values_; }
  double limit() const { return limit_; }
  double a() const { return a_; }
  double p() const { return p_; }
  Side side() const { return side_; }
  double index_scale() const { return scale_; }
  double index_shift() const { return shift_; }
  const TailModel* tail() const { return tail_.get(); }

  // mu_i, i >= 1. Throws std::out_of_range past the end of a Finite model.
  double value(std::size_t i) const;
  std::vector<double> take(std::size_t count) const;
  std::optional<std::size_t> length() const;

  TailModel subsample(const Subfamily& sub) const;

  // Nullopt when the family carries no analytic limit structure.
  std::optional<std::vector<double>> accumulation_points() const;
  // Whether every term is <= 1; Undecidable for raw data.
  SeriesVerdict bounded_by_one() const;

  std::string describe() const;

  bool operator==(const TailModel& o) const;

 private:
  TailModel() = default;
  void validate() const;

  Family family_ = Family::Constant;
  std::vector<double> values_;
  double limit_ = 1.0;
  double a_ = 0.0;
  double p_ = 1.0;
  Side side_ = Side::Below;
  double scale_ = 1.0;
  double shift_ = 0.0;
  std::shared_ptr<const TailModel> tail_;
};

// Sum (mu+ - 1) converges.
SeriesVerdict check_condition_C(const TailModel& model);
// Sum (1 - mu-) diverges.
SeriesVerdict check_condition_D(const TailModel& model);

struct SubsequenceVerdict {
  SeriesVerdict verdict = SeriesVerdict::Undecidable;
  std::optional<Subfamily> witness;  // first declared subfamily that Holds
};

// Condition (D) on at least one of the declared subfamilies.
SubsequenceVerdict check_condition_D_subsequence(const TailModel& model,
                                                 const std::vector<Subfamily>& candidates);

// Subfamilies whose terms recur below `threshold` (strictly). Limited to
// families with exact structure: constants, periods, convergent powers.
std::vector<Subfamily> scan_subsequences(const TailModel& model, double threshold);

struct PartialSumReport {
  std::vector<double> sum_excess;   // running sum of (mu+ - 1)
  std::vector<double> sum_deficit;  // running sum of (1 - mu-)
  std::vector<double> prod_plus;    // running product of mu+
  std::vector<double> prod_minus;   // running product of mu-
};

PartialSumReport partial_sum_diagnostics(const std::vector<double>& values);

}  // namespace parnorm
