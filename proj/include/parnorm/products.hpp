#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "parnorm/norms.hpp"
#include "parnorm/series.hpp"

namespace parnorm {

// A_1, A_2, ... (1-based). Finite lists throw once exhausted.
template <class S>
class MatrixSequence {
 public:
  using Generator = std::function<Mat<S>(std::size_t)>;

  static MatrixSequence list(std::vector<Mat<S>> matrices);
  static MatrixSequence constant(Mat<S> a);
  static MatrixSequence periodic(std::vector<Mat<S>> matrices);
  // prefix, then the tail list repeated.
  static MatrixSequence prefix_periodic(std::vector<Mat<S>> prefix, std::vector<Mat<S>> tail);
  // A_i = mu_i * B_i where mu comes from a tail model.
  static MatrixSequence scaled(const MatrixSequence& base, TailModel scale);
  // A_i = c^i * B.
  static MatrixSequence geometric(Mat<S> b, double c);
  static MatrixSequence generator(Eigen::Index n, Generator g, std::string name,
                                  std::optional<std::size_t> length = std::nullopt);

  Mat<S> at(std::size_t i) const;
  Eigen::Index dim() const { return n_; }
  const std::string& name() const { return name_; }
  std::optional<std::size_t> length() const { return length_; }

 private:
  Eigen::Index n_ = 0;
  Generator gen_;
  std::string name_;
  std::optional<std::size_t> length_;
};

// Bijection j -> index used to form B_j = A_{perm(j)}.
class Permutation {
 public:
  enum class Kind { Identity, Prefix, BlockShuffle };

  static Permutation identity();
  // The listed indices first, then the remaining indices of 1..max(list) in
  // increasing order, then the identity.
  static Permutation prefix(std::vector<std::size_t> leading);
  // Each block {b*size+1, ..., (b+1)*size} is shuffled with its own seed.
  // Displacement stays below `size`.
  static Permutation block_shuffle(std::size_t size, std::uint64_t seed);

  std::size_t operator()(std::size_t j) const;
  Kind kind() const { return kind_; }
  const std::vector<std::size_t>& leading() const { return leading_; }
  std::size_t block_size() const { return block_; }
  std::uint64_t seed() const { return seed_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::Identity;
  std::vector<std::size_t> leading_;
  std::vector<std::size_t> table_;
  std::size_t block_ = 1;
  std::uint64_t seed_ = 0;
};

enum class Ordering { LeftAppend, RightAppend, SeededRandomOrder, ExplicitOrders };

std::string to_string(Ordering o);
Ordering ordering_from_string(const std::string& s);

struct ProductSchedule {
  Permutation permutation = Permutation::identity();
  std::size_t p = 0;
  Ordering ordering = Ordering::LeftAppend;
  std::uint64_t seed = 0;
  // orders[r-1] lists window positions 1..r (position k is B_{p+k}),
  // leftmost factor first.
  std::vector<std::vector<std::size_t>> orders;
};

template <class S>
struct ProductStep {
  std::size_t r = 0;
  Mat<S> product;
  std::vector<std::size_t> factors;  // sequence indices, leftmost first
};

// Streams C_{p,1}, C_{p,2}, ... for one schedule.
template <class S>
class GeneralProductStream {
 public:
  GeneralProductStream(MatrixSequence<S> seq, ProductSchedule sched);

  // Nullopt after max_r is exceeded or the stream stopped on overflow.
  std::optional<ProductStep<S>> next();
  bool overflowed() const { return overflow_; }
  // Window factor B_{p+k}: its sequence index and matrix.
  std::size_t window_index(std::size_t k) const;
  const Mat<S>& window_factor(std::size_t k);

 private:
  MatrixSequence<S> seq_;
  ProductSchedule sched_;
  std::size_t r_ = 0;
  Mat<S> current_;
  std::vector<std::size_t> factors_;
  std::vector<Mat<S>> window_;
  bool overflow_ = false;
};

template <class S>
std::vector<ProductStep<S>> stream_general_product(const MatrixSequence<S>& seq,
                                                   const ProductSchedule& sched,
                                                   std::size_t max_r);

// Factor multiset of a step equals {perm(p+1), ..., perm(p+r)}.
bool factor_multiset_ok(const std::vector<std::size_t>& factors, const ProductSchedule& sched,
                        std::size_t r);

template <class S>
using Measure = std::function<double(const Mat<S>&)>;

template <class S>
Measure<S> operator_norm_measure(NormSpec<S> norm, SearchOptions opts = {});
template <class S>
Measure<S> partial_norm_measure(Subspace<S> h, NormSpec<S> norm, SearchOptions opts = {});

// Running products M_r = prod_{i <= r} mu+(B_{p+i}).
template <class S>
std::vector<double> bound_from_condition_C(const MatrixSequence<S>& seq,
                                           const ProductSchedule& sched, const Measure<S>& mu,
                                           std::size_t r_max);

enum class TraceStatus { ConvergedBelow, BoundedBy, Exhausted };
std::string to_string(TraceStatus s);

struct TraceStep {
  std::size_t r = 0;
  double mu = 0.0;
  double envelope = 0.0;  // prod mu(B_{p+i}) = M_r * prod mu-(B_{p+i})
  double bound = 1.0;     // M_r
  bool clamped = false;
};

struct ConvergenceTrace {
  std::vector<TraceStep> steps;
  Ordering ordering = Ordering::LeftAppend;
  TraceStatus status = TraceStatus::Exhausted;
  double threshold = 0.0;
  std::optional<std::size_t> crossed_at;
  std::optional<double> bound_M;
  bool overflow = false;
  bool factors_ok = true;
};

struct MonitorOptions {
  bool stop_at_threshold = true;
  double underflow_clamp = 1e-300;
  double overflow_limit = 1e300;
};

template <class S>
ConvergenceTrace monitor_convergence(const MatrixSequence<S>& seq, const ProductSchedule& sched,
                                     const Measure<S>& mu, double threshold, std::size_t max_r,
                                     const MonitorOptions& opts = {});

// Sequence of restrictions A_i|H; invariance is checked when a term is built
// and failures report the index.
template <class S>
MatrixSequence<S> restrict_stream(const MatrixSequence<S>& seq, const Subspace<S>& h,
                                  double tol = 1e-9);

}  // namespace parnorm
