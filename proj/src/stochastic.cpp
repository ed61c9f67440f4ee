#include "parnorm/stochastic.hpp"

#include <algorithm>
#include <cmath>

#include "parnorm/kernels.hpp"
#include "parnorm/random.hpp"

namespace parnorm {

void validate_stochastic(const Matrix& a, double tol) {
  require_square_finite(a, "stochastic matrix");
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i)
      if (a(i, j) < -tol)
        throw ValidationError("negative entry " + std::to_string(a(i, j)) + " at row " +
                                  std::to_string(i) + ", column " + std::to_string(j),
                              "/matrix/" + std::to_string(i) + "/" + std::to_string(j));
    const double s = a.col(j).sum();
    if (std::abs(s - 1.0) > tol)
      throw ValidationError("column " + std::to_string(j) + " sums to " + std::to_string(s) +
                                ", expected 1",
                            "/columns/" + std::to_string(j));
  }
}

bool is_stochastic(const Matrix& a, double tol) {
  try {
    validate_stochastic(a, tol);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Subspace<double> ergodicity_subspace(Eigen::Index n) {
  if (n < 1) throw DimensionError("dimension must be positive");
  if (n == 1) return Subspace<double>::zero(1);
  Matrix v = Matrix::Zero(n, n - 1);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    v(j, j) = 1.0;
    v(j + 1, j) = -1.0;
  }
  return Subspace<double>::span(v);
}

double ergodicity_coefficient_l1(const Matrix& a, double tol) {
  validate_stochastic(a, tol);
  const Eigen::Index n = a.rows();
  const auto& kt = kernels::active();
  double best = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index l = j + 1; l < n; ++l)
      best = std::max(best, kt.abs_diff_sum(a.col(j).data(), a.col(l).data(),
                                            static_cast<std::size_t>(n)));
  return 0.5 * best;
}

NormEstimate<double> general_coefficient(const Matrix& a, const NormSpec<double>& norm,
                                         const SearchOptions& opts) {
  validate_stochastic(a);
  return partial_norm(a, ergodicity_subspace(a.rows()), norm, opts);
}

ErgodicityReport weak_ergodicity_experiment(const MatrixSequence<double>& seq,
                                            const std::vector<ProductSchedule>& schedules,
                                            double threshold, std::size_t max_r,
                                            const ErgodicityOptions& opts) {
  ErgodicityReport rep;
  rep.threshold = threshold;
  rep.max_r = max_r;
  const double tol = opts.tol;
  // Factors are checked as they are produced; products are checked with a
  // tolerance that grows with r.
  const auto checked = MatrixSequence<double>::generator(
      seq.dim(),
      [seq, tol](std::size_t i) {
        Matrix a = seq.at(i);
        try {
          validate_stochastic(a, tol);
        } catch (const ValidationError& e) {
          throw ValidationError("sequence term " + std::to_string(i) + ": " + e.what(),
                                "/sequence/" + std::to_string(i) + e.pointer());
        }
        return a;
      },
      seq.name(), seq.length());
  const Measure<double> omega = [](const Matrix& c) {
    return ergodicity_coefficient_l1(c, 1e-6);
  };
  const Eigen::Index n = seq.dim();
  for (std::size_t s = 0; s < schedules.size(); ++s) {
    ErgodicityRun run;
    run.schedule = schedules[s];
    run.trace = monitor_convergence(checked, schedules[s], omega, threshold, max_r, opts.monitor);
    run.consistent = run.trace.crossed_at.has_value();
    // Differences of probability vectors under the last product.
    if (!run.trace.steps.empty() && n >= 2) {
      GeneralProductStream<double> st(checked, schedules[s]);
      Matrix c;
      for (std::size_t r = 0; r < run.trace.steps.size(); ++r) c = st.next()->product;
      Rng rng(derive_seed(opts.seed, s));
      for (std::size_t k = 0; k < opts.probe_pairs; ++k) {
        const Vector d = random_probability(n, rng) - random_probability(n, rng);
        const double nd = d.lpNorm<1>();
        if (nd > 0.0)
          run.difference_ratio = std::max(run.difference_ratio, (c * d).lpNorm<1>() / nd);
      }
    }
    rep.runs.push_back(std::move(run));
  }
  return rep;
}

WkergReport wkerg_condition_check(const TailModel& model_C, const TailModel& model_D,
                                  const std::vector<Subfamily>& subsequences, bool omega) {
  WkergReport r;
  if (omega) {
    r.condition_C = model_C.bounded_by_one() == SeriesVerdict::Fails ? SeriesVerdict::Fails
                                                                     : SeriesVerdict::Holds;
    r.note = "condition (C) is automatic for omega since every coefficient is at most 1";
    if (r.condition_C == SeriesVerdict::Fails)
      r.note = "coefficients above 1 are impossible for omega; model rejected";
  } else {
    r.condition_C = check_condition_C(model_C);
  }
  const auto d = check_condition_D_subsequence(model_D, subsequences);
  r.condition_D = d.verdict;
  r.subsequence = d.witness;
  if (r.condition_C == SeriesVerdict::Holds && r.condition_D == SeriesVerdict::Holds)
    r.verdict = SeriesVerdict::Holds;
  else if (r.condition_C == SeriesVerdict::Fails || r.condition_D == SeriesVerdict::Fails)
    r.verdict = SeriesVerdict::Fails;
  else
    r.verdict = SeriesVerdict::Undecidable;
  return r;
}

std::string to_string(AccumVariant v) {
  return v == AccumVariant::SinglePoint ? "SinglePoint" : "AllPoints";
}

AccumReport accumulation_corollary_check(const TailModel& coeffs, AccumVariant variant) {
  AccumReport r;
  r.variant = variant;
  const auto pts = coeffs.accumulation_points();
  if (!pts) {
    r.note = "accumulation structure unknown";
    return r;
  }
  r.points = *pts;
  r.bounded_by_one = coeffs.bounded_by_one();
  if (r.bounded_by_one != SeriesVerdict::Holds) {
    r.verdict = r.bounded_by_one == SeriesVerdict::Fails ? SeriesVerdict::Fails
                                                         : SeriesVerdict::Undecidable;
    r.note = "hypothesis that every coefficient is at most 1 is not met";
    return r;
  }
  const double cmin = *std::min_element(r.points.begin(), r.points.end());
  const double cmax = *std::max_element(r.points.begin(), r.points.end());
  const bool ok = variant == AccumVariant::SinglePoint ? cmin < 1.0 : cmax < 1.0;
  r.verdict = ok ? SeriesVerdict::Holds : SeriesVerdict::Fails;
  if (ok) {
    const double cut = 0.5 * (1.0 + cmin);
    const auto subs = scan_subsequences(coeffs, cut);
    r.implied = wkerg_condition_check(coeffs, coeffs, subs, true);
  } else if (check_condition_D(coeffs) == SeriesVerdict::Holds) {
    r.note = "corollary does not apply, but the deficit series diverges on the full sequence";
  }
  return r;
}

OverlapReport overlap_probe(const Matrix& a, double tol) {
  validate_stochastic(a, tol);
  const Eigen::Index n = a.rows();
  OverlapReport r;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index pos = 0;
    for (Eigen::Index j = 0; j < n; ++j) pos += a(i, j) > tol;
    r.row_with_two_positive = r.row_with_two_positive || pos >= 2;
  }
  r.scrambling = true;
  for (Eigen::Index j = 0; j < n && r.scrambling; ++j)
    for (Eigen::Index l = j + 1; l < n && r.scrambling; ++l) {
      bool shared = false;
      for (Eigen::Index i = 0; i < n && !shared; ++i) shared = a(i, j) > tol && a(i, l) > tol;
      if (!shared) {
        r.scrambling = false;
        r.disjoint_columns = {j, l};
      }
    }
  r.omega = ergodicity_coefficient_l1(a, tol);
  r.omega_below_one = r.omega < 1.0 - 1e-12;
  return r;
}

}  // namespace parnorm
