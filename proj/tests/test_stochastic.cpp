#include <doctest.h>

#include <cmath>

#include "parnorm/stochastic.hpp"
#include "support.hpp"

using namespace parnorm;

namespace {

Matrix block_counterexample() {
  Matrix a = Matrix::Zero(3, 3);
  a.topLeftCorner(2, 2) = support::running();
  a(2, 2) = 1.0;
  return a;
}

Matrix rank_one(const Vector& v) { return v * Vector::Ones(v.size()).transpose(); }

}  // namespace

TEST_CASE("validation points at the offending column or entry") {
  CHECK_NOTHROW(validate_stochastic(support::running()));
  Matrix a = support::running();
  a(0, 1) = 0.3;
  try {
    validate_stochastic(a);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.pointer() == "/columns/1");
  }
  Matrix neg(2, 2);
  neg << 1.2, 0.0, -0.2, 1.0;
  try {
    validate_stochastic(neg);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.pointer() == "/matrix/1/0");
  }
  CHECK_FALSE(is_stochastic(Matrix::Ones(2, 2)));
  CHECK(is_stochastic(Matrix::Identity(4, 4)));
  CHECK_THROWS_AS(ergodicity_coefficient_l1(Matrix::Ones(2, 2)), ValidationError);
}

TEST_CASE("ergodicity subspace") {
  for (Eigen::Index n = 2; n <= 7; ++n) {
    auto h = ergodicity_subspace(n);
    CHECK(h.dim() == n - 1);
    CHECK((Vector::Ones(n).transpose() * h.basis()).norm() < 1e-14);
    CHECK((h.basis().transpose() * h.basis()).isIdentity(1e-12));
    CHECK(is_ergodicity_subspace(h));
  }
  CHECK(ergodicity_subspace(1).dim() == 0);
}

TEST_CASE("coefficient examples") {
  Vector v(3);
  v << 0.2, 0.5, 0.3;
  CHECK(ergodicity_coefficient_l1(rank_one(v)) == 0.0);
  for (Eigen::Index n = 2; n <= 5; ++n) CHECK(ergodicity_coefficient_l1(Matrix::Identity(n, n)) == 1.0);
  CHECK(ergodicity_coefficient_l1(support::running()) == doctest::Approx(0.7).epsilon(1e-15));

  for (const auto& norm : {NormSpec<double>::l1(), NormSpec<double>::l2(), NormSpec<double>::linf()}) {
    CHECK(general_coefficient(rank_one(v), norm).value == doctest::Approx(0.0));
    CHECK(general_coefficient(Matrix::Identity(3, 3), norm).value == doctest::Approx(1.0));
  }
}

TEST_CASE("closed form agrees with the partial norm") {
  Rng rng(101);
  for (int t = 0; t < 40; ++t) {
    const Eigen::Index n = 2 + t % 5;
    Matrix a = random_stochastic(n, rng, t % 3 == 0 ? 0.4 : 0.0);
    const double w = ergodicity_coefficient_l1(a);
    CHECK(w >= 0.0);
    CHECK(w <= 1.0 + 1e-15);
    CHECK(general_coefficient(a, NormSpec<double>::l1()).value == doctest::Approx(w).epsilon(1e-8));
    SearchOptions so;
    so.force_optimized = true;
    so.samples = 10000;
    so.seed = static_cast<std::uint64_t>(t);
    const auto est = partial_norm(a, ergodicity_subspace(n), NormSpec<double>::l1(), so);
    CHECK(est.value <= w + 1e-9);
    CHECK(std::abs(est.value - w) <= 1e-6);
  }
}

TEST_CASE("submultiplicativity and closure under products") {
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = 2 + t % 6;
    Matrix a = random_stochastic(n, rng, 0.3), b = random_stochastic(n, rng, 0.3);
    CHECK(ergodicity_coefficient_l1(a * b) <=
          ergodicity_coefficient_l1(a) * ergodicity_coefficient_l1(b) + 1e-12);
    Matrix c = Matrix::Identity(n, n);
    for (int k = 0; k < 50; ++k) c = c * random_stochastic(n, rng);
    CHECK(is_stochastic(c, 1e-12));
  }
}

TEST_CASE("the only L1-paracontracting stochastic matrix is the identity") {
  Rng rng(23);
  ProbeOptions po;
  po.budget = 500;
  for (int t = 0; t < 30; ++t) {
    Matrix a = support::non_identity_stochastic(2 + t % 5, rng, t % 2 ? 0.5 : 0.0);
    auto v = check_paracontracting(a, NormSpec<double>::l1(), po);
    CHECK(v.kind == VerdictKind::Falsified);
    REQUIRE(v.witness);
    const Vector& x = *v.witness;
    CHECK((a * x - x).lpNorm<1>() > 1e-9);
    CHECK((a * x).lpNorm<1>() >= x.lpNorm<1>() * (1 - 1e-12));
  }
  CHECK(check_paracontracting(Matrix(Matrix::Identity(4, 4)), NormSpec<double>::l1(), po).kind !=
        VerdictKind::Falsified);
}

TEST_CASE("overlap probe") {
  auto id = overlap_probe(Matrix::Identity(3, 3));
  CHECK_FALSE(id.row_with_two_positive);
  CHECK(id.omega == 1.0);
  CHECK_FALSE(id.omega_below_one);

  auto run = overlap_probe(support::running());
  CHECK(run.row_with_two_positive);
  CHECK(run.scrambling);
  CHECK(run.omega == doctest::Approx(0.7));
  CHECK(run.omega_below_one);

  // A row with two positive entries without any contraction on e-perp.
  auto blk = overlap_probe(block_counterexample());
  CHECK(blk.row_with_two_positive);
  CHECK_FALSE(blk.scrambling);
  REQUIRE(blk.disjoint_columns);
  CHECK(blk.omega == 1.0);
  CHECK_FALSE(blk.omega_below_one);
}

TEST_CASE("scrambling matrices contract e-perp") {
  Rng rng(31);
  int seen = 0;
  for (int t = 0; t < 300; ++t) {
    Matrix a = random_stochastic(2 + t % 5, rng, 0.5);
    auto r = overlap_probe(a);
    if (!r.scrambling) continue;
    ++seen;
    CHECK(r.omega_below_one);
  }
  CHECK(seen > 20);
}

TEST_CASE("weak ergodicity experiment examples") {
  const ProductSchedule left{};
  ProductSchedule right{Permutation::identity(), 3, Ordering::RightAppend, 0, {}};
  ProductSchedule rnd{Permutation::block_shuffle(4, 2), 1, Ordering::SeededRandomOrder, 11, {}};
  auto run = MatrixSequence<double>::constant(support::running());
  auto rep = weak_ergodicity_experiment(run, {left, right, rnd}, 1e-8, 200);
  REQUIRE(rep.runs.size() == 3);
  for (const auto& r : rep.runs) {
    CHECK(r.consistent);
    REQUIRE(r.trace.crossed_at);
    CHECK(*r.trace.crossed_at == 52);
    for (const auto& s : r.trace.steps)
      CHECK(s.mu == doctest::Approx(std::pow(0.7, static_cast<double>(s.r))).epsilon(1e-9));
    CHECK(r.difference_ratio <= 1e-8);
  }

  Vector v(3);
  v << 0.6, 0.1, 0.3;
  auto flat = weak_ergodicity_experiment(MatrixSequence<double>::constant(rank_one(v)), {left}, 1e-8, 10);
  REQUIRE(flat.runs[0].trace.crossed_at);
  CHECK(*flat.runs[0].trace.crossed_at == 1);
  CHECK(flat.runs[0].trace.steps[0].clamped);

  auto ident = weak_ergodicity_experiment(MatrixSequence<double>::constant(Matrix::Identity(3, 3)),
                                          {left}, 1e-8, 30);
  CHECK_FALSE(ident.runs[0].consistent);
  CHECK(ident.runs[0].trace.status == TraceStatus::Exhausted);
  CHECK(ident.runs[0].trace.steps.size() == 30);
}

TEST_CASE("experiment rejects a non-stochastic factor with its index") {
  Matrix bad = support::running();
  bad(1, 1) = 0.7;
  auto seq = MatrixSequence<double>::list({support::running(), support::running(), bad});
  try {
    weak_ergodicity_experiment(seq, {ProductSchedule{}}, 1e-8, 3);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.pointer() == "/sequence/3/columns/1");
  }
}

TEST_CASE("random mixing sequences are consistent with weak ergodicity") {
  auto seq = MatrixSequence<double>::generator(
      5,
      [](std::size_t i) {
        Rng r(derive_seed(99, i));
        return random_stochastic(5, r, 0.2);
      },
      "mixing");
  std::vector<ProductSchedule> scheds{
      ProductSchedule{},
      ProductSchedule{Permutation::identity(), 0, Ordering::RightAppend, 0, {}},
      ProductSchedule{Permutation::block_shuffle(3, 5), 2, Ordering::SeededRandomOrder, 8, {}}};
  auto rep = weak_ergodicity_experiment(seq, scheds, 1e-8, 500);
  for (const auto& r : rep.runs) {
    CHECK(r.consistent);
    CHECK(r.trace.factors_ok);
    // Nested products have nonincreasing coefficients.
    if (r.schedule.ordering == Ordering::SeededRandomOrder) continue;
    for (std::size_t i = 1; i < r.trace.steps.size(); ++i)
      CHECK(r.trace.steps[i].mu <= r.trace.steps[i - 1].mu + 1e-15);
  }
}

TEST_CASE("weak ergodicity conditions") {
  auto ok = wkerg_condition_check(TailModel::constant(1.0), TailModel::constant(0.7));
  CHECK(ok.verdict == SeriesVerdict::Holds);
  CHECK(ok.condition_C == SeriesVerdict::Holds);
  CHECK_FALSE(ok.note.empty());

  CHECK(wkerg_condition_check(TailModel::constant(1.0), TailModel::constant(1.0)).verdict ==
        SeriesVerdict::Fails);
  auto sq = TailModel::p_series(1.0, 2.0, Side::Below);
  CHECK(wkerg_condition_check(sq, sq).verdict == SeriesVerdict::Fails);

  auto alt = TailModel::periodic({1.0, 0.7});
  auto sub = wkerg_condition_check(alt, alt, {{0, 2}, {1, 2}});
  CHECK(sub.verdict == SeriesVerdict::Holds);
  REQUIRE(sub.subsequence);
  CHECK(sub.subsequence->offset == 1);

  // Without the omega shortcut (C) must be shown from the model.
  auto grow = TailModel::p_series(1.0, 1.0, Side::Above);
  CHECK(wkerg_condition_check(grow, TailModel::constant(0.5), {{0, 1}}, false).verdict ==
        SeriesVerdict::Fails);
  CHECK(wkerg_condition_check(TailModel::finite({0.5}), TailModel::finite({0.5})).verdict ==
        SeriesVerdict::Undecidable);
}

TEST_CASE("accumulation point corollaries") {
  auto alt = TailModel::periodic({1.0, 0.5});
  auto single = accumulation_corollary_check(alt, AccumVariant::SinglePoint);
  CHECK(single.verdict == SeriesVerdict::Holds);
  CHECK(single.points == std::vector<double>{0.5, 1.0});
  REQUIRE(single.implied);
  CHECK(single.implied->verdict == SeriesVerdict::Holds);
  CHECK(accumulation_corollary_check(alt, AccumVariant::AllPoints).verdict == SeriesVerdict::Fails);

  auto to09 = TailModel::power(0.9, 0.1, 1.0, Side::Below);
  CHECK(accumulation_corollary_check(to09, AccumVariant::SinglePoint).verdict == SeriesVerdict::Holds);
  CHECK(accumulation_corollary_check(to09, AccumVariant::AllPoints).verdict == SeriesVerdict::Holds);

  auto to1 = TailModel::p_series(1.0, 1.0, Side::Below);
  for (auto var : {AccumVariant::SinglePoint, AccumVariant::AllPoints}) {
    auto rep = accumulation_corollary_check(to1, var);
    CHECK(rep.verdict == SeriesVerdict::Fails);
    CHECK_FALSE(rep.note.empty());
  }
  CHECK(accumulation_corollary_check(TailModel::finite({0.5}), AccumVariant::SinglePoint).verdict ==
        SeriesVerdict::Undecidable);
  CHECK(accumulation_corollary_check(TailModel::constant(1.2), AccumVariant::SinglePoint).verdict ==
        SeriesVerdict::Fails);
  CHECK(to_string(AccumVariant::AllPoints) == "AllPoints");
}
