#include <doctest.h>

#include <cmath>

#include "parnorm/contraction.hpp"
#include "parnorm/stochastic.hpp"
#include "support.hpp"

using namespace parnorm;
using support::running;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

NormSpec<double> coordinate_composite(const NormSpec<double>& base) {
  return make_additive_norm(base, Subspace<double>::coordinate(2, {0}),
                            Subspace<double>::coordinate(2, {1}));
}

// Re-evaluates the defining inequality of a Certified verdict on fresh samples.
double worst_excess(const Matrix& a, const NormSpec<double>& norm, Property p,
                    std::optional<double> gamma, std::size_t samples, Rng& rng,
                    const ProbeOptions& opts) {
  double worst = -1.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Vector x = random_gaussian(a.rows(), 1, rng);
    if (s % 3 == 1) {
      // Nearly fixed vectors are where paracontraction is tight.
      auto split = fixed_point_split(a);
      if (split.fixed.dim() > 0) x = split.fixed.project(x) + 1e-4 * x;
    }
    const double nx = norm(x);
    const Vector ax = a * x;
    const double nax = norm(ax);
    double e = 0.0;
    switch (p) {
      case Property::Nonexpansive: e = nax / nx - 1.0; break;
      case Property::Paracontracting:
        e = norm(Vector(ax - x)) > opts.fixed_residual * nx ? nax / nx - 1.0 : -1.0;
        break;
      case Property::LParacontracting: e = (nax - nx + *gamma * norm(Vector(ax - x))) / nx; break;
      case Property::HContractor: break;
    }
    worst = std::max(worst, e);
  }
  return worst;
}

}  // namespace

TEST_CASE("nonexpansive examples") {
  auto id = is_nonexpansive(Matrix::Identity(3, 3).eval(), NormSpec<double>::l1());
  CHECK(id.kind == VerdictKind::Certified);

  Matrix two = 2.0 * Matrix::Identity(3, 3);
  auto f = is_nonexpansive(two, NormSpec<double>::l1());
  CHECK(f.kind == VerdictKind::Falsified);
  REQUIRE(f.witness);
  CHECK(f.witness->isApprox(Vector::Unit(3, 0)));
  CHECK(f.violation == doctest::Approx(1.0));

  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    Matrix p = random_stochastic(2 + t % 5, rng);
    CHECK(is_nonexpansive(p, NormSpec<double>::l1()).kind == VerdictKind::Certified);
  }
}

TEST_CASE("paracontracting examples") {
  for (const auto& norm : {NormSpec<double>::l1(), NormSpec<double>::l2(), NormSpec<double>::linf()}) {
    auto v = check_paracontracting(Matrix::Identity(3, 3).eval(), norm);
    CHECK(v.kind == VerdictKind::Certified);
  }
  auto d = check_paracontracting(diag2(1.0, 0.5), NormSpec<double>::l2());
  CHECK(d.kind == VerdictKind::Certified);
  REQUIRE(d.certificate.k);
  CHECK(*d.certificate.k == doctest::Approx(0.5));

  auto r = check_paracontracting(running(), NormSpec<double>::l1());
  CHECK(r.kind == VerdictKind::Falsified);
  REQUIRE(r.witness);
  const Vector& u = *r.witness;
  const Vector au = running() * u;
  CHECK(u.lpNorm<1>() == doctest::Approx(1.0));
  CHECK((au - u).lpNorm<1>() > 1e-9);
  CHECK(au.lpNorm<1>() >= u.lpNorm<1>() - 1e-12);

  auto rot = check_paracontracting(Matrix(-Matrix::Identity(2, 2)), NormSpec<double>::l2());
  CHECK(rot.kind == VerdictKind::Falsified);
}

TEST_CASE("H-contractor examples") {
  Matrix v(2, 1);
  v << 1, -1;
  auto h = Subspace<double>::span(v);
  auto r = check_H_contractor(running(), h, NormSpec<double>::l1());
  CHECK(r.kind == VerdictKind::Certified);
  CHECK(*r.certificate.k == doctest::Approx(0.7));

  auto id = check_H_contractor(Matrix::Identity(2, 2).eval(), h, NormSpec<double>::l1());
  CHECK(id.kind == VerdictKind::Falsified);
  CHECK(*id.certificate.k == doctest::Approx(1.0));

  Vector p(3);
  p << 0.1, 0.3, 0.6;
  Matrix rank_one = p * Vector::Ones(3).transpose();
  auto z = check_H_contractor(rank_one, ergodicity_subspace(3), NormSpec<double>::l1());
  CHECK(z.kind == VerdictKind::Certified);
  CHECK(*z.certificate.k == doctest::Approx(0.0).epsilon(1e-15));

  Matrix rot(2, 2);
  rot << 0, -1, 1, 0;
  auto bad = check_H_contractor(rot, Subspace<double>::coordinate(2, {0}), NormSpec<double>::l2());
  CHECK(bad.kind == VerdictKind::Falsified);
}

TEST_CASE("gamma from k") {
  CHECK(lp_gamma(0.0) == 1.0);
  CHECK(lp_gamma(0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(lp_gamma(0.7) == doctest::Approx(3.0 / 17.0).epsilon(1e-15));
  CHECK(lp_gamma(0.7) == doctest::Approx(0.17647).epsilon(1e-4));
  CHECK_THROWS_AS(lp_gamma(1.0), ValidationError);
  CHECK_THROWS_AS(lp_gamma(-0.1), ValidationError);
}

TEST_CASE("l-paracontracting examples") {
  auto id = check_l_paracontracting(Matrix::Identity(2, 2).eval(), NormSpec<double>::l1(), 1.0);
  CHECK(id.kind == VerdictKind::Certified);

  auto comp = coordinate_composite(NormSpec<double>::l2());
  auto d = check_l_paracontracting(diag2(1.0, 0.5), comp, 1.0 / 3.0);
  CHECK(d.kind == VerdictKind::Certified);
  auto too_big = check_l_paracontracting(diag2(1.0, 0.5), comp, 0.5);
  CHECK(too_big.kind != VerdictKind::Certified);

  Matrix two = 2.0 * Matrix::Identity(2, 2);
  for (double g : {1e-3, 0.5, 1.0}) {
    for (const auto& norm : {NormSpec<double>::l1(), NormSpec<double>::l2(), comp}) {
      auto f = check_l_paracontracting(two, norm, g);
      CHECK(f.kind == VerdictKind::Falsified);
      CHECK(f.witness);
    }
  }
  CHECK_THROWS_AS(check_l_paracontracting(two, NormSpec<double>::l1(), 0.0), ValidationError);
}

TEST_CASE("additive norm examples") {
  auto comp = coordinate_composite(NormSpec<double>::l1());
  Rng rng(32);
  for (int t = 0; t < 50; ++t) {
    Vector x = random_gaussian(2, 1, rng);
    CHECK(comp(x) == doctest::Approx(x.lpNorm<1>()).epsilon(1e-14));
  }
  Matrix hv(2, 1), kv(2, 1);
  hv << 1, -1;
  kv << 1, 1;
  auto h = Subspace<double>::span(hv);
  auto k = Subspace<double>::span(kv);
  auto l2 = make_additive_norm(NormSpec<double>::l2(), h, k);
  Vector e1 = Vector::Unit(2, 0);
  CHECK(l2(e1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  auto [y, z] = l2.split(e1);
  CHECK(y(0) == doctest::Approx(0.5));
  CHECK(y(1) == doctest::Approx(-0.5));
  CHECK(z(0) == doctest::Approx(0.5));
  Vector in_h = 3.0 * h.basis().col(0);
  CHECK(l2(in_h) == doctest::Approx(3.0));

  CHECK_THROWS_AS(make_additive_norm(NormSpec<double>::l1(), h, h), NumericalError);
  CHECK_THROWS_AS(make_additive_norm(NormSpec<double>::l1(), h, Subspace<double>::zero(2)),
                  ValidationError);
  Matrix near(2, 1);
  near << 1, -1 + 1e-13;
  CHECK_THROWS_AS(make_additive_norm(NormSpec<double>::l1(), h, Subspace<double>::span(near)),
                  NumericalError);
}

TEST_CASE("audit of diag(1, 0.5)") {
  auto au = equiv_theorem_audit(diag2(1.0, 0.5), NormSpec<double>::l2());
  CHECK(au.hypotheses_met);
  CHECK(au.k == doctest::Approx(0.5));
  REQUIRE(au.gamma);
  CHECK(*au.gamma == doctest::Approx(1.0 / 3.0));
  CHECK(au.nonexpansive.kind == VerdictKind::Certified);
  CHECK(au.l_paracontracting.kind == VerdictKind::Certified);
  CHECK(au.paracontracting.kind == VerdictKind::Certified);
  CHECK(au.h_contractor.kind == VerdictKind::Certified);
  CHECK_FALSE(au.conflict);
  CHECK(au.chain.holds(1e-9));
}

TEST_CASE("audit of the identity flags the boundary") {
  auto au = equiv_theorem_audit(Matrix::Identity(3, 3).eval(), NormSpec<double>::l1());
  CHECK(au.boundary);
  CHECK(au.k == 1.0);
  CHECK_FALSE(au.hypotheses_met);
  CHECK(au.h_contractor.kind == VerdictKind::Falsified);
  CHECK(au.paracontracting.kind == VerdictKind::Certified);
  CHECK_FALSE(au.conflict);
}

TEST_CASE("audit rejects a nontrivial Jordan block at 1") {
  Matrix j(2, 2);
  j << 1, 1, 0, 1;
  CHECK_THROWS_AS(equiv_theorem_audit(j, NormSpec<double>::l1()), NumericalError);
}

TEST_CASE("randomized audits never conflict") {
  Rng rng(33);
  ProbeOptions opts;
  opts.budget = 2000;
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = 2 + t % 4;
    const Eigen::Index dh = 1 + t % (n - 1);
    const NormKind kind = t % 3 == 0 ? NormKind::L1 : (t % 3 == 1 ? NormKind::L2 : NormKind::Linf);
    std::uniform_real_distribution<double> ud(0.0, 0.95);
    auto ne = support::random_nonexpansive(n, dh, kind, ud(rng), rng);
    NormSpec<double> base = kind == NormKind::L2   ? NormSpec<double>::l2()
                            : kind == NormKind::L1 ? NormSpec<double>::l1()
                                                   : NormSpec<double>::linf();
    opts.seed = static_cast<std::uint64_t>(t);
    auto au = equiv_theorem_audit(ne.a, base, opts);
    CAPTURE(t);
    CHECK(au.hypotheses_met);
    CHECK_FALSE(au.conflict);
    CHECK(au.k == doctest::Approx(ne.target).epsilon(1e-8));
    CHECK(au.h_contractor.kind == VerdictKind::Certified);
    CHECK(au.paracontracting.kind == VerdictKind::Certified);
    CHECK(au.l_paracontracting.kind == VerdictKind::Certified);
    CHECK(au.chain.holds(1e-9));
  }
}

TEST_CASE("certified verdicts hold on fresh samples") {
  Rng rng(34);
  ProbeOptions opts;
  for (int t = 0; t < 10; ++t) {
    auto ne = support::random_nonexpansive(3, 1 + t % 2, NormKind::L2, 0.3 + 0.05 * t, rng);
    auto norm = make_additive_norm(NormSpec<double>::l2(), ne.h, ne.k);
    auto nv = is_nonexpansive(ne.a, norm, opts);
    REQUIRE(nv.kind == VerdictKind::Certified);
    CHECK(worst_excess(ne.a, norm, Property::Nonexpansive, {}, 10000, rng, opts) <= opts.tol);
    auto pv = check_paracontracting(ne.a, norm, opts);
    REQUIRE(pv.kind == VerdictKind::Certified);
    CHECK(worst_excess(ne.a, norm, Property::Paracontracting, {}, 10000, rng, opts) < 0.0);
    const double g = lp_gamma(ne.target);
    auto lv = check_l_paracontracting(ne.a, norm, g, opts);
    REQUIRE(lv.kind == VerdictKind::Certified);
    CHECK(worst_excess(ne.a, norm, Property::LParacontracting, g, 10000, rng, opts) <= 1e-10);
  }
}

TEST_CASE("falsified witnesses re-evaluate as violations") {
  Rng rng(35);
  ProbeOptions opts;
  for (int t = 0; t < 30; ++t) {
    Matrix a = support::non_identity_stochastic(2 + t % 5, rng, t % 2 ? 0.3 : 0.0);
    auto v = check_paracontracting(a, NormSpec<double>::l1(), opts);
    REQUIRE(v.kind == VerdictKind::Falsified);
    REQUIRE(v.witness);
    const Vector& x = *v.witness;
    const Vector ax = a * x;
    CHECK((ax - x).lpNorm<1>() > opts.fixed_residual * x.lpNorm<1>());
    CHECK(ax.lpNorm<1>() >= x.lpNorm<1>() * (1.0 - opts.para_tol));

    Matrix big = 1.5 * a;
    auto nv = is_nonexpansive(big, NormSpec<double>::l1(), opts);
    REQUIRE(nv.kind == VerdictKind::Falsified);
    CHECK((big * *nv.witness).lpNorm<1>() > nv.witness->lpNorm<1>() * (1.0 + opts.tol));
  }
}

TEST_CASE("proof chain inequalities") {
  Rng rng(36);
  for (int t = 0; t < 10; ++t) {
    auto ne = support::random_nonexpansive(4, 2, NormKind::L2, 0.1 * t, rng);
    auto norm = make_additive_norm(NormSpec<double>::l2(), ne.h, ne.k);
    auto rep = proof_chain_check(ne.a, norm, ne.target, 10000, 99);
    CHECK(rep.samples == 10000);
    CHECK(rep.holds(1e-9));
  }
  CHECK_THROWS_AS(proof_chain_check(running(), NormSpec<double>::l1(), 0.5, 10, 1), ValidationError);
}

TEST_CASE("split routes") {
  auto e1 = Subspace<double>::coordinate(2, {0});
  auto e2 = Subspace<double>::coordinate(2, {1});
  CHECK(split_route(NormSpec<double>::l1(), e1, e2) == SplitRoute::Additive);
  CHECK(split_route(NormSpec<double>::l2(), e1, e2) == SplitRoute::StrictlyMonotone);
  Matrix kv(2, 1);
  kv << 1, 1;
  auto skew = Subspace<double>::span(kv);
  CHECK(split_route(NormSpec<double>::l1(), e1, skew) == SplitRoute::None);
  CHECK(split_route(NormSpec<double>::l2(), e1, skew) == SplitRoute::None);
  CHECK(split_route(coordinate_composite(NormSpec<double>::l1()), e1, e2) == SplitRoute::Additive);
  CHECK(split_route(NormSpec<double>::linf(), Subspace<double>::zero(2), Subspace<double>::full(2)) ==
        SplitRoute::Additive);
}

TEST_CASE("monotonicity condition is only sampled") {
  auto e1 = Subspace<double>::coordinate(2, {0});
  auto e2 = Subspace<double>::coordinate(2, {1});
  CHECK_FALSE(sample_monotonicity(NormSpec<double>::l2(), e1, e2, 2000, 1).violated);
  CHECK_FALSE(sample_monotonicity(NormSpec<double>::l1(), e1, e2, 2000, 1).violated);
  // Under Linf a large z masks the difference between y and y'.
  auto lin = sample_monotonicity(NormSpec<double>::linf(), e1, e2, 2000, 1);
  CHECK(lin.violated);
  REQUIRE(lin.y);
  const auto linf = NormSpec<double>::linf();
  CHECK(linf(*lin.y) < linf(*lin.y_prime));
  CHECK_FALSE(linf(Vector(*lin.y + *lin.z)) < linf(Vector(*lin.y_prime + *lin.z)));
}

TEST_CASE("complex scalars") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = Complex(0.0, 0.5);
  auto au = equiv_theorem_audit(a, NormSpec<Complex>::l2());
  CHECK(au.k == doctest::Approx(0.5));
  CHECK(au.h_contractor.kind == VerdictKind::Certified);
  CHECK(au.paracontracting.kind == VerdictKind::Certified);
  CHECK_FALSE(au.conflict);
}
