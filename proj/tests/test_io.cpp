#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "parnorm/io.hpp"
#include "parnorm/random.hpp"

using namespace parnorm;
using io::json;

namespace fs = std::filesystem;

TEST_CASE("doubles print in shortest round-trip form") {
  Rng rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 2000; ++i) {
    const double v = g(rng) * std::pow(10.0, i % 40 - 20);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.7) == "0.7");
  CHECK(io::format_double(1e-300) == "1e-300");
  CHECK(io::format_double(3.0) == "3");
}

TEST_CASE("matrix JSON round trip") {
  Rng rng(4);
  Matrix a = random_gaussian(4, 4, rng);
  CHECK(io::matrix_from_json<double>(json::parse(io::matrix_to_json(a).dump())) == a);
  CMatrix c = random_gaussian(3, 3, rng).cast<Complex>() + Complex(0, 1) * random_gaussian(3, 3, rng);
  CHECK(io::matrix_from_json<Complex>(json::parse(io::matrix_to_json(c).dump())) == c);
  CHECK(io::matrix_from_json<Complex>(json::parse("[[1, [0, 2]], [3, 4]]"))(0, 1) == Complex(0, 2));
  Vector v = random_gaussian(5, 1, rng);
  CHECK(io::vector_from_json<double>(io::vector_to_json(v)) == v);
  CHECK(io::matrix_from_json<double>(json::array()).size() == 0);
}

TEST_CASE("malformed matrices name the offending entry") {
  auto pointer_of = [](const json& j) {
    try {
      io::matrix_from_json<double>(j, "/matrix");
    } catch (const ValidationError& e) {
      return e.pointer();
    }
    return std::string("none");
  };
  CHECK(pointer_of(json::parse("[[1, 2], [3]]")) == "/matrix/1");
  CHECK(pointer_of(json::parse("[[1, 2], [3, \"x\"]]")) == "/matrix/1/1");
  CHECK(pointer_of(json::parse("{\"a\": 1}")) == "/matrix");
  CHECK(pointer_of(json::parse("[[1, 2, 3], [4, 5, 6]]")) == "/matrix/0");
  CHECK_THROWS_AS(io::complex_from_json(json::parse("[1, 2, 3]")), ValidationError);
}

TEST_CASE("CSV matrices") {
  Matrix a(2, 2);
  a << 0.9, 0.2, 0.1, 0.8;
  const std::string text = io::matrix_to_csv(a);
  CHECK(text == "2\n0.9,0.2\n0.1,0.8\n");
  CHECK(io::matrix_from_csv(text) == a);
  CHECK(io::matrix_from_csv("2\r\n 1 , 0\r\n0,1\r\n\n") == Matrix::Identity(2, 2));
  CHECK_THROWS_AS(io::matrix_from_csv(""), ValidationError);
  CHECK_THROWS_AS(io::matrix_from_csv("two\n1,0\n0,1\n"), ValidationError);
  CHECK_THROWS_AS(io::matrix_from_csv("2\n1,0\n"), ValidationError);
  try {
    io::matrix_from_csv("2\n1,0\n0,nan\n", "/m");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.pointer() == "/m/1/1");
  }
  CHECK_THROWS_AS(io::matrix_from_csv("2\n1,0,0\n0,1\n"), ValidationError);
}

TEST_CASE("matrix files by extension") {
  const fs::path dir = fs::temp_directory_path() / "parnorm_io_test";
  fs::create_directories(dir);
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  io::write_file_atomic((dir / "a.csv").string(), io::matrix_to_csv(a));
  io::write_file_atomic((dir / "a.json").string(), io::matrix_to_json(a).dump());
  CHECK(io::read_matrix_file<double>((dir / "a.csv").string()) == a);
  CHECK(io::read_matrix_file<double>((dir / "a.json").string()) == a);
  io::write_file_atomic((dir / "a.csv").string(), "1\n5\n");
  CHECK(io::read_matrix_file<double>((dir / "a.csv").string())(0, 0) == 5.0);
  CHECK_THROWS_AS(io::read_file((dir / "missing.csv").string()), ValidationError);
  fs::remove_all(dir);
}

TEST_CASE("tail models round trip") {
  const std::vector<TailModel> models{
      TailModel::p_series(1.0, 2.0, Side::Above),     TailModel::p_series(0.5, 1.0, Side::Below),
      TailModel::power(0.9, 0.1, 1.5, Side::Above),   TailModel::constant(0.7),
      TailModel::periodic({1.0, 0.5}),                TailModel::finite_support({2.0, 3.0}),
      TailModel::finite({0.1, 0.2}),                  TailModel::prefix({4.0}, TailModel::constant(0.5))};
  for (const auto& m : models) {
    const json j = io::tail_model_to_json(m);
    CHECK(io::tail_model_from_json(json::parse(j.dump())) == m);
  }
  CHECK_THROWS_AS(io::tail_model_from_json(json::parse("{\"family\": \"zeta\"}")), ValidationError);
  CHECK_THROWS_AS(io::tail_model_from_json(json::parse("{\"c\": 1}")), ValidationError);
  const Subfamily s{3, 4};
  CHECK(io::subfamily_from_json(io::subfamily_to_json(s)).offset == 3);
  CHECK(io::subfamily_from_json(io::subfamily_to_json(s)).stride == 4);
}

TEST_CASE("schedules round trip") {
  const std::vector<ProductSchedule> scheds{
      ProductSchedule{},
      ProductSchedule{Permutation::prefix({3, 1}), 2, Ordering::RightAppend, 0, {}},
      ProductSchedule{Permutation::block_shuffle(4, 9), 1, Ordering::SeededRandomOrder, 17, {}},
      ProductSchedule{Permutation::identity(), 0, Ordering::ExplicitOrders, 0, {{1}, {2, 1}}}};
  for (const auto& s : scheds) {
    const json j = io::schedule_to_json(s);
    const ProductSchedule back = io::schedule_from_json(json::parse(j.dump()));
    CHECK(io::schedule_to_json(back) == j);
    CHECK(back.p == s.p);
    CHECK(back.ordering == s.ordering);
    for (std::size_t k = 1; k <= 12; ++k) CHECK(back.permutation(k) == s.permutation(k));
  }
  try {
    io::schedule_from_json(json::parse("{\"ordering\": \"ExplicitOrders\"}"), "/schedules/0");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.pointer() == "/schedules/0/orders");
  }
  CHECK_THROWS_AS(io::schedule_from_json(json::parse("{\"ordering\": \"Upward\"}")), ValidationError);
  CHECK_THROWS_AS(io::schedule_from_json(json::parse("{\"permutation\": {\"kind\": \"prefix\", \"leading\": [2, 2]}}")),
                  ValidationError);
}

TEST_CASE("trace serialization") {
  ConvergenceTrace t;
  t.status = TraceStatus::ConvergedBelow;
  t.threshold = 1e-8;
  t.crossed_at = 2;
  t.steps = {{1, 0.5, 0.5, 1.0, false}, {2, 1e-300, 0.25, 1.0, true}};
  CHECK(io::trace_to_csv(t) == "r,mu,envelope\n1,0.5,0.5\n2,1e-300,0.25\n");
  const json j = io::trace_to_json(t);
  CHECK(j.at("crossed_at") == 2);
  CHECK(j.at("bound_M").is_null());
  CHECK(j.at("steps").at(1).at("clamped") == true);
  CHECK(j.at("status") == "ConvergedBelow");

  auto ps = partial_sum_diagnostics({0.5, 2.0});
  CHECK(io::partial_sums_to_csv(ps) ==
        "i,sum_excess,sum_deficit,prod_plus,prod_minus\n1,0,0.5,1,0.5\n2,1,0.5,2,0.5\n");
}

TEST_CASE("verdict and estimate JSON") {
  ContractionVerdict<double> v;
  v.kind = VerdictKind::Falsified;
  v.property = Property::Paracontracting;
  v.witness = Vector::Ones(2);
  v.violation = 0.25;
  const json j = io::verdict_to_json(v);
  CHECK(j.at("kind") == "Falsified");
  CHECK(j.at("property") == "Paracontracting");
  CHECK(j.at("witness").size() == 2);
  Matrix a(2, 2);
  a << 0.9, 0.2, 0.1, 0.8;
  const json e = io::estimate_to_json(operator_norm(a, NormSpec<double>::l1()));
  CHECK(e.at("value") == 1.0);
  CHECK(e.at("method") == "ClosedForm");
  MultiplicityReport m;
  m.algebraic = 2;
  m.lambda = Complex(1, 0);
  CHECK(io::multiplicity_to_json(m).at("lambda") == json::array({1.0, 0.0}));
}
