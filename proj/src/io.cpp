#include "parnorm/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace parnorm::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError((where.empty() ? std::string("input") : where) + ": " + what, where);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "non-finite number");
  return v;
}

template <class S>
S scalar_from_json(const json& j, const std::string& where) {
  if constexpr (std::is_same_v<S, double>) {
    return number(j, where);
  } else {
    if (j.is_number()) return Complex(number(j, where), 0.0);
    return complex_from_json(j, where);
  }
}

template <class S>
json scalar_to_json(S v) {
  if constexpr (std::is_same_v<S, double>) {
    return v;
  } else {
    return complex_to_json(v);
  }
}

std::vector<double> double_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], where + "/" + std::to_string(i)));
  return out;
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return Complex(number(j, where), 0.0);
  if (!j.is_array() || j.size() != 2) fail(where, "expected [re, im]");
  return Complex(number(j[0], where + "/0"), number(j[1], where + "/1"));
}

template <class S>
json matrix_to_json(const Mat<S>& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < a.cols(); ++k) row.push_back(scalar_to_json(a(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class S>
Mat<S> matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "matrix must be an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Mat<S> a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string wi = where + "/" + std::to_string(i);
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      fail(wi, "row must have " + std::to_string(n) + " entries");
    for (Eigen::Index k = 0; k < n; ++k)
      a(i, k) = scalar_from_json<S>(row[static_cast<std::size_t>(k)], wi + "/" + std::to_string(k));
  }
  return a;
}

template <class S>
json vector_to_json(const Vec<S>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(scalar_to_json(v(i)));
  return out;
}

template <class S>
Vec<S> vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "vector must be an array");
  Vec<S> v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = scalar_from_json<S>(j[i], where + "/" + std::to_string(i));
  return v;
}

std::string matrix_to_csv(const Matrix& a) {
  std::string out = std::to_string(a.rows()) + "\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      if (k) out += ',';
      out += format_double(a(i, k));
    }
    out += '\n';
  }
  return out;
}

Matrix matrix_from_csv(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) fail(where, "empty CSV");
  long n = 0;
  {
    const auto& h = lines[0];
    const auto res = std::from_chars(h.data(), h.data() + h.size(), n);
    if (res.ec != std::errc() || res.ptr != h.data() + h.size() || n < 0)
      fail(where + "/header", "first line must hold the dimension n");
  }
  if (static_cast<long>(lines.size()) != n + 1)
    fail(where, "expected " + std::to_string(n) + " rows, found " + std::to_string(lines.size() - 1));
  Matrix a(n, n);
  for (long i = 0; i < n; ++i) {
    std::istringstream row(lines[static_cast<std::size_t>(i + 1)]);
    std::string cell;
    long k = 0;
    while (std::getline(row, cell, ',')) {
      cell = trim(cell);
      const std::string wc = where + "/" + std::to_string(i) + "/" + std::to_string(k);
      if (k >= n) fail(wc, "too many entries in row");
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v))
        fail(wc, "not a finite number: '" + cell + "'");
      a(i, k++) = v;
    }
    if (k != n) fail(where + "/" + std::to_string(i), "row must have " + std::to_string(n) + " entries");
  }
  return a;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read file '" + path + "'", path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write file '" + tmp.string() + "'");
    f << content;
    if (!f) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

template <class S>
Mat<S> read_matrix_file(const std::string& path) {
  const std::string text = read_file(path);
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".csv") {
    if constexpr (std::is_same_v<S, double>) {
      return matrix_from_csv(text, path);
    } else {
      return matrix_from_csv(text, path).template cast<Complex>();
    }
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what(), path);
  }
  return matrix_from_json<S>(j, path);
}

json tail_model_to_json(const TailModel& t) {
  using F = TailModel::Family;
  switch (t.family()) {
    case F::FiniteSupport:
      return {{"family", "finite_support"}, {"values", t.values()}};
    case F::Power:
      return {{"family", "power"},          {"limit", t.limit()},
              {"a", t.a()},                 {"p", t.p()},
              {"side", to_string(t.side())}, {"index_scale", t.index_scale()},
              {"index_shift", t.index_shift()}};
    case F::Constant:
      return {{"family", "constant"}, {"c", t.limit()}};
    case F::Periodic:
      return {{"family", "periodic"}, {"values", t.values()}};
    case F::Prefix:
      return {{"family", "prefix"}, {"values", t.values()}, {"tail", tail_model_to_json(*t.tail())}};
    case F::Finite:
      return {{"family", "finite"}, {"values", t.values()}};
  }
  return {};
}

TailModel tail_model_from_json(const json& j, const std::string& where) {
  const json& fam = member(j, "family", where);
  if (!fam.is_string()) fail(where + "/family", "expected a string");
  const std::string f = fam.get<std::string>();
  auto side = [&]() {
    const json& s = member(j, "side", where);
    if (s == "Above") return Side::Above;
    if (s == "Below") return Side::Below;
    fail(where + "/side", "expected Above or Below");
  };
  auto opt = [&](const char* key, double dflt) {
    return j.contains(key) ? number(j.at(key), where + "/" + key) : dflt;
  };
  auto list = [&]() { return double_list(member(j, "values", where), where + "/values"); };
  try {
    if (f == "finite_support") return TailModel::finite_support(list());
    if (f == "p_series")
      return TailModel::p_series(number(member(j, "a", where), where + "/a"),
                                 number(member(j, "p", where), where + "/p"), side());
    if (f == "power")
      return TailModel::power(number(member(j, "limit", where), where + "/limit"),
                              number(member(j, "a", where), where + "/a"),
                              number(member(j, "p", where), where + "/p"), side(),
                              opt("index_scale", 1.0), opt("index_shift", 0.0));
    if (f == "constant") return TailModel::constant(number(member(j, "c", where), where + "/c"));
    if (f == "periodic") return TailModel::periodic(list());
    if (f == "prefix")
      return TailModel::prefix(list(), tail_model_from_json(member(j, "tail", where), where + "/tail"));
    if (f == "finite") return TailModel::finite(list());
  } catch (const ValidationError& e) {
    if (!e.pointer().empty()) throw;
    fail(where, e.what());
  }
  fail(where + "/family", "unknown family '" + f + "'");
}

json subfamily_to_json(const Subfamily& s) { return {{"offset", s.offset}, {"stride", s.stride}}; }

Subfamily subfamily_from_json(const json& j, const std::string& where) {
  Subfamily s;
  if (j.contains("offset")) s.offset = j.at("offset").get<std::size_t>();
  if (j.contains("stride")) s.stride = j.at("stride").get<std::size_t>();
  if (s.stride == 0) fail(where + "/stride", "stride must be positive");
  return s;
}

json schedule_to_json(const ProductSchedule& s) {
  json perm;
  switch (s.permutation.kind()) {
    case Permutation::Kind::Identity:
      perm = {{"kind", "identity"}};
      break;
    case Permutation::Kind::Prefix:
      perm = {{"kind", "prefix"}, {"leading", s.permutation.leading()}};
      break;
    case Permutation::Kind::BlockShuffle:
      perm = {{"kind", "block_shuffle"},
              {"block", s.permutation.block_size()},
              {"seed", s.permutation.seed()}};
      break;
  }
  json j = {{"permutation", perm}, {"p", s.p}, {"ordering", to_string(s.ordering)}, {"seed", s.seed}};
  if (s.ordering == Ordering::ExplicitOrders) j["orders"] = s.orders;
  return j;
}

ProductSchedule schedule_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "schedule must be an object");
  ProductSchedule s;
  try {
    if (j.contains("permutation")) {
      const json& p = j.at("permutation");
      const std::string pw = where + "/permutation";
      const std::string kind = member(p, "kind", pw).get<std::string>();
      if (kind == "identity")
        s.permutation = Permutation::identity();
      else if (kind == "prefix")
        s.permutation = Permutation::prefix(member(p, "leading", pw).get<std::vector<std::size_t>>());
      else if (kind == "block_shuffle")
        s.permutation = Permutation::block_shuffle(member(p, "block", pw).get<std::size_t>(),
                                                   p.value("seed", std::uint64_t{0}));
      else
        fail(pw + "/kind", "unknown permutation kind '" + kind + "'");
    }
    s.p = j.value("p", std::size_t{0});
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("ordering")) s.ordering = ordering_from_string(j.at("ordering").get<std::string>());
    if (j.contains("orders"))
      s.orders = j.at("orders").get<std::vector<std::vector<std::size_t>>>();
  } catch (const json::exception& e) {
    fail(where, e.what());
  } catch (const ValidationError& e) {
    if (!e.pointer().empty()) throw;
    fail(where, e.what());
  }
  if (s.ordering == Ordering::ExplicitOrders && s.orders.empty())
    fail(where + "/orders", "ExplicitOrders needs an orders list");
  return s;
}

template <class S>
json verdict_to_json(const ContractionVerdict<S>& v) {
  json j = {{"property", to_string(v.property)},
            {"kind", to_string(v.kind)},
            {"violation", v.violation},
            {"budget_used", v.budget_used}};
  if (v.gamma) j["gamma"] = *v.gamma;
  if (v.witness) j["witness"] = vector_to_json(*v.witness);
  json c = json::object();
  if (v.certificate.k) c["k"] = *v.certificate.k;
  if (v.certificate.gamma) c["gamma"] = *v.certificate.gamma;
  if (v.certificate.op_norm) c["op_norm"] = *v.certificate.op_norm;
  if (v.certificate.invariance_residual)
    c["invariance_residual"] = *v.certificate.invariance_residual;
  if (!v.certificate.route.empty()) c["route"] = v.certificate.route;
  j["certificate"] = c;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

template <class S>
json estimate_to_json(const NormEstimate<S>& e) {
  return {{"value", e.value},
          {"witness", vector_to_json(e.witness)},
          {"method", to_string(e.method)},
          {"route", e.route},
          {"tol", e.tol},
          {"zero_subspace", e.zero_subspace},
          {"samples", e.samples},
          {"evaluations", e.evaluations}};
}

json trace_to_json(const ConvergenceTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps)
    steps.push_back({{"r", s.r}, {"mu", s.mu}, {"envelope", s.envelope}, {"bound", s.bound},
                     {"clamped", s.clamped}});
  json j = {{"ordering", to_string(t.ordering)},
            {"status", to_string(t.status)},
            {"threshold", t.threshold},
            {"overflow", t.overflow},
            {"factors_ok", t.factors_ok},
            {"steps", steps}};
  j["crossed_at"] = t.crossed_at ? json(*t.crossed_at) : json(nullptr);
  j["bound_M"] = t.bound_M ? json(*t.bound_M) : json(nullptr);
  return j;
}

std::string trace_to_csv(const ConvergenceTrace& t) {
  std::string out = "r,mu,envelope\n";
  for (const auto& s : t.steps)
    out += std::to_string(s.r) + "," + format_double(s.mu) + "," + format_double(s.envelope) + "\n";
  return out;
}

std::string partial_sums_to_csv(const PartialSumReport& r) {
  std::string out = "i,sum_excess,sum_deficit,prod_plus,prod_minus\n";
  for (std::size_t i = 0; i < r.sum_excess.size(); ++i)
    out += std::to_string(i + 1) + "," + format_double(r.sum_excess[i]) + "," +
           format_double(r.sum_deficit[i]) + "," + format_double(r.prod_plus[i]) + "," +
           format_double(r.prod_minus[i]) + "\n";
  return out;
}

json multiplicity_to_json(const MultiplicityReport& m) {
  return {{"lambda", complex_to_json(m.lambda)}, {"algebraic", m.algebraic},
          {"geometric", m.geometric},            {"cluster_tol", m.cluster_tol},
          {"rank_tol", m.rank_tol},              {"ambiguous", m.ambiguous}};
}

#define PARNORM_INSTANTIATE(S)                                                \
  template json matrix_to_json(const Mat<S>&);                                \
  template Mat<S> matrix_from_json(const json&, const std::string&);          \
  template json vector_to_json(const Vec<S>&);                                \
  template Vec<S> vector_from_json(const json&, const std::string&);          \
  template Mat<S> read_matrix_file(const std::string&);                       \
  template json verdict_to_json(const ContractionVerdict<S>&);                \
  template json estimate_to_json(const NormEstimate<S>&);

PARNORM_INSTANTIATE(double)
PARNORM_INSTANTIATE(Complex)
#undef PARNORM_INSTANTIATE

}  // namespace parnorm::io
