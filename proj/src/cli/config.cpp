#include "config.hpp"

#include <cstdlib>
#include <filesystem>

#include "parnorm/stochastic.hpp"

namespace parnorm::cli {

namespace fs = std::filesystem;

void invalid(const std::string& pointer, const std::string& what) {
  throw ValidationError((pointer.empty() ? std::string("/") : pointer) + ": " + what,
                        pointer.empty() ? "/" : pointer);
}

namespace {

const char* const kSubcommands[] = {"norm", "classify", "product", "ergodicity", "spectral"};

void inline_files(json& j, const fs::path& dir, const std::string& ptr, bool complex) {
  if (j.is_object() && j.size() == 1 && j.contains("file") && j.at("file").is_string()) {
    fs::path p = j.at("file").get<std::string>();
    if (p.is_relative()) p = dir / p;
    try {
      j = complex ? io::matrix_to_json(io::read_matrix_file<Complex>(p.string()))
                  : io::matrix_to_json(io::read_matrix_file<double>(p.string()));
    } catch (const ValidationError& e) {
      invalid(ptr + "/file", e.what());
    }
    return;
  }
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      inline_files(it.value(), dir, ptr + "/" + it.key(), complex);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      inline_files(j[i], dir, ptr + "/" + std::to_string(i), complex);
  }
}

json default_tolerances() {
  return {{"invariance", 1e-9},   {"rank_floor", 1e-10}, {"norm_compare", 1e-8},
          {"fixed_residual", 1e-9}, {"para_tol", 1e-12},  {"lp_tol", 1e-10},
          {"rank_tol", 1e-9},     {"cluster_tol", nullptr}, {"stochastic", 1e-9},
          {"margin", 1e-8}};
}

json default_search() {
  return {{"samples", std::uint64_t{2000}},
          {"refine_starts", std::uint64_t{6}},
          {"max_refine_evaluations", std::uint64_t{40000}}};
}

void merge_defaults(json& target, const json& defaults, const std::string& ptr) {
  if (target.is_null()) target = json::object();
  if (!target.is_object()) invalid(ptr, "expected an object");
  for (auto it = defaults.begin(); it != defaults.end(); ++it)
    if (!target.contains(it.key())) target[it.key()] = it.value();
  for (auto it = target.begin(); it != target.end(); ++it) {
    if (!defaults.contains(it.key())) invalid(ptr + "/" + it.key(), "unknown field");
    if (!it.value().is_null() && !it.value().is_number())
      invalid(ptr + "/" + it.key(), "expected a number");
  }
}

bool nonneg_int(json& j) {
  if (!j.is_number_integer()) return false;
  if (!j.is_number_unsigned()) {
    if (j.get<std::int64_t>() < 0) return false;
    j = j.get<std::uint64_t>();
  }
  return true;
}

bool needs_matrix(const std::string& sub) {
  return sub == "norm" || sub == "classify" || sub == "spectral";
}

}  // namespace

json load_config(const std::string& path) {
  const std::string text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid("", std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) invalid("", "config must be a JSON object");
  const bool complex = j.value("field", std::string("real")) == "complex";
  inline_files(j, fs::path(path).parent_path(), "", complex);
  return j;
}

json normalize_config(json c, const Overrides& ov) {
  if (!c.is_object()) invalid("", "config must be a JSON object");
  if (!c.contains("schema")) c["schema"] = kConfigSchema;
  if (c["schema"] != kConfigSchema)
    invalid("/schema", std::string("unsupported schema, expected ") + kConfigSchema);

  if (ov.subcommand) {
    if (c.contains("subcommand") && c["subcommand"] != *ov.subcommand)
      invalid("/subcommand", "config is for '" + c["subcommand"].dump() + "', not '" +
                                 *ov.subcommand + "'");
    c["subcommand"] = *ov.subcommand;
  }
  if (!c.contains("subcommand") || !c["subcommand"].is_string())
    invalid("/subcommand", "missing subcommand");
  const std::string sub = c["subcommand"].get<std::string>();
  bool known = false;
  for (const char* s : kSubcommands) known = known || sub == s;
  if (!known) invalid("/subcommand", "unknown subcommand '" + sub + "'");

  if (ov.seed) c["seed"] = *ov.seed;
  if (!c.contains("seed")) invalid("/seed", "a seed is required (config field or --seed)");
  if (!nonneg_int(c["seed"])) invalid("/seed", "seed must be an unsigned 64-bit integer");

  if (!c.contains("field")) c["field"] = "real";
  if (c["field"] != "real" && c["field"] != "complex")
    invalid("/field", "field must be 'real' or 'complex'");
  if (sub == "ergodicity" && c["field"] != "real")
    invalid("/field", "stochastic experiments are real only");

  if (ov.threshold) c["threshold"] = *ov.threshold;
  if (!c.contains("threshold")) c["threshold"] = 1e-8;
  if (!c["threshold"].is_number() || !(c["threshold"].get<double>() > 0.0))
    invalid("/threshold", "threshold must be a positive number");

  if (ov.max_r) c["max_r"] = *ov.max_r;
  if (!c.contains("max_r")) c["max_r"] = std::uint64_t{200};
  if (!nonneg_int(c["max_r"]) || c["max_r"].get<std::size_t>() == 0)
    invalid("/max_r", "max_r must be a positive integer");

  if (ov.format) c["format"] = *ov.format;
  if (!c.contains("format")) c["format"] = "csv";
  if (c["format"] != "csv" && c["format"] != "json") invalid("/format", "format must be json or csv");

  if (!c.contains("stop_at_threshold")) c["stop_at_threshold"] = true;
  if (!c["stop_at_threshold"].is_boolean()) invalid("/stop_at_threshold", "expected a boolean");

  merge_defaults(c["tolerances"], default_tolerances(), "/tolerances");
  merge_defaults(c["search"], default_search(), "/search");
  if (!c.contains("budget")) c["budget"] = std::uint64_t{10000};
  if (!nonneg_int(c["budget"])) invalid("/budget", "budget must be a nonnegative integer");

  if (needs_matrix(sub) && !c.contains("matrix")) invalid("/matrix", "missing matrix");
  if ((sub == "product" || sub == "ergodicity") && !c.contains("sequence"))
    invalid("/sequence", "missing sequence");
  if (sub != "ergodicity" && !c.contains("norm")) c["norm"] = {{"kind", "L1"}};

  if (sub == "product" || sub == "ergodicity") {
    if (!c.contains("schedules")) c["schedules"] = json::array({json::object()});
    if (!c["schedules"].is_array() || c["schedules"].empty())
      invalid("/schedules", "expected a nonempty array");
    for (std::size_t i = 0; i < c["schedules"].size(); ++i)
      c["schedules"][i] = io::schedule_to_json(
          io::schedule_from_json(c["schedules"][i], "/schedules/" + std::to_string(i)));
  }
  if (sub == "product" && !c.contains("measure")) c["measure"] = {{"kind", "operator"}};
  if (sub == "spectral") {
    if (!c.contains("lambda")) c["lambda"] = json::array({1.0, 0.0});
    c["lambda"] = io::complex_to_json(io::complex_from_json(c["lambda"], "/lambda"));
  }
  if (sub == "classify" && !c.contains("audit")) c["audit"] = true;
  return c;
}

std::string resolve_out_dir(const std::optional<std::string>& out) {
  if (out) return *out;
  if (const char* env = std::getenv("PARNORM_OUT_DIR"); env && *env) return env;
  return "parnorm_out";
}

template <class S>
Mat<S> build_matrix(const json& j, const std::string& ptr) {
  const Mat<S> a = io::matrix_from_json<S>(j, ptr);
  if (a.rows() == 0) invalid(ptr, "matrix must be nonempty");
  return a;
}

template <class S>
Subspace<S> build_subspace(const json& j, Eigen::Index n, const std::string& ptr, const Mat<S>* a) {
  if (!j.is_object() || !j.contains("kind")) invalid(ptr, "subspace needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "full") return Subspace<S>::full(n);
  if (kind == "zero") return Subspace<S>::zero(n);
  if (kind == "ergodicity") {
    if constexpr (std::is_same_v<S, double>) {
      return ergodicity_subspace(n);
    } else {
      invalid(ptr, "ergodicity subspace is real only");
    }
  }
  if (kind == "coordinate") {
    if (!j.contains("indices")) invalid(ptr, "coordinate subspace needs indices");
    const auto idx = j.at("indices").get<std::vector<long>>();
    std::vector<Eigen::Index> out;
    for (long i : idx) {
      if (i < 0 || i >= n) invalid(ptr + "/indices", "index out of range");
      out.push_back(i);
    }
    return Subspace<S>::coordinate(n, out);
  }
  if (kind == "span") {
    if (!j.contains("vectors") || !j.at("vectors").is_array())
      invalid(ptr, "span needs a vectors array");
    const json& vs = j.at("vectors");
    Mat<S> m(n, static_cast<Eigen::Index>(vs.size()));
    for (std::size_t k = 0; k < vs.size(); ++k) {
      const std::string wk = ptr + "/vectors/" + std::to_string(k);
      const Vec<S> v = io::vector_from_json<S>(vs[k], wk);
      if (v.size() != n) invalid(wk, "vector has wrong length");
      m.col(static_cast<Eigen::Index>(k)) = v;
    }
    return Subspace<S>::span(m);
  }
  if (kind == "range" || kind == "fixed") {
    if (!a) invalid(ptr, "'" + kind + "' needs a matrix");
    return kind == "range" ? range_complement(*a) : fixed_point_space(*a);
  }
  invalid(ptr + "/kind", "unknown subspace kind '" + kind + "'");
}

template <class S>
NormSpec<S> build_norm(const json& j, Eigen::Index n, const std::string& ptr, const Mat<S>* a) {
  if (!j.is_object() || !j.contains("kind")) invalid(ptr, "norm needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "L1") return NormSpec<S>::l1();
  if (kind == "L2") return NormSpec<S>::l2();
  if (kind == "Linf") return NormSpec<S>::linf();
  if (kind == "WeightedL1") {
    if (!j.contains("weights")) invalid(ptr, "WeightedL1 needs weights");
    const Vector w = io::vector_from_json<double>(j.at("weights"), ptr + "/weights");
    if (w.size() != n) invalid(ptr + "/weights", "weights have wrong length");
    try {
      return NormSpec<S>::weighted_l1(w);
    } catch (const ValidationError& e) {
      invalid(ptr + "/weights", e.what());
    }
  }
  if (kind == "Composite") {
    for (const char* key : {"base", "H", "K"})
      if (!j.contains(key)) invalid(ptr, std::string("Composite needs ") + key);
    const auto base = build_norm<S>(j.at("base"), n, ptr + "/base", a);
    const auto h = build_subspace<S>(j.at("H"), n, ptr + "/H", a);
    const auto k = build_subspace<S>(j.at("K"), n, ptr + "/K", a);
    try {
      return NormSpec<S>::composite(base, h, k, j.value("cond_limit", 1e8));
    } catch (const ValidationError& e) {
      invalid(ptr, e.what());
    }
  }
  invalid(ptr + "/kind", "unknown norm kind '" + kind + "'");
}

template <class S>
MatrixSequence<S> build_sequence(const json& j, const std::string& ptr, std::uint64_t seed) {
  if (!j.is_object() || !j.contains("family")) invalid(ptr, "sequence needs a family");
  const std::string fam = j.at("family").get<std::string>();
  auto field = [&](const char* key) -> const json& {
    if (!j.contains(key)) invalid(ptr, "family '" + fam + "' needs " + key);
    return j.at(key);
  };
  auto list = [&](const char* key) {
    const json& ms = field(key);
    if (!ms.is_array() || ms.empty()) invalid(ptr + "/" + key, "expected a nonempty array");
    std::vector<Mat<S>> out;
    for (std::size_t i = 0; i < ms.size(); ++i)
      out.push_back(build_matrix<S>(ms[i], ptr + "/" + key + "/" + std::to_string(i)));
    return out;
  };
  try {
    if (fam == "constant") return MatrixSequence<S>::constant(build_matrix<S>(field("matrix"), ptr + "/matrix"));
    if (fam == "list") return MatrixSequence<S>::list(list("matrices"));
    if (fam == "periodic") return MatrixSequence<S>::periodic(list("matrices"));
    if (fam == "prefix_periodic")
      return MatrixSequence<S>::prefix_periodic(j.contains("prefix") && !j.at("prefix").empty()
                                                    ? list("prefix")
                                                    : std::vector<Mat<S>>{},
                                                list("tail"));
    if (fam == "geometric")
      return MatrixSequence<S>::geometric(build_matrix<S>(field("matrix"), ptr + "/matrix"),
                                          field("c").template get<double>());
    if (fam == "scaled")
      return MatrixSequence<S>::scaled(build_sequence<S>(field("base"), ptr + "/base", seed),
                                       io::tail_model_from_json(field("model"), ptr + "/model"));
    if (fam == "random_stochastic") {
      const auto n = field("n").template get<Eigen::Index>();
      if (n < 1) invalid(ptr + "/n", "n must be positive");
      const double zp = j.value("zero_prob", 0.0);
      const std::uint64_t s = derive_seed(seed, kSequenceSeed);
      return MatrixSequence<S>::generator(
          n,
          [n, zp, s](std::size_t i) {
            Rng rng(derive_seed(s, i));
            return Mat<S>(random_stochastic(n, rng, zp).template cast<S>());
          },
          "random_stochastic");
    }
    if (fam == "random_normalized") {
      // A_i = mu_i W_i with W_i Gaussian scaled to unit L1 operator norm.
      const auto n = field("n").template get<Eigen::Index>();
      if (n < 1) invalid(ptr + "/n", "n must be positive");
      const TailModel model = io::tail_model_from_json(field("model"), ptr + "/model");
      const std::uint64_t s = derive_seed(seed, kSequenceSeed);
      return MatrixSequence<S>::generator(
          n,
          [n, model, s](std::size_t i) {
            Rng rng(derive_seed(s, i));
            Mat<S> w;
            if constexpr (std::is_same_v<S, double>)
              w = random_gaussian(n, n, rng);
            else
              w = random_complex_gaussian(n, n, rng);
            const double c = w.cwiseAbs().colwise().sum().maxCoeff();
            return Mat<S>((model.value(i) / c) * w);
          },
          "random_normalized", model.length());
    }
  } catch (const json::exception& e) {
    invalid(ptr, e.what());
  } catch (const ValidationError& e) {
    if (!e.pointer().empty()) throw;
    invalid(ptr, e.what());
  } catch (const DimensionError& e) {
    invalid(ptr, e.what());
  }
  invalid(ptr + "/family", "unknown sequence family '" + fam + "'");
}

std::vector<ProductSchedule> build_schedules(const json& cfg) {
  std::vector<ProductSchedule> out;
  const json& s = cfg.at("schedules");
  for (std::size_t i = 0; i < s.size(); ++i)
    out.push_back(io::schedule_from_json(s[i], "/schedules/" + std::to_string(i)));
  return out;
}

SearchOptions build_search(const json& cfg) {
  SearchOptions o;
  const json& s = cfg.at("search");
  o.samples = s.at("samples").get<std::size_t>();
  o.refine_starts = s.at("refine_starts").get<std::size_t>();
  o.max_refine_evaluations = s.at("max_refine_evaluations").get<std::size_t>();
  o.invariance_tol = cfg.at("tolerances").at("invariance").get<double>();
  o.seed = derive_seed(cfg.at("seed").get<std::uint64_t>(), kSearchSeed);
  return o;
}

ProbeOptions build_probe(const json& cfg) {
  ProbeOptions p;
  const json& t = cfg.at("tolerances");
  p.budget = cfg.at("budget").get<std::size_t>();
  p.seed = derive_seed(cfg.at("seed").get<std::uint64_t>(), kProbeSeed);
  p.tol = t.at("norm_compare").get<double>();
  p.fixed_residual = t.at("fixed_residual").get<double>();
  p.para_tol = t.at("para_tol").get<double>();
  p.lp_tol = t.at("lp_tol").get<double>();
  p.search = build_search(cfg);
  return p;
}

#define PARNORM_INSTANTIATE(S)                                                            \
  template Mat<S> build_matrix(const json&, const std::string&);                          \
  template Subspace<S> build_subspace(const json&, Eigen::Index, const std::string&,      \
                                      const Mat<S>*);                                     \
  template NormSpec<S> build_norm(const json&, Eigen::Index, const std::string&,          \
                                  const Mat<S>*);                                         \
  template MatrixSequence<S> build_sequence(const json&, const std::string&, std::uint64_t);

PARNORM_INSTANTIATE(double)
PARNORM_INSTANTIATE(Complex)
#undef PARNORM_INSTANTIATE

}  // namespace parnorm::cli
