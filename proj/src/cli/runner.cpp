#include <filesystem>
#include <ostream>

#include "config.hpp"
#include "parnorm/kernels.hpp"

namespace parnorm::cli {

namespace fs = std::filesystem;

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

namespace {

struct Context {
  const json& cfg;
  std::string out_dir;
  json results = json::object();
  json traces = json::array();
  std::vector<std::string> written;
  std::string status = "ok";
  int exit_code = kOk;
};

void emit_trace(Context& ctx, std::size_t index, const ConvergenceTrace& t) {
  const bool csv = ctx.cfg.at("format") == "csv";
  const std::string name = "trace_" + std::to_string(index) + (csv ? ".csv" : ".json");
  const std::string content = csv ? io::trace_to_csv(t) : io::trace_to_json(t).dump(2) + "\n";
  const std::string path = (fs::path(ctx.out_dir) / name).string();
  io::write_file_atomic(path, content);
  ctx.written.push_back(path);
  ctx.traces.push_back({{"schedule", index},
                        {"file", name},
                        {"format", csv ? "csv" : "json"},
                        {"fnv1a64", fnv1a64(content)},
                        {"bytes", content.size()}});
}

json trace_summary(const ConvergenceTrace& t) {
  json j = {{"ordering", to_string(t.ordering)},
            {"status", to_string(t.status)},
            {"steps", t.steps.size()},
            {"overflow", t.overflow},
            {"factors_ok", t.factors_ok}};
  j["crossed_at"] = t.crossed_at ? json(*t.crossed_at) : json(nullptr);
  j["bound_M"] = t.bound_M ? json(*t.bound_M) : json(nullptr);
  j["final_mu"] = t.steps.empty() ? json(nullptr) : json(t.steps.back().mu);
  return j;
}

double tol(const json& cfg, const char* key) { return cfg.at("tolerances").at(key).get<double>(); }

template <class S>
json split_json(const FixedPointSplit<S>& s) {
  return {{"dim_fixed", s.fixed.dim()},
          {"dim_range", s.range.dim()},
          {"complementary", s.complementary},
          {"rank", s.rank.rank},
          {"rank_gap", std::isfinite(s.rank.gap) ? json(s.rank.gap) : json("inf")},
          {"ambiguous", s.rank.ambiguous}};
}

template <class S>
void run_norm(Context& ctx) {
  const json& c = ctx.cfg;
  const Mat<S> a = build_matrix<S>(c.at("matrix"), "/matrix");
  const Eigen::Index n = a.rows();
  const auto norm = build_norm<S>(c.at("norm"), n, "/norm", &a);
  const auto search = build_search(c);
  ctx.results["norm"] = norm.describe();
  if (c.contains("vector")) {
    const Vec<S> x = io::vector_from_json<S>(c.at("vector"), "/vector");
    if (x.size() != n) invalid("/vector", "vector has wrong length");
    ctx.results["vector_norm"] = vector_norm(x, norm);
  }
  ctx.results["operator_norm"] = io::estimate_to_json(operator_norm(a, norm, search));
  if (c.contains("subspace")) {
    const auto h = build_subspace<S>(c.at("subspace"), n, "/subspace", &a);
    const auto inv = check_invariance(a, h, tol(c, "invariance"));
    ctx.results["invariance"] = {{"invariant", inv.invariant}, {"residual", inv.residual}};
    ctx.results["dim_subspace"] = h.dim();
    if (inv.invariant) {
      ctx.results["partial_norm"] = io::estimate_to_json(partial_norm(a, h, norm, search));
      ctx.results["restriction"] = io::matrix_to_json(restrict(a, h, tol(c, "invariance")));
    }
  }
  ctx.results["fixed_point_split"] = split_json(fixed_point_split(a, tol(c, "rank_floor")));
}

template <class S>
json audit_json(const EquivAudit<S>& au) {
  json j = {{"dim_range", au.split.range.dim()},
            {"dim_fixed", au.split.fixed.dim()},
            {"k", au.k},
            {"boundary", au.boundary},
            {"hypotheses_met", au.hypotheses_met},
            {"conflict", au.conflict},
            {"nonexpansive", io::verdict_to_json(au.nonexpansive)},
            {"l_paracontracting", io::verdict_to_json(au.l_paracontracting)},
            {"paracontracting", io::verdict_to_json(au.paracontracting)},
            {"h_contractor", io::verdict_to_json(au.h_contractor)}};
  j["gamma"] = au.gamma ? json(*au.gamma) : json(nullptr);
  j["chain"] = {{"samples", au.chain.samples},
                {"max_excess_range", au.chain.max_excess_range},
                {"max_excess_decrease", au.chain.max_excess_decrease},
                {"holds", au.chain.holds(1e-9)}};
  return j;
}

template <class S>
void run_classify(Context& ctx) {
  const json& c = ctx.cfg;
  const Mat<S> a = build_matrix<S>(c.at("matrix"), "/matrix");
  const Eigen::Index n = a.rows();
  const auto norm = build_norm<S>(c.at("norm"), n, "/norm", &a);
  const auto probe = build_probe(c);
  ctx.results["norm"] = norm.describe();
  ctx.results["nonexpansive"] = io::verdict_to_json(is_nonexpansive(a, norm, probe));
  ctx.results["paracontracting"] = io::verdict_to_json(check_paracontracting(a, norm, probe));
  if (c.contains("subspace")) {
    const auto h = build_subspace<S>(c.at("subspace"), n, "/subspace", &a);
    ctx.results["h_contractor"] = io::verdict_to_json(check_H_contractor(a, h, norm, probe));
  }
  if (c.contains("gamma")) {
    if (!c.at("gamma").is_number() || !(c.at("gamma").get<double>() > 0.0))
      invalid("/gamma", "gamma must be positive");
    ctx.results["l_paracontracting"] =
        io::verdict_to_json(check_l_paracontracting(a, norm, c.at("gamma").get<double>(), probe));
  }
  if (c.at("audit").get<bool>()) {
    if (norm.kind() == NormKind::Composite) {
      ctx.results["audit"] = {{"skipped", "audit builds its own additive norm from a base norm"}};
    } else {
      try {
        ctx.results["audit"] = audit_json(equiv_theorem_audit(a, norm, probe));
      } catch (const NumericalError& e) {
        ctx.results["audit"] = {{"error", e.what()}};
      }
    }
  }
}

template <class S>
void run_product(Context& ctx) {
  const json& c = ctx.cfg;
  const auto seed = c.at("seed").get<std::uint64_t>();
  const auto seq = build_sequence<S>(c.at("sequence"), "/sequence", seed);
  const Eigen::Index n = seq.dim();
  const auto norm = build_norm<S>(c.at("norm"), n, "/norm", nullptr);
  const auto search = build_search(c);
  const json& m = c.at("measure");
  Measure<S> mu;
  const std::string kind = m.value("kind", std::string("operator"));
  if (kind == "operator") {
    mu = operator_norm_measure(norm, search);
  } else if (kind == "partial") {
    if (!m.contains("subspace")) invalid("/measure", "partial measure needs a subspace");
    mu = partial_norm_measure(build_subspace<S>(m.at("subspace"), n, "/measure/subspace", nullptr),
                              norm, search);
  } else {
    invalid("/measure/kind", "unknown measure '" + kind + "'");
  }
  MonitorOptions mo;
  mo.stop_at_threshold = c.at("stop_at_threshold").get<bool>();
  const auto scheds = build_schedules(c);
  json runs = json::array();
  for (std::size_t i = 0; i < scheds.size(); ++i) {
    const auto t = monitor_convergence(seq, scheds[i], mu, c.at("threshold").get<double>(),
                                       c.at("max_r").get<std::size_t>(), mo);
    json r = trace_summary(t);
    r["schedule"] = io::schedule_to_json(scheds[i]);
    runs.push_back(r);
    emit_trace(ctx, i, t);
    if (t.overflow) {
      ctx.status = "overflow";
      ctx.exit_code = kNumerical;
    }
  }
  ctx.results["sequence"] = seq.name();
  ctx.results["runs"] = runs;
}

void precheck_stochastic(const json& seq, const std::string& ptr, double t) {
  auto check = [&](const json& mj, const std::string& p) {
    const Matrix a = build_matrix<double>(mj, p);
    try {
      validate_stochastic(a, t);
    } catch (const ValidationError& e) {
      throw ValidationError(p + ": " + e.what(), p + e.pointer());
    }
  };
  const std::string fam = seq.value("family", std::string());
  if ((fam == "constant") && seq.contains("matrix")) check(seq.at("matrix"), ptr + "/matrix");
  for (const char* key : {"matrices", "prefix", "tail"})
    if ((fam == "list" || fam == "periodic" || fam == "prefix_periodic") && seq.contains(key))
      for (std::size_t i = 0; i < seq.at(key).size(); ++i)
        check(seq.at(key)[i], ptr + "/" + key + "/" + std::to_string(i));
}

void run_ergodicity(Context& ctx) {
  const json& c = ctx.cfg;
  const auto seed = c.at("seed").get<std::uint64_t>();
  precheck_stochastic(c.at("sequence"), "/sequence", tol(c, "stochastic"));
  const auto seq = build_sequence<double>(c.at("sequence"), "/sequence", seed);
  ErgodicityOptions eo;
  eo.tol = tol(c, "stochastic");
  eo.seed = derive_seed(seed, kErgodicitySeed);
  eo.monitor.stop_at_threshold = c.at("stop_at_threshold").get<bool>();
  const auto scheds = build_schedules(c);
  const auto rep = weak_ergodicity_experiment(seq, scheds, c.at("threshold").get<double>(),
                                              c.at("max_r").get<std::size_t>(), eo);
  json runs = json::array();
  for (std::size_t i = 0; i < rep.runs.size(); ++i) {
    const auto& run = rep.runs[i];
    json r = trace_summary(run.trace);
    r["schedule"] = io::schedule_to_json(run.schedule);
    r["consistent_with_weak_ergodicity"] = run.consistent;
    r["difference_ratio"] = run.difference_ratio;
    runs.push_back(r);
    emit_trace(ctx, i, run.trace);
    if (run.trace.overflow) {
      ctx.status = "overflow";
      ctx.exit_code = kNumerical;
    }
  }
  ctx.results["runs"] = runs;
  ctx.results["scope"] = "per-schedule finding";
  if (c.contains("wkerg")) {
    const json& w = c.at("wkerg");
    std::vector<Subfamily> subs{{0, 1}};
    if (w.contains("subsequences")) {
      subs.clear();
      for (std::size_t i = 0; i < w.at("subsequences").size(); ++i)
        subs.push_back(io::subfamily_from_json(w.at("subsequences")[i],
                                               "/wkerg/subsequences/" + std::to_string(i)));
    }
    if (!w.contains("model_C") || !w.contains("model_D"))
      invalid("/wkerg", "needs model_C and model_D");
    const auto wr = wkerg_condition_check(io::tail_model_from_json(w.at("model_C"), "/wkerg/model_C"),
                                          io::tail_model_from_json(w.at("model_D"), "/wkerg/model_D"),
                                          subs, w.value("omega", true));
    json j = {{"verdict", to_string(wr.verdict)},
              {"condition_C", to_string(wr.condition_C)},
              {"condition_D", to_string(wr.condition_D)},
              {"note", wr.note}};
    j["subsequence"] = wr.subsequence ? io::subfamily_to_json(*wr.subsequence) : json(nullptr);
    ctx.results["wkerg"] = j;
  }
  if (c.contains("accumulation")) {
    const auto model = io::tail_model_from_json(c.at("accumulation"), "/accumulation");
    json acc = json::object();
    for (auto v : {AccumVariant::SinglePoint, AccumVariant::AllPoints}) {
      const auto ar = accumulation_corollary_check(model, v);
      json j = {{"verdict", to_string(ar.verdict)}, {"points", ar.points}, {"note", ar.note}};
      j["implied_wkerg"] = ar.implied ? json(to_string(ar.implied->verdict)) : json(nullptr);
      acc[to_string(v)] = j;
    }
    ctx.results["accumulation"] = acc;
  }
}

template <class S>
void run_spectral(Context& ctx) {
  const json& c = ctx.cfg;
  const Mat<S> a = build_matrix<S>(c.at("matrix"), "/matrix");
  const Eigen::Index n = a.rows();
  const Complex lambda = io::complex_from_json(c.at("lambda"), "/lambda");
  MultiplicityOptions mo;
  mo.rank_tol = tol(c, "rank_tol");
  if (!c.at("tolerances").at("cluster_tol").is_null()) mo.cluster_tol = tol(c, "cluster_tol");
  ctx.results["multiplicities"] = io::multiplicity_to_json(multiplicities(a, lambda, mo));
  ctx.results["index_one_at_one"] = index_one_at_one(a, mo.rank_tol);
  const auto search = build_search(c);
  if (c.contains("subspace")) {
    const auto h = build_subspace<S>(c.at("subspace"), n, "/subspace", &a);
    const auto b = check_multiplicity_bounds(a, h, lambda, mo);
    ctx.results["bounds"] = {{"n", b.n},
                             {"dim_h", b.dim_h},
                             {"full", io::multiplicity_to_json(b.full)},
                             {"restricted", io::multiplicity_to_json(b.restricted)},
                             {"algebraic_pass", b.algebraic_pass},
                             {"geometric_pass", b.geometric_pass}};
    const auto norm = build_norm<S>(c.at("norm"), n, "/norm", &a);
    const auto hm = high_modulus_bound(a, h, norm, lambda, tol(c, "margin"), mo, search);
    ctx.results["high_modulus"] = {{"verdict", to_string(hm.verdict)},
                                   {"partial_norm", hm.partial},
                                   {"method", to_string(hm.method)},
                                   {"margin", hm.margin},
                                   {"bound", hm.bound},
                                   {"diagnostics", hm.diagnostics}};
  }
  if constexpr (std::is_same_v<S, double>) {
    if (is_stochastic(a, tol(c, "stochastic"))) {
      const auto norm = build_norm<double>(c.at("norm"), n, "/norm", &a);
      try {
        const auto so = stochastic_simple_one(a, norm, tol(c, "norm_compare"), search);
        ctx.results["stochastic_simple_one"] = {{"coefficient", so.coefficient},
                                                {"alpha_one", so.one.algebraic},
                                                {"subdominant", so.subdominant},
                                                {"pass", so.pass}};
      } catch (const ValidationError& e) {
        ctx.results["stochastic_simple_one"] = {{"precondition_unmet", e.what()}};
      }
    }
  }
}

void write_error(std::ostream& err, int code, const char* kind, const std::string& msg,
                 const json& extra = json::object()) {
  json e = {{"exit_code", code}, {"kind", kind}, {"message", msg}};
  for (auto it = extra.begin(); it != extra.end(); ++it) e[it.key()] = it.value();
  err << json{{"error", e}}.dump() << "\n";
}

template <class F>
int guarded(std::ostream& err, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    write_error(err, kValidation, "validation", e.what(), {{"pointer", e.pointer()}});
    return kValidation;
  } catch (const InvarianceError& e) {
    json extra = {{"residual", e.residual()}};
    if (e.index() >= 0) extra["index"] = e.index();
    write_error(err, kValidation, "invariance", e.what(), extra);
    return kValidation;
  } catch (const DimensionError& e) {
    write_error(err, kValidation, "dimension", e.what());
    return kValidation;
  } catch (const json::exception& e) {
    write_error(err, kValidation, "config", e.what());
    return kValidation;
  } catch (const NumericalError& e) {
    write_error(err, kNumerical, "numerical", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    write_error(err, kNumerical, "runtime", e.what());
    return kNumerical;
  }
}

}  // namespace

RunResult run(const json& config, const std::string& out_dir, std::ostream& err) {
  RunResult res;
  res.exit_code = guarded(err, [&]() {
    Context ctx{config, out_dir, json::object(), json::array(), {}, "ok", kOk};
    const std::string sub = config.at("subcommand").get<std::string>();
    const bool cx = config.at("field") == "complex";
    if (sub == "norm")
      cx ? run_norm<Complex>(ctx) : run_norm<double>(ctx);
    else if (sub == "classify")
      cx ? run_classify<Complex>(ctx) : run_classify<double>(ctx);
    else if (sub == "product")
      cx ? run_product<Complex>(ctx) : run_product<double>(ctx);
    else if (sub == "ergodicity")
      run_ergodicity(ctx);
    else if (sub == "spectral")
      cx ? run_spectral<Complex>(ctx) : run_spectral<double>(ctx);
    else
      invalid("/subcommand", "unknown subcommand");
    res.report = {{"schema", kReportSchema},
                  {"subcommand", sub},
                  {"status", ctx.status},
                  {"config", config},
                  {"results", ctx.results},
                  {"traces", ctx.traces},
                  {"kernels", std::string(kernels::active().name)}};
    const std::string path = (fs::path(out_dir) / "report.json").string();
    io::write_file_atomic(path, res.report.dump(2) + "\n");
    ctx.written.push_back(path);
    res.written = ctx.written;
    if (ctx.exit_code == kNumerical)
      write_error(err, kNumerical, "numerical", "product norm overflow; trace truncated");
    return ctx.exit_code;
  });
  return res;
}

int run_file(const std::string& config_path, const Overrides& overrides,
             const std::optional<std::string>& out, std::ostream& err) {
  json cfg;
  const int rc = guarded(err, [&]() {
    cfg = normalize_config(load_config(config_path), overrides);
    return kOk;
  });
  if (rc != kOk) return rc;
  return run(cfg, resolve_out_dir(out), err).exit_code;
}

std::vector<std::string> validate_report(const json& r) {
  std::vector<std::string> bad;
  if (!r.is_object()) return {"report is not an object"};
  if (r.value("schema", std::string()) != kReportSchema) bad.push_back("schema");
  for (const char* key : {"subcommand", "status", "kernels"})
    if (!r.contains(key) || !r.at(key).is_string()) bad.push_back(key);
  if (!r.contains("results") || !r.at("results").is_object()) bad.push_back("results");
  if (!r.contains("config") || !r.at("config").is_object()) {
    bad.push_back("config");
  } else {
    const json& c = r.at("config");
    if (c.value("schema", std::string()) != kConfigSchema) bad.push_back("config/schema");
    if (!c.contains("seed") || !c.at("seed").is_number_unsigned()) bad.push_back("config/seed");
  }
  if (!r.contains("traces") || !r.at("traces").is_array()) {
    bad.push_back("traces");
  } else {
    for (const auto& t : r.at("traces"))
      if (!t.contains("file") || !t.contains("format") || !t.contains("fnv1a64") ||
          !t.contains("bytes"))
        bad.push_back("traces/entry");
  }
  return bad;
}

namespace {

std::vector<std::string> orderings(const json& cfg) {
  std::vector<std::string> out;
  if (cfg.contains("schedules"))
    for (const auto& s : cfg.at("schedules")) out.push_back(s.value("ordering", std::string()));
  return out;
}

}  // namespace

int replay(const std::string& report_path, const std::optional<std::string>& out_dir,
           const std::optional<std::string>& config_override, std::ostream& out,
           std::ostream& err) {
  json report, cfg;
  const int rc = guarded(err, [&]() {
    try {
      report = json::parse(io::read_file(report_path));
    } catch (const json::parse_error& e) {
      invalid("", std::string("report is not valid JSON: ") + e.what());
    }
    const auto bad = validate_report(report);
    if (!bad.empty()) {
      std::string what = "report cannot be replayed, invalid fields:";
      for (const auto& b : bad) what += " " + b;
      invalid("/" + bad.front(), what);
    }
    cfg = normalize_config(report.at("config"));
    if (config_override) {
      json oc = normalize_config(load_config(*config_override));
      if (oc.at("subcommand") != cfg.at("subcommand"))
        invalid("/subcommand", "config mismatch: replay cannot change the subcommand");
      if (orderings(oc) != orderings(cfg))
        invalid("/schedules", "config mismatch: replay cannot change ordering policies");
      cfg = std::move(oc);
    }
    return kOk;
  });
  if (rc != kOk) return rc;

  const fs::path report_dir = fs::path(report_path).parent_path();
  const std::string dir = out_dir ? *out_dir : (report_dir / "replay").string();
  const RunResult res = run(cfg, dir, err);
  if (res.exit_code != kOk) return res.exit_code;

  const json& before = report.at("traces");
  const json& after = res.report.at("traces");
  bool same = before.size() == after.size();
  json rows = json::array();
  for (std::size_t i = 0; i < std::max(before.size(), after.size()); ++i) {
    json row = {{"index", i}};
    bool ok = i < before.size() && i < after.size();
    if (ok) {
      const auto fa = before[i].at("file").get<std::string>();
      const auto fb = after[i].at("file").get<std::string>();
      const std::string replayed = io::read_file((fs::path(dir) / fb).string());
      const fs::path orig = report_dir / fa;
      if (fs::exists(orig)) {
        ok = io::read_file(orig.string()) == replayed;
        row["compared"] = "bytes";
      } else {
        ok = before[i].at("fnv1a64") == fnv1a64(replayed);
        row["compared"] = "hash";
      }
      row["file"] = fb;
    }
    row["identical"] = ok;
    same = same && ok;
    rows.push_back(row);
  }
  out << json{{"replay", same ? "identical" : "mismatch"}, {"out", dir}, {"traces", rows}}.dump(2)
      << "\n";
  if (!same)
    write_error(err, kReplayMismatch, "replay_mismatch", "replayed traces differ from the report");
  return same ? kOk : kReplayMismatch;
}

}  // namespace parnorm::cli
