#include <CLI11.hpp>

#include <iostream>

#include "parnorm/cli.hpp"

int main(int argc, char** argv) {
  using namespace parnorm::cli;
  CLI::App app{"Partial norms, contraction classes and general matrix products"};
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::size_t> max_r;
    std::optional<double> threshold;
  };
  Common common;
  std::string selected;

  for (const char* name : {"norm", "classify", "product", "ergodicity", "spectral"}) {
    auto* sub = app.add_subcommand(name, std::string("run a '") + name + "' experiment");
    sub->add_option("--config", common.config, "experiment config (JSON)")->required();
    sub->add_option("--seed", common.seed, "override the config seed");
    sub->add_option("--out", common.out, "output directory (default $PARNORM_OUT_DIR or ./parnorm_out)");
    sub->add_option("--format", common.format, "trace format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--max-r", common.max_r, "number of product steps");
    sub->add_option("--threshold", common.threshold, "convergence threshold");
    sub->callback([&selected, name]() { selected = name; });
  }

  std::string report;
  std::optional<std::string> replay_out, replay_config;
  auto* rep = app.add_subcommand("replay", "re-run the config embedded in a report and compare traces");
  rep->add_option("report", report, "report.json of a previous run")->required();
  rep->add_option("--out", replay_out, "output directory (default <report dir>/replay)");
  rep->add_option("--config", replay_config, "replacement config; policies must match");
  rep->callback([&selected]() { selected = "replay"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kValidation;
  }

  if (selected == "replay") return replay(report, replay_out, replay_config, std::cout, std::cerr);

  Overrides ov;
  ov.subcommand = selected;
  ov.seed = common.seed;
  ov.max_r = common.max_r;
  ov.threshold = common.threshold;
  ov.format = common.format;
  return run_file(common.config, ov, common.out, std::cerr);
}
