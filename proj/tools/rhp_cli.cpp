// Batch driver: rhp <subcommand> [--config FILE] [--set key=value ...] [-o FILE]
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rhp/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Riemann-Hilbert resolvent toolkit"};
  app.require_subcommand(1);
  std::string config_path, output, plot;
  std::vector<std::string> overrides;
  for (auto name : {"delta", "solve", "deform", "sweep", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("-s,--set", overrides, "override key=value (repeatable)");
    sub->add_option("-o,--output", output, "artifact path (default: stdout)");
    sub->add_option("--plot", plot, "line-delimited JSON series path");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rhp::kConfigError;
  }
  try {
    rhp::ConfigMap m;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      m = rhp::read_config(in);
    }
    rhp::apply_overrides(m, overrides);
    if (!output.empty()) m["output"] = output;
    if (!plot.empty()) m["plot"] = plot;
    auto sub = rhp::parse_subcommand(app.get_subcommands().front()->get_name());
    return rhp::run(rhp::make_config(sub, m), std::cout, std::cerr);
  } catch (const rhp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rhp::kConfigError;
  }
}
