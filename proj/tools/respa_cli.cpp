#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "respa/experiment.hpp"

namespace fs = std::filesystem;
using respa::json;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<int> comb_order;
  std::optional<double> tol;
  bool quiet = false;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw respa::Error("io", "cannot write " + path.string());
  os << content;
}

int run(const std::string& kind, const Options& opt) {
  respa::ExperimentConfig config = respa::load_config(opt.config);
  config.kind = kind;
  if (opt.comb_order) config.solver.comb_order = *opt.comb_order;
  if (opt.tol) config.solver.tol = *opt.tol;

  const respa::ExperimentResult result = respa::run_experiment(config);
  const fs::path out(opt.out);
  fs::create_directories(out);
  const std::string summary = respa::dump(result.summary);
  write_file(out / "summary.json", summary);
  for (const auto& f : result.files) write_file(out / f.name, f.content);
  if (!opt.quiet) std::cout << summary;
  return 0;
}

int fail(const std::string& kind, const std::string& message) {
  json j{{"error", {{"kind", kind}, {"message", message}}}};
  std::cout << respa::dump(j);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic-inductance resonator parametric amplifier simulator"};
  app.require_subcommand(1);
  Options opt;
  std::string chosen;
  for (const std::string& kind : respa::experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(kind, "Run the " + kind + " experiment");
    sub->add_option("--config", opt.config, "Scenario INI file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--comb-order", opt.comb_order, "Pump comb order override")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol", opt.tol, "Solver tolerance override")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", opt.quiet, "Do not print the summary");
    sub->callback([&chosen, kind] { chosen = kind; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }
  try {
    return run(chosen, opt);
  } catch (const respa::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}
