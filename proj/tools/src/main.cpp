#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "degpar/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Degenerate parabolic solver, Carleman scans and null control"};
  app.require_subcommand(1);

  degpar::RunOptions opts;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool have_out = false, have_seed = false;

  const std::vector<std::string> names = {
      "classify", "solve", "weights", "carleman-scan",
      "observability", "control", "suite"};
  const std::vector<std::string> briefs = {
      "coefficient classification and hypothesis reports",
      "forward trajectory export",
      "Carleman weight tables",
      "both sides of the Carleman inequality over an s grid",
      "observability constant via power iteration",
      "penalized dual null-control synthesis",
      "composed invariant battery"};
  for (size_t i = 0; i < names.size(); ++i) {
    auto* sub = app.add_subcommand(names[i], briefs[i]);
    sub->add_option("--config", opts.config_path, "TOML experiment file");
    sub->add_option("--out", out_dir, "output directory")
        ->each([&](const std::string&) { have_out = true; });
    sub->add_option("--seed", seed, "ensemble / power-iteration seed")
        ->each([&](const std::string&) { have_seed = true; });
    sub->add_option("--threads", opts.threads, "worker threads for scans");
  }

  CLI11_PARSE(app, argc, argv);

  opts.subcommand = app.get_subcommands().front()->get_name();
  if (have_out) opts.out_override = out_dir;
  if (have_seed) opts.seed_override = seed;
  return degpar::run(opts, std::cerr);
}
