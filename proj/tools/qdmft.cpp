#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdmft/cli.hpp"

namespace {

struct CommandArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
};

void add_common(CLI::App* cmd, CommandArgs& a) {
  cmd->add_option("--config", a.config, "INI configuration file");
  cmd->add_option("--set", a.sets, "override, section.key=value (repeatable)");
  cmd->add_option("--out", a.out, "output directory (overrides output.dir)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-site DMFT with a VQE impurity solver"};
  app.require_subcommand(1);
  CommandArgs args;
  auto* solve = app.add_subcommand("solve", "VQE spectrum, weights and comparison table");
  auto* dmft = app.add_subcommand("dmft", "self-consistency loop, trace and DOS");
  auto* dos = app.add_subcommand("dos", "impurity and lattice DOS at one parameter point");
  auto* verify = app.add_subcommand("verify", "oracle property suites");
  for (auto* c : {solve, dmft, dos, verify}) add_common(c, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qdmft::kExitConfig;
  }

  try {
    qdmft::RunConfig cfg = qdmft::load_config(args.config, args.sets);
    if (!args.out.empty()) cfg.out_dir = args.out;
    if (solve->parsed()) return qdmft::cmd_solve(cfg, std::cout);
    if (dmft->parsed()) return qdmft::cmd_dmft(cfg, std::cout);
    if (dos->parsed()) return qdmft::cmd_dos(cfg, std::cout);
    return qdmft::cmd_verify(cfg, std::cout);
  } catch (const qdmft::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return qdmft::kExitConfig;
  } catch (const qdmft::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qdmft::kExitUnconverged;
  }
}
