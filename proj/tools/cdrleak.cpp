#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "cdrleak/cli.hpp"

int main(int argc, char** argv) {
  using cdrleak::Command;

  CLI::App app{"Two-region carbon leakage solver: equilibrium, optimal tax and removal subsidy, verification"};
  app.require_subcommand(1);

  cdrleak::RunConfig cfg;
  double ea = 0.0;
  double r = 0.0;

  const std::map<std::string, Command> commands = {
      {"solve", Command::Solve},   {"optimize", Command::Optimize}, {"prices", Command::Prices},
      {"sweep", Command::Sweep},   {"verify", Command::Verify},     {"curves", Command::Curves},
  };
  const std::map<std::string, std::string> help = {
      {"solve", "Solve W's equilibrium demand and leakage rates at (E^A, R)"},
      {"optimize", "Region A's command-and-control optimum"},
      {"prices", "Optimal carbon tax and removal subsidy"},
      {"sweep", "Comparative statics over one scenario parameter"},
      {"verify", "Randomized verification of the leakage and pricing results"},
      {"curves", "Marginal cost and marginal benefit curves of W's energy demand"},
  };

  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, _] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    subs[name] = sub;
    if (name != "verify") sub->add_option("--scenario", cfg.scenario_path, "Scenario JSON file");
    sub->add_option("--out", cfg.output_path, "CSV output file (default: standard output)");
    if (name == "solve" || name == "curves") {
      sub->add_option("--ea", ea, "Region A energy use E^A")->required();
      sub->add_option("--r", r, "Carbon removal R")->required();
    }
    if (name == "sweep") sub->add_option("--sweep", cfg.sweep_path, "Sweep JSON file")->required();
    if (name == "verify") sub->add_option("--seeds", cfg.seed_count, "Number of random scenarios (seeds 0..n-1)");
    if (name == "curves") sub->add_option("--points", cfg.curve_points, "Grid points on [0, e_max - E^A]");
    if (name == "sweep" || name == "verify") sub->add_option("--workers", cfg.workers, "Worker threads");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cdrleak::kExitInvalid;
  }

  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) {
      cfg.command = commands.at(name);
      if (name == "solve" || name == "curves") cfg.point = cdrleak::Allocation{ea, r};
    }
  }
  return cdrleak::run(cfg, std::cout, std::cerr);
}
