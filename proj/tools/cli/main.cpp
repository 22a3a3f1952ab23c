#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kramers-Fokker-Planck propagator experiments"};
  app.require_subcommand(1);

  std::string config, out;
  std::vector<std::string> sets;
  const std::map<std::string, std::string> about = {
      {"kernel-eval", "time profiles and free kernel supremum per time"},
      {"decay-scan", "fit decay exponents of the free or perturbed flow"},
      {"spectral-check", "shifted Hermite eigen residuals and biorthogonality"},
      {"evolve", "propagate an initial field and log conserved quantities"},
      {"bootstrap", "iterate the decay-exponent bootstrap recursion"},
  };
  for (const std::string& name : kfp::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    std::string keys = "keys:";
    for (const auto& k : kfp::cli::schema_for(name)) keys += "\n  " + k.name + " (default '" + k.default_value + "'): " + k.help;
    sub->footer(keys);
    sub->add_option("--config", config, "key=value config file");
    sub->add_option("--out", out, "output CSV path (stdout when omitted)");
    sub->add_option("--set", sets, "override key=value")->allow_extra_args(false);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kfp::cli::kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return kfp::cli::run_cli(command, config, sets, out, std::cout, std::cerr);
}
