#include "crequiv/suites.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> splitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace crequiv;
  CLI::App app{"Cartan equivalence engine for Class III_1 CR manifolds"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format = "json";
  std::string checks;
  std::string algebra, surface;
  bool listChecks = false;

  for (const auto& name : commandNames()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--format", format, "json or latex")->check(CLI::IsMember({"json", "latex"}));
    sub->add_flag("--trace", cfg.trace, "one record per collected torsion monomial per stage");
    sub->add_flag("--flat", cfg.flat, "set every base symbol to zero");
    sub->add_option("--checks", checks, "comma-separated check names");
    sub->add_option("--goldens", cfg.goldensPath, "golden value file");
    sub->add_option("--algebra", algebra, "structure-constant table (JSON)");
    sub->add_option("--surface", surface, "model surface (JSON)");
    sub->add_flag("--list-checks", listChecks, "print the check names and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.format = format == "latex" ? OutputFormat::Latex : OutputFormat::Json;
  cfg.checks = splitList(checks);
  if (!algebra.empty()) cfg.algebraPath = algebra;
  if (!surface.empty()) cfg.surfacePath = surface;

  if (listChecks) {
    for (const auto& c : checkNames(cfg.command)) std::cout << c << "\n";
    return 0;
  }

  try {
    validateConfig(cfg);
    Report rep = run(cfg);
    if (cfg.format == OutputFormat::Json) {
      std::cout << toJson(rep).dump(2) << "\n";
    } else {
      std::cout << toLatex(rep);
      for (const auto& t : rep.trace) std::cerr << toJson(t).dump() << "\n";
    }
    return rep.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
