#ifndef CREQUIV_SUITES_HPP
#define CREQUIV_SUITES_HPP

#include "crequiv/report.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crequiv {

/// Invalid command line or unreadable input; maps to exit status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Json, Latex };

struct RunConfig {
  std::string command;
  OutputFormat format = OutputFormat::Json;
  bool trace = false;
  bool flat = false;
  /// Replaces the expected commutator table (verify-model) or the algebra
  /// the connection is checked against (cartan-check).
  std::optional<std::string> algebraPath;
  /// Replaces the Beloshapka surface in the tangency check.
  std::optional<std::string> surfacePath;
  /// Empty selects every check of the command.
  std::vector<std::string> checks;
  std::string goldensPath = defaultGoldensPath();
};

struct Report {
  std::string command;
  std::vector<CheckResult> results;
  /// Derived material: equations, invariant tables, certificates.
  Json artifacts = Json::object();
  std::vector<TraceRecord> trace;
  /// Display equations, in emission order.
  std::vector<std::pair<std::string, std::string>> latex;

  /// No selected check failed (derived-only counts as passing).
  bool passed() const;
};

/// {command, passed, results, artifacts, trace?}.
Json toJson(const Report& r);
std::string toLatex(const Report& r);

std::vector<std::string> commandNames();
/// Throws ConfigError for an unknown command.
const std::vector<std::string>& checkNames(const std::string& command);
/// Command, check names and input paths; runs before any computation.
void validateConfig(const RunConfig& cfg);

Report runVerifyModel(const RunConfig& cfg);
Report runDeriveSecondary(const RunConfig& cfg);
Report runReduce(const RunConfig& cfg);
Report runCartanCheck(const RunConfig& cfg);
/// Equations (1), (2), the invariant table and the flat equations, no checks.
Report runEmit(const RunConfig& cfg);

/// Validates and dispatches on cfg.command.
Report run(const RunConfig& cfg);

/// Sum over letters of the frame weight (L, Lbar: 1, T: 2, S, Sbar: 3) plus
/// the weight of the symbol itself, for every term; group factors are
/// ignored. A bracket function has the weight of the derivations it
/// relates.
std::vector<int> frameWeights(const ScalarExpr& x);

/// Exponents of a, abar and every other group parameter (differentials
/// counted as their parameter), one vector per term.
std::vector<std::vector<int>> groupDegrees(const FormExpr& x);

}  // namespace crequiv

#endif
