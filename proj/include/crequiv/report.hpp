#ifndef CREQUIV_REPORT_HPP
#define CREQUIV_REPORT_HPP

#include "crequiv/exterior.hpp"
#include "crequiv/liealg.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crequiv {

using Json = nlohmann::json;

struct ReportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Status { Pass, Fail, DerivedOnly };

std::string statusName(Status s);

/// Outcome of one named check.
struct CheckResult {
  std::string check;
  Status status = Status::Fail;
  Json payload = Json::object();
  std::optional<std::string> goldenAnchor;
  std::optional<std::string> diff;
};

/// {check, status, payload, golden_anchor?, diff?}.
Json toJson(const CheckResult& r);

/// {degree, terms: [{monomial: [symbol...], coeff: canonical-string}]}.
Json toJson(const FormExpr& f);

/// Inverse of toJson(FormExpr); symbols must be registered.
FormExpr formFromJson(const Json& j);

/// Golden values with their anchor quotes, loaded from a JSON document of
/// the form {version, goldens: {id: {anchor, ...}}}.
class Goldens {
public:
  static Goldens load(const std::string& path);
  static Goldens parse(const std::string& text);

  bool contains(const std::string& id) const;
  /// Throws ReportError for a missing id.
  const Json& at(const std::string& id) const;
  std::string anchor(const std::string& id) const;
  /// Parses at(id)[key] as a scalar expression.
  ScalarExpr scalar(const std::string& id, const std::string& key = "value") const;
  /// Parses a {symbol: coefficient} object as a 1-form.
  FormExpr oneForm(const std::string& id, const std::string& key = "terms") const;
  /// Loads a structure-constant table stored under id.
  LieAlgebra algebra(const std::string& id) const;

private:
  Json m_doc;
};

/// Path compiled in at build time (data/goldens.json of the source tree).
std::string defaultGoldensPath();

/// One trace record: {stage, form, monomial, coefficient}.
struct TraceRecord {
  std::string stage;
  std::string form;
  std::vector<std::string> monomial;
  std::string coefficient;
};

Json toJson(const TraceRecord& t);

/// d(form) in the fixed 10-monomial triangular layout over `basis`
/// (4 + 3 + 2 + 1 rows), terms outside that layout first. With `weight`,
/// a coefficient is printed as weight times a group-free factor when it
/// splits that way.
std::string latexTwoForm(const std::string& lhs, const FormExpr& x, const std::vector<OneForm>& basis,
                         const std::function<ScalarExpr(OneForm, OneForm)>& weight = {});

/// LaTeX table of check results.
std::string latexReport(const std::vector<CheckResult>& results);

}  // namespace crequiv

#endif
