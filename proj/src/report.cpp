#include "crequiv/report.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#ifndef CREQUIV_GOLDENS_PATH
#define CREQUIV_GOLDENS_PATH "data/goldens.json"
#endif

namespace crequiv {

std::string statusName(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::DerivedOnly: return "derived-only";
  }
  return "fail";
}

Json toJson(const CheckResult& r) {
  Json j{{"check", r.check}, {"status", statusName(r.status)}, {"payload", r.payload}};
  if (r.goldenAnchor) j["golden_anchor"] = *r.goldenAnchor;
  if (r.diff) j["diff"] = *r.diff;
  return j;
}

Json toJson(const FormExpr& f) {
  Json terms = Json::array();
  for (const auto& [m, c] : f.terms()) {
    Json mono = Json::array();
    for (OneForm x : m.factors()) mono.push_back(x.name());
    terms.push_back({{"monomial", mono}, {"coeff", c.str()}});
  }
  return {{"degree", f.degree()}, {"terms", terms}};
}

FormExpr formFromJson(const Json& j) {
  FormExpr out(j.at("degree").get<int>());
  for (const auto& t : j.at("terms")) {
    std::vector<OneForm> fs;
    for (const auto& s : t.at("monomial")) fs.push_back(OneForm::named(s.get<std::string>()));
    int sign = 0;
    FormMonomial m = FormMonomial::sorted(fs, sign);
    if (sign != 0) out.add(m, ScalarExpr::parse(t.at("coeff").get<std::string>()).scaled(sign));
  }
  return out;
}

Goldens Goldens::parse(const std::string& text) {
  Goldens g;
  try {
    g.m_doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ReportError(std::string("goldens: ") + e.what());
  }
  if (!g.m_doc.contains("goldens") || !g.m_doc.at("goldens").is_object())
    throw ReportError("goldens: missing 'goldens' object");
  for (const auto& [id, v] : g.m_doc.at("goldens").items())
    if (!v.contains("anchor")) throw ReportError("goldens: entry " + id + " has no anchor");
  return g;
}

Goldens Goldens::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ReportError("cannot open goldens file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool Goldens::contains(const std::string& id) const { return m_doc.at("goldens").contains(id); }

const Json& Goldens::at(const std::string& id) const {
  if (!contains(id)) throw ReportError("no golden entry " + id);
  return m_doc.at("goldens").at(id);
}

std::string Goldens::anchor(const std::string& id) const { return at(id).at("anchor").get<std::string>(); }

ScalarExpr Goldens::scalar(const std::string& id, const std::string& key) const {
  return ScalarExpr::parse(at(id).at(key).get<std::string>());
}

FormExpr Goldens::oneForm(const std::string& id, const std::string& key) const {
  FormExpr out(1);
  for (const auto& [sym, c] : at(id).at(key).items())
    out += FormExpr(OneForm::named(sym), ScalarExpr::parse(c.get<std::string>()));
  return out;
}

LieAlgebra Goldens::algebra(const std::string& id) const {
  const Json& e = at(id);
  Json doc{{"labels", e.at("labels")}, {"brackets", e.at("brackets")}};
  return LieAlgebra::fromJson(doc.dump());
}

std::string defaultGoldensPath() { return CREQUIV_GOLDENS_PATH; }

Json toJson(const TraceRecord& t) {
  return {{"stage", t.stage}, {"form", t.form}, {"monomial", t.monomial}, {"coefficient", t.coefficient}};
}

std::string latexTwoForm(const std::string& lhs, const FormExpr& x, const std::vector<OneForm>& basis,
                         const std::function<ScalarExpr(OneForm, OneForm)>& weight) {
  auto monoLatex = [](const std::vector<OneForm>& fs) {
    std::string s;
    for (OneForm f : fs) s += (s.empty() ? "" : " \\wedge ") + f.latex();
    return s;
  };
  // Returns the signed term and whether it starts with a minus sign.
  auto term = [&](const ScalarExpr& c, const std::vector<OneForm>& fs) -> std::pair<std::string, bool> {
    const std::string mono = monoLatex(fs);
    if (auto v = c.constantValue()) {
      ScalarExpr abs = *v < Gaussian(0) ? -c : c;
      std::string s = abs.latex();
      return {(s == "1" ? "" : s + " ") + mono, *v < Gaussian(0)};
    }
    if (weight && fs.size() == 2) {
      ScalarExpr w = weight(fs[0], fs[1]);
      ScalarExpr q = c * w.inverse();
      if (!q.hasGroup()) {
        std::string ws = w == ScalarExpr(1) ? "" : w.latex() + " ";
        std::string qs = q.size() > 1 ? "\\left(" + q.latex() + "\\right)" : q.latex();
        return {ws + qs + " " + mono, false};
      }
    }
    std::string s = c.size() > 1 ? "\\left(" + c.latex() + "\\right)" : c.latex();
    return {s + " " + mono, false};
  };
  std::ostringstream os;
  os << "\\begin{aligned} " << lhs << " = {} & ";
  bool first = true;
  auto put = [&](const std::pair<std::string, bool>& t, bool newLine) {
    if (first) os << (t.second ? "-" : "");
    else os << (newLine ? " \\\\ & " : " ") << (t.second ? "- " : "+ ");
    os << t.first;
    first = false;
  };
  auto inLayout = [&](OneForm f) { return std::find(basis.begin(), basis.end(), f) != basis.end(); };
  for (const auto& [m, c] : x.terms()) {
    auto fs = m.factors();
    if (std::all_of(fs.begin(), fs.end(), inLayout)) continue;
    put(term(c, fs), false);
  }
  for (std::size_t row = 0; row + 1 < basis.size(); ++row) {
    bool rowStart = true;
    for (std::size_t col = row + 1; col < basis.size(); ++col) {
      ScalarExpr c = x.coefficient({basis[row], basis[col]});
      if (c.isZero()) continue;
      put(term(c, {basis[row], basis[col]}), rowStart && !first);
      rowStart = false;
    }
  }
  if (first) os << "0";
  os << " \\end{aligned}";
  return os.str();
}

std::string latexReport(const std::vector<CheckResult>& results) {
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '_' || c == '&' || c == '%' || c == '#') out += '\\';
      out += c;
    }
    return out;
  };
  std::ostringstream os;
  os << "\\begin{tabular}{lll}\n\\hline\ncheck & status & anchor \\\\\n\\hline\n";
  for (const auto& r : results)
    os << "\\texttt{" << escape(r.check) << "} & " << statusName(r.status) << " & "
       << (r.goldenAnchor ? "\\verb|" + *r.goldenAnchor + "|" : std::string("--")) << " \\\\\n";
  os << "\\hline\n\\end{tabular}\n";
  return os.str();
}

}  // namespace crequiv
