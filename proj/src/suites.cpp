#include "crequiv/suites.hpp"

#include "crequiv/cartan.hpp"
#include "crequiv/liealg.hpp"
#include "crequiv/reduce.hpp"
#include "crequiv/vecfield.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <future>
#include <set>
#include <sstream>

namespace crequiv {

namespace {

using CheckFn = std::function<CheckResult()>;
using Registry = std::vector<std::pair<std::string, CheckFn>>;

const std::map<std::string, std::vector<std::string>>& registry() {
  static const std::map<std::string, std::vector<std::string>> names = {
      {"verify-model",
       {"model.frame", "model.rank", "model.tangency", "model.commutators", "model.isotropy", "model.n54-iso",
        "jacobi.n54", "jacobi.g7", "jacobi.commutators", "g7.printed", "model.mc-duality"}},
      {"derive-secondary",
       {"secondary.E", "secondary.F", "secondary.G", "secondary.JK", "secondary.J-real", "secondary.d2",
        "secondary.frame-relations", "rewrite.confluence"}},
      {"reduce",
       {"reduce.group",         "reduce.ginv",       "reduce.mc-pattern",  "reduce.alpha1",
        "reduce.alpha2",        "reduce.reconstruction", "reduce.X2",      "reduce.X3",
        "reduce.X4",            "reduce.X6",         "reduce.X7",          "reduce.Ybar8",
        "reduce.essential",     "reduce.norm-b",     "reduce.norm-c",      "reduce.norm-d",
        "reduce.norm-e",        "reduce.norm-annihilate", "reduce.loop2-zero", "reduce.beta1",
        "reduce.beta2",         "reduce.Y4",         "reduce.loop2-third", "final.equations",
        "final.conjugation",    "final.weights",     "final.invariants",   "final.dlambda",
        "final.flat"}},
      {"cartan-check",
       {"cartan.i", "cartan.ii", "cartan.iii.alpha", "cartan.iii.alphabar", "cartan.interior",
        "cartan.rho-reality", "cartan.flat-curvature"}},
      {"emit", {}},
  };
  return names;
}

std::string readFile(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + what + " " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Goldens loadGoldens(const RunConfig& cfg) {
  try {
    return Goldens::load(cfg.goldensPath);
  } catch (const ReportError& e) {
    throw ConfigError(e.what());
  }
}

LieAlgebra loadAlgebra(const std::string& path) {
  try {
    return LieAlgebra::fromJson(readFile(path, "algebra"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("algebra " + path + ": " + e.what());
  }
}

ModelSurface loadSurface(const std::string& path) {
  try {
    return ModelSurface::fromJson(readFile(path, "surface"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("surface " + path + ": " + e.what());
  }
}

/// Runs the selected checks concurrently and assembles them in registry order.
std::vector<CheckResult> runChecks(const Registry& all, const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::future<CheckResult>>> jobs;
  for (const auto& [name, fn] : all) {
    if (!cfg.checks.empty() && std::find(cfg.checks.begin(), cfg.checks.end(), name) == cfg.checks.end()) continue;
    jobs.emplace_back(name, std::async(std::launch::async, fn));
  }
  std::vector<CheckResult> out;
  for (auto& [name, job] : jobs) {
    try {
      out.push_back(job.get());
    } catch (const std::exception& e) {
      CheckResult r{name, Status::Fail};
      r.payload["error"] = e.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

CheckResult result(const std::string& name, bool ok, Json payload = Json::object()) {
  return {name, ok ? Status::Pass : Status::Fail, std::move(payload), std::nullopt, std::nullopt};
}

/// Result compared with a golden entry: status, anchor and diff.
CheckResult golden(const std::string& name, const Goldens& g, const std::string& id, bool ok, Json payload,
                   const std::string& diff = {}) {
  CheckResult r = result(name, ok, std::move(payload));
  r.goldenAnchor = g.anchor(id);
  if (!diff.empty()) r.diff = diff;
  return r;
}

CheckResult compareScalar(const std::string& name, const Goldens& g, const std::string& id, const ScalarExpr& computed,
                          const std::string& key = "value") {
  ScalarExpr expected = g.scalar(id, key);
  bool ok = computed == expected;
  return golden(name, g, id, ok, {{"computed", computed.str()}, {"expected", expected.str()}},
                ok ? "" : "computed - expected = " + (computed - expected).str());
}

CheckResult compareForm(const std::string& name, const Goldens& g, const std::string& id, const FormExpr& computed,
                        const std::string& key = "terms") {
  FormExpr expected = g.oneForm(id, key);
  bool ok = computed == expected;
  return golden(name, g, id, ok, {{"computed", toJson(computed)}, {"expected", toJson(expected)}},
                ok ? "" : "computed - expected = " + (computed - expected).str());
}

/// "2*alpha1 + alphabar1 - I*beta2": constant coefficients only.
FormExpr parseLinearForm(const std::string& text) {
  FormExpr out(1);
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  if (s == "0") return out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = pos + 1;
    int depth = 0;
    while (end < s.size() && !(depth == 0 && (s[end] == '+' || s[end] == '-'))) {
      if (s[end] == '(') ++depth;
      if (s[end] == ')') --depth;
      ++end;
    }
    std::string term = s.substr(pos, end - pos);
    bool neg = term[0] == '-';
    if (term[0] == '+' || term[0] == '-') term = term.substr(1);
    std::size_t star = term.rfind('*');
    std::string coeff = star == std::string::npos ? "1" : term.substr(0, star);
    std::string sym = star == std::string::npos ? term : term.substr(star + 1);
    ScalarExpr c = ScalarExpr::parse(coeff);
    out += FormExpr(OneForm::named(sym), neg ? -c : c);
    pos = end;
  }
  return out;
}

std::string bracketStr(const LieAlgebra& l, std::size_t i, std::size_t j) {
  return "[" + l.labels()[i] + ", " + l.labels()[j] + "]";
}

Json bracketList(const LieAlgebra& l) {
  Json out = Json::array();
  for (std::size_t i = 0; i < l.dim(); ++i)
    for (std::size_t j = i + 1; j < l.dim(); ++j) {
      LieElement b = l.bracket(i, j);
      if (std::all_of(b.begin(), b.end(), [](const Gaussian& c) { return c.isZero(); })) continue;
      out.push_back(bracketStr(l, i, j) + " = " + l.elementStr(b));
    }
  return out;
}

CheckResult jacobiCheck(const std::string& name, const LieAlgebra& l) {
  Json viol = Json::array();
  for (const auto& v : l.jacobiResidual())
    viol.push_back({{"triple", {l.labels()[v.i], l.labels()[v.j], l.labels()[v.k]}},
                    {"residual", l.elementStr(v.residual)}});
  bool ok = viol.empty();
  return result(name, ok, {{"dim", l.dim()}, {"triples", l.dim() * (l.dim() - 1) * (l.dim() - 2) / 6}, {"violations", viol}});
}

/// Maurer-Cartan rules read from a golden {form: {"x^y": coeff}} object,
/// completed by conjugation.
StructureRules goldenRules(const Json& eqs) {
  StructureRules out;
  for (const auto& [name, terms] : eqs.items()) {
    FormExpr d(2);
    for (const auto& [mono, c] : terms.items()) {
      auto hat = mono.find('^');
      d += FormExpr::monomial({OneForm::named(mono.substr(0, hat)), OneForm::named(mono.substr(hat + 1))},
                              ScalarExpr::parse(c.get<std::string>()));
    }
    OneForm f = OneForm::named(name);
    out[f] = d;
    if (!out.contains(f.conj())) out[f.conj()] = conjugate(d);
  }
  return out;
}

std::string rulesDiff(const StructureRules& computed, const StructureRules& expected) {
  std::string diff;
  std::set<OneForm> keys;
  for (const auto& [k, v] : computed) keys.insert(k);
  for (const auto& [k, v] : expected) keys.insert(k);
  for (OneForm k : keys) {
    FormExpr c = computed.contains(k) ? computed.at(k) : FormExpr(2);
    FormExpr e = expected.contains(k) ? expected.at(k) : FormExpr(2);
    if (!(c == e)) diff += (diff.empty() ? "" : "; ") + ("d" + k.name() + ": computed - expected = " + (c - e).str());
  }
  return diff;
}

Json rulesJson(const StructureRules& rules) {
  Json out = Json::object();
  for (const auto& [k, v] : rules) out[k.name()] = toJson(v);
  return out;
}

/// Declares the dual forms of the 7-dimensional algebra once, before any
/// concurrent work, so that their wedge order is fixed.
void declareAlgebraForms() {
  const auto n = algebraFormNames();
  OneForm::declare(n[0], Generation::Custom, n[1], "\\overline{\\omega}_{\\alpha}");
  OneForm::declare(n[1], Generation::Custom, n[0], "\\omega_{\\alpha}");
  OneForm::declare(n[2], Generation::Custom, n[3], "\\overline{\\omega}_{\\sigma}");
  OneForm::declare(n[3], Generation::Custom, n[2], "\\omega_{\\sigma}");
  OneForm::declare(n[4], Generation::Custom, n[4], "\\omega_{\\rho}");
  OneForm::declare(n[5], Generation::Custom, n[6], "\\overline{\\omega}_{\\zeta}");
  OneForm::declare(n[6], Generation::Custom, n[5], "\\omega_{\\zeta}");
  mcEquations(g7(), n);
}

}  // namespace

std::vector<int> frameWeights(const ScalarExpr& x) {
  auto letterWeight = [](Letter l) {
    switch (l) {
      case Letter::L:
      case Letter::Lbar: return 1;
      case Letter::T: return 2;
      default: return 3;
    }
  };
  auto symbolWeight = [](BaseName n) {
    switch (n) {
      case BaseName::B:
      case BaseName::Q:
      case BaseName::R:
      case BaseName::B0:
      case BaseName::C0: return 1;
      case BaseName::A:
      case BaseName::P:
      case BaseName::F:
      case BaseName::G:
      case BaseName::D0:
      case BaseName::E0: return 2;
      case BaseName::E:
      case BaseName::K: return 3;
      case BaseName::J: return 4;
    }
    return 0;
  };
  std::vector<int> out;
  for (const auto& t : x.terms()) {
    int w = 0;
    for (const auto& f : t.mono.factors()) {
      if (f.atom.isGroup()) continue;
      int a = symbolWeight(f.atom.baseName());
      for (Letter l : f.atom.word()) a += letterWeight(l);
      w += a * f.exp;
    }
    out.push_back(w);
  }
  return out;
}

std::vector<std::vector<int>> groupDegrees(const FormExpr& x) {
  std::vector<std::vector<int>> out;
  for (const auto& [m, c] : x.terms()) {
    std::vector<int> diff(10, 0);
    for (OneForm f : m.factors())
      for (int g = 0; g < 5; ++g)
        for (bool bar : {false, true})
          if (f == groupDifferential(static_cast<GroupName>(g), bar)) ++diff[g + (bar ? 5 : 0)];
    for (const auto& t : c.terms()) {
      std::vector<int> deg = diff;
      for (const auto& f : t.mono.factors())
        if (f.atom.isGroup()) deg[static_cast<int>(f.atom.groupName()) + (f.atom.conj() ? 5 : 0)] += f.exp;
      out.push_back(std::move(deg));
    }
  }
  return out;
}

bool Report::passed() const {
  return std::none_of(results.begin(), results.end(), [](const CheckResult& r) { return r.status == Status::Fail; });
}

Json toJson(const Report& r) {
  Json results = Json::array();
  for (const auto& c : r.results) results.push_back(toJson(c));
  Json out{{"command", r.command}, {"passed", r.passed()}, {"results", results}, {"artifacts", r.artifacts}};
  if (!r.trace.empty()) {
    Json t = Json::array();
    for (const auto& rec : r.trace) t.push_back(toJson(rec));
    out["trace"] = t;
  }
  return out;
}

std::string toLatex(const Report& r) {
  std::ostringstream os;
  os << "% " << r.command << "\n";
  if (!r.results.empty()) os << latexReport(r.results);
  for (const auto& [label, eq] : r.latex) os << "% " << label << "\n\\[\n" << eq << "\n\\]\n";
  return os.str();
}

std::vector<std::string> commandNames() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

const std::vector<std::string>& checkNames(const std::string& command) {
  auto it = registry().find(command);
  if (it == registry().end()) throw ConfigError("unknown command " + command);
  return it->second;
}

void validateConfig(const RunConfig& cfg) {
  const auto& names = checkNames(cfg.command);
  for (const auto& c : cfg.checks)
    if (std::find(names.begin(), names.end(), c) == names.end())
      throw ConfigError("unknown check " + c + " for command " + cfg.command);
  loadGoldens(cfg);
  if (cfg.algebraPath) loadAlgebra(*cfg.algebraPath);
  if (cfg.surfacePath) loadSurface(*cfg.surfacePath);
}

// ---------------------------------------------------------------------------
// verify-model

Report runVerifyModel(const RunConfig& cfg) {
  const Goldens g = loadGoldens(cfg);
  declareAlgebraForms();
  const auto fields = automorphismFields();
  const LieAlgebra expected = cfg.algebraPath ? loadAlgebra(*cfg.algebraPath) : g.algebra("model.commutators");
  const ModelSurface surface = cfg.surfacePath ? loadSurface(*cfg.surfacePath) : ModelSurface::beloshapka();
  const LieAlgebra table = commutatorTable(fields);

  Registry checks;
  checks.emplace_back("model.frame", [&] {
    const Json& e = g.at("model.frame");
    const Chart real = Chart::real();
    if (e.at("chart").get<std::vector<std::string>>() != real.vars) throw ReportError("golden frame uses another chart");
    Json payload = Json::object();
    std::string diff;
    bool ok = true;
    for (const auto& [label, field] : adaptedFrame()) {
      auto comps = e.at("fields").at(label).get<std::map<std::string, std::string>>();
      PolyVectorField want = PolyVectorField::parse(real, comps);
      payload[label] = field.str();
      if (!(field == want)) {
        ok = false;
        diff += label + ": computed " + field.str() + ", printed " + want.str() + "; ";
      }
    }
    return golden("model.frame", g, "model.frame", ok, payload, diff);
  });
  checks.emplace_back("model.rank", [&] {
    std::vector<PolyVectorField> fs;
    for (const auto& [l, f] : adaptedFrame()) fs.push_back(f);
    const Gaussian i = Gaussian::i();
    const std::vector<std::vector<Gaussian>> points = {
        {0, 0, 0, 0, 0},
        {1, 1, 0, 0, 0},
        {i, -i, 1, 0, 0},
        {1 + i, 1 - i, 0, 2, -1},
        {2, 2, 3, -1, 5},
        {Gaussian(-1) + Gaussian(2) * i, Gaussian(-1) - Gaussian(2) * i, Gaussian::rational(1, 2), 0, 7},
    };
    Json pts = Json::array();
    bool ok = true;
    for (const auto& p : points) {
      std::size_t r = rankAtPoint(fs, p);
      Json coords = Json::array();
      for (const auto& c : p) coords.push_back(c.str());
      pts.push_back({{"point", coords}, {"rank", r}});
      ok = ok && r == 5;
    }
    return result("model.rank", ok, {{"chart", Chart::real().vars}, {"points", pts}});
  });
  checks.emplace_back("model.tangency", [&] {
    Json per = Json::object();
    bool ok = true;
    for (const auto& [label, f] : fields) {
      auto res = tangencyResidues(f, surface);
      Json r = Json::array();
      for (const auto& p : res)
        if (!p.isZero()) r.push_back(p.str({"z", "zb", "u1", "u2", "u3"}));
      per[label] = r.empty() ? Json("tangent") : Json{{"residues", r}};
      ok = ok && r.empty();
    }
    return result("model.tangency", ok, {{"surface", cfg.surfacePath ? *cfg.surfacePath : "beloshapka"}, {"fields", per}});
  });
  checks.emplace_back("model.commutators", [&] {
    if (expected.labels() != table.labels()) {
      CheckResult r = result("model.commutators", false, {{"error", "label mismatch"}, {"computed", table.labels()}});
      r.goldenAnchor = g.anchor("model.commutators");
      return r;
    }
    Json mismatches = Json::array();
    std::size_t compared = 0;
    for (std::size_t i = 0; i < table.dim(); ++i)
      for (std::size_t j = i + 1; j < table.dim(); ++j, ++compared)
        for (std::size_t k = 0; k < table.dim(); ++k)
          if (table.constant(i, j, k) != expected.constant(i, j, k))
            mismatches.push_back({{"triple", {table.labels()[i], table.labels()[j], table.labels()[k]}},
                                  {"computed", table.constant(i, j, k).str()},
                                  {"expected", expected.constant(i, j, k).str()}});
    std::string diff;
    for (const auto& m : mismatches)
      diff += "coefficient of " + m["triple"][2].get<std::string>() + " in [" + m["triple"][0].get<std::string>() +
              ", " + m["triple"][1].get<std::string>() + "]: computed " + m["computed"].get<std::string>() +
              ", expected " + m["expected"].get<std::string>() + "; ";
    bool ok = mismatches.empty();
    return golden("model.commutators", g, "model.commutators", ok,
                  {{"entries", compared}, {"table", bracketList(table)}, {"mismatches", mismatches},
                   {"source", cfg.algebraPath ? *cfg.algebraPath : "goldens"}},
                  diff);
  });
  checks.emplace_back("model.isotropy", [&] {
    std::vector<std::string> vanishing;
    for (const auto& [label, f] : fields) {
      auto v = f.at(std::vector<Gaussian>(f.chart().vars.size()));
      if (std::all_of(v.begin(), v.end(), [](const Gaussian& c) { return c.isZero(); })) vanishing.push_back(label);
    }
    auto want = g.at("model.isotropy").at("generators").get<std::vector<std::string>>();
    bool ok = vanishing == want;
    return golden("model.isotropy", g, "model.isotropy", ok, {{"vanishing_at_origin", vanishing}},
                  ok ? "" : "expected the generators {D, R}");
  });
  checks.emplace_back("model.n54-iso", [&] {
    auto iso = g.at("model.isotropy").at("generators").get<std::vector<std::string>>();
    std::vector<std::size_t> span;
    for (std::size_t i = 0; i < table.dim(); ++i)
      if (std::find(iso.begin(), iso.end(), table.labels()[i]) == iso.end()) span.push_back(i);
    LieAlgebra sub = table.subalgebra(span);
    LieAlgebra n = g.algebra("model.n54");
    auto w = checkNilpotentIso(sub, n);
    Json witness = Json::object();
    if (w)
      for (std::size_t i = 0; i < n.dim(); ++i)
        witness[n.labels()[i]] = w->scale[i].str() + "*" + sub.labels()[w->image[i]];
    return golden("model.n54-iso", g, "model.n54", w.has_value(), {{"span", sub.labels()}, {"witness", witness}});
  });
  checks.emplace_back("jacobi.n54", [&] {
    CheckResult r = jacobiCheck("jacobi.n54", g.algebra("model.n54"));
    r.goldenAnchor = g.anchor("model.n54");
    return r;
  });
  checks.emplace_back("jacobi.g7", [&] { return jacobiCheck("jacobi.g7", g7()); });
  checks.emplace_back("jacobi.commutators", [&] {
    CheckResult computed = jacobiCheck("jacobi.commutators", table);
    CheckResult input = jacobiCheck("jacobi.commutators", expected);
    CheckResult r = result("jacobi.commutators", computed.status == Status::Pass && input.status == Status::Pass,
                           {{"computed", computed.payload}, {"expected", input.payload}});
    return r;
  });
  checks.emplace_back("g7.printed", [&] {
    const Json& e = g.at("g7.printed");
    LieAlgebra printed = g.algebra("g7.printed");
    LieAlgebra derived = g7();
    Json payload{{"derived", bracketList(derived)}, {"printed", bracketList(printed)}};
    if (printed.labels() == derived.labels() && bracketList(printed) == bracketList(derived))
      return golden("g7.printed", g, "g7.printed", true, payload);
    // The print is accepted as flagged only if it is provably inconsistent
    // (Jacobi fails) and the intended reading reproduces the derived table.
    auto viol = printed.jacobiResidual();
    Json intendedBrackets = e.at("brackets");
    Json notes = Json::array();
    for (const auto& fix : e.value("intended", Json::array())) {
      intendedBrackets[fix.at("index").get<std::size_t>()] = fix.at("bracket");
      notes.push_back(fix.at("note"));
    }
    LieAlgebra intended = LieAlgebra::fromJson(Json{{"labels", e.at("labels")}, {"brackets", intendedBrackets}}.dump());
    bool intendedMatches = bracketList(intended) == bracketList(derived);
    Json jv = Json::array();
    for (const auto& v : viol)
      jv.push_back({{"triple", {printed.labels()[v.i], printed.labels()[v.j], printed.labels()[v.k]}},
                    {"residual", printed.elementStr(v.residual)}});
    payload["printed_jacobi_violations"] = jv;
    payload["intended_matches_derived"] = intendedMatches;
    payload["notes"] = notes;
    std::string diff = "printed table violates Jacobi in " + std::to_string(viol.size()) +
                       " triples; derived table differs from the print in:";
    for (std::size_t i = 0; i < derived.dim(); ++i)
      for (std::size_t j = i + 1; j < derived.dim(); ++j)
        if (derived.bracket(i, j) != printed.bracket(i, j))
          diff += " " + bracketStr(derived, i, j) + " derived " + derived.elementStr(derived.bracket(i, j)) +
                  ", printed " + printed.elementStr(printed.bracket(i, j)) + ";";
    return golden("g7.printed", g, "g7.printed", !viol.empty() && intendedMatches, payload, diff);
  });
  checks.emplace_back("model.mc-duality", [&] {
    StructureRules mc = mcEquations(g7(), algebraFormNames());
    StructureRules want = goldenRules(g.at("flat.equations").at("equations"));
    std::string diff = rulesDiff(mc, want);
    return golden("model.mc-duality", g, "flat.equations", diff.empty(), {{"equations", rulesJson(mc)}}, diff);
  });

  Report rep{"verify-model"};
  rep.results = runChecks(checks, cfg);
  rep.artifacts["commutators"] = bracketList(table);
  return rep;
}

// ---------------------------------------------------------------------------
// derive-secondary

namespace {

Json confluenceAudit() {
  std::vector<Word> words = {{}};
  std::size_t start = 0;
  for (int len = 1; len <= 4; ++len) {
    std::size_t end = words.size();
    for (std::size_t w = start; w < end; ++w)
      for (Letter l : kLetters) {
        Word x = words[w];
        x.push_back(l);
        words.push_back(std::move(x));
      }
    start = end;
  }
  std::size_t checked = 0;
  Json failures = Json::array();
  for (const auto& w : words) {
    if (w.size() < 2) continue;
    ++checked;
    ScalarExpr r0 = reorderDerivations(w, BaseName::B);
    ScalarExpr r1 = applyOperator(normalOrder(w, RewriteStrategy::LeftmostInversion), BaseName::B);
    ScalarExpr r2 = applyOperator(normalOrder(w, RewriteStrategy::RightmostInversion), BaseName::B);
    if (r0 == r1 && r0 == r2) continue;
    std::string ws;
    for (Letter l : w) ws += std::string(letterName(l)) + " ";
    ws.pop_back();
    failures.push_back({{"word", ws}, {"leftmost_minus_rightmost", (r1 - r2).str()}});
  }
  return {{"words", checked}, {"symbol", "B"}, {"failures", failures.size()}, {"first_failures", [&] {
             Json f = Json::array();
             for (std::size_t i = 0; i < failures.size() && i < 5; ++i) f.push_back(failures[i]);
             return f;
           }()}};
}

}  // namespace

Report runDeriveSecondary(const RunConfig& cfg) {
  const Goldens g = loadGoldens(cfg);
  const StructureRules rules = initialDarboux();
  const SecondaryBrackets sb = deriveSecondaryBrackets(rules);

  Registry checks;
  for (auto [name, sym] : {std::pair{"E", BaseName::E}, {"F", BaseName::F}, {"G", BaseName::G}}) {
    std::string check = std::string("secondary.") + name;
    BaseName s = sym;
    checks.emplace_back(check, [&, check, s] { return compareScalar(check, g, check, sb.table.at(s)); });
  }
  checks.emplace_back("secondary.JK", [&] {
    Json rel = Json::object();
    for (const auto& [atom, v] : sb.derivativeRelations) rel[atom.str()] = v.str();
    CheckResult r{"secondary.JK", Status::DerivedOnly,
                  {{"J", sb.table.at(BaseName::J).str()}, {"K", sb.table.at(BaseName::K).str()},
                   {"derivative_relations", rel}}};
    return r;
  });
  checks.emplace_back("secondary.J-real", [&] {
    const ScalarExpr& j = sb.table.at(BaseName::J);
    ScalarExpr raw = j - conjugate(j);
    ScalarExpr reduced = reduceModRelations(raw, sb);
    return result("secondary.J-real", reduced.isZero(),
                  {{"raw_difference_terms", raw.size()},
                   {"modulo", "derived T-derivative relations"},
                   {"reduced_difference", reduced.str()}});
  });
  checks.emplace_back("secondary.d2", [&] {
    auto raw = checkD2(rules, sb.table);
    Json residual = Json::array();
    for (const auto& [comp, v] : sb.residualRelations)
      residual.push_back({{"component", comp}, {"terms", v.size()}, {"value", v.str()}});
    return result("secondary.d2", sb.residualRelations.empty(),
                  {{"forms_with_nonzero_d2_before_relations", raw.size()},
                   {"residual_components_modulo_relations", residual}});
  });
  checks.emplace_back("secondary.frame-relations", [&] {
    auto missing = missingFrameRelations();
    Json m = Json::array();
    for (auto [x, y] : missing) m.push_back(std::string(letterName(x)) + "," + std::string(letterName(y)));
    return result("secondary.frame-relations", missing.empty(), {{"missing", m}});
  });
  checks.emplace_back("rewrite.confluence", [&] {
    Json audit = confluenceAudit();
    return result("rewrite.confluence", audit["failures"].get<std::size_t>() == 0, audit);
  });

  Report rep{"derive-secondary"};
  rep.results = runChecks(checks, cfg);
  for (auto n : kSecondaryBase) {
    std::string name(1, "ABPQREFGJK"[static_cast<int>(n)]);
    rep.artifacts["secondary"][name] = sb.table.at(n).str();
    rep.latex.emplace_back(name, name + " = " + sb.table.at(n).latex());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// reduce and emit

namespace {

struct FinalViews {
  StructureRules equations;  // full, or flattened and renamed
  FormExpr dlambda;
};

std::vector<OneForm> sevenForms() {
  OneForm l = OneForm::named("lambda");
  std::vector<OneForm> out = {l.conj(), l};
  for (OneForm f : liftedCoframe()) out.push_back(f);
  return out;
}

/// Adds equations (1), (2), the invariant table and their LaTeX displays.
void emitFinal(Report& rep, const ReductionResult& r, bool flat) {
  const Coframe cf = liftedCoframe();
  const std::vector<OneForm> lifted(cf.begin(), cf.end());
  if (flat) {
    ConnectionForm w = buildConnection(r, true);
    auto names = algebraFormNames();
    StructureRules renamed = renameToAlgebra(w.equations, w, names);
    rep.artifacts["equations"] = rulesJson(renamed);
    std::vector<OneForm> basis;
    for (std::size_t k = 2; k < names.size(); ++k) basis.push_back(OneForm::named(names[k]));
    for (const auto& n : names) {
      OneForm f = OneForm::named(n);
      rep.latex.emplace_back("d" + n, latexTwoForm("d" + f.latex(), renamed.at(f), basis));
    }
    return;
  }
  rep.artifacts["equations"] = rulesJson(r.final.rules);
  rep.artifacts["lambda"] = toJson(r.final.lambda);
  Json inv = Json::array();
  for (const auto& e : r.final.invariants)
    inv.push_back({{"name", e.name},
                   {"form", e.form.name()},
                   {"monomial", {e.x.name(), e.y.name()}},
                   {"weight", e.weight.str()},
                   {"invariant", e.reduced.str()},
                   {"group_free", e.groupFree}});
  rep.artifacts["invariants"] = inv;
  for (OneForm f : {cf[1], cf[2], cf[4], OneForm::named("lambda")})
    rep.latex.emplace_back("d" + f.name(), latexTwoForm("d" + f.latex(), r.final.rules.at(f), lifted,
                                                        [f](OneForm x, OneForm y) { return aWeight(f, x, y); }));
  std::string table = "\\begin{array}{lll}\n";
  for (const auto& e : r.final.invariants)
    table += "d" + e.form.latex() + " & " + e.x.latex() + " \\wedge " + e.y.latex() + " & " + e.weight.latex() +
             " \\\\\n";
  table += "\\end{array}";
  rep.latex.emplace_back("invariant weights", table);
}

void traceStage(Report& rep, const std::string& stage, const std::vector<TorsionReport>& reports) {
  for (const auto& t : reports)
    for (const auto& [m, c] : t.torsion.terms()) {
      std::vector<std::string> mono;
      for (OneForm f : m.factors()) mono.push_back(f.name());
      rep.trace.push_back({stage, t.form.name(), mono, c.str()});
    }
}

bool sameDegrees(const std::vector<std::vector<int>>& d) {
  return std::all_of(d.begin(), d.end(), [&](const auto& x) { return x == d.front(); });
}

/// Lifted-coframe conjugation: sigmabar <-> sigma, rho fixed, zetabar <-> zeta.
constexpr std::size_t kConjIndex[5] = {1, 0, 2, 4, 3};

const Json kEmpty = Json::array();

ScalarMatrix parseMatrix(const Json& rows) {
  ScalarMatrix m;
  for (const auto& row : rows) {
    std::vector<ScalarExpr> r;
    for (const auto& e : row) r.push_back(ScalarExpr::parse(e.get<std::string>()));
    m.push_back(std::move(r));
  }
  return m;
}

bool isIdentity(const ScalarMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (!(m[i][j] == ScalarExpr(i == j ? 1 : 0))) return false;
  return true;
}

}  // namespace

Report runReduce(const RunConfig& cfg) {
  const Goldens g = loadGoldens(cfg);
  declareAlgebraForms();
  Report rep{"reduce"};
  ReductionResult r;
  try {
    r = runReduction();
  } catch (const ReduceError& e) {
    for (const auto& name : cfg.checks.empty() ? checkNames("reduce") : cfg.checks) {
      CheckResult c{name, Status::Fail};
      c.payload["error"] = std::string("reduction aborted: ") + e.what();
      rep.results.push_back(std::move(c));
    }
    return rep;
  }
  const Coframe lifted = liftedCoframe();
  const ScalarExpr a = ScalarExpr::group(GroupName::a), ab = ScalarExpr::group(GroupName::a, true);

  Registry checks;
  checks.emplace_back("reduce.group", [&] {
    const Json& e = g.at("reduce.group");
    ScalarMatrix printed = parseMatrix(e.at("rows"));
    Json mism = Json::array();
    bool ok = true;
    std::string diff;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        if (printed[i][j] == r.g[i][j]) continue;
        // Accept only a flagged entry whose print breaks the conjugation
        // symmetry of the lifted coframe and whose intended value matches.
        const Json* fix = nullptr;
        for (const auto& f : e.contains("intended") ? e.at("intended") : kEmpty)
          if (f.at("row") == i && f.at("col") == j) fix = &f;
        bool broken = !(printed[i][j] == conjugate(printed[kConjIndex[i]][kConjIndex[j]]));
        bool intended = fix && ScalarExpr::parse(fix->at("value").get<std::string>()) == r.g[i][j];
        ok = ok && broken && intended;
        mism.push_back({{"row", i}, {"col", j}, {"printed", printed[i][j].str()}, {"computed", r.g[i][j].str()},
                        {"print_breaks_conjugation_symmetry", broken}, {"matches_intended", intended},
                        {"note", fix ? fix->at("note") : Json()}});
        diff += "(" + std::to_string(i) + "," + std::to_string(j) + ") printed " + printed[i][j].str() +
                ", computed " + r.g[i][j].str() + "; ";
      }
    return golden("reduce.group", g, "reduce.group", ok, {{"entries", 25}, {"mismatches", mism}}, diff);
  });
  checks.emplace_back("reduce.ginv", [&] {
    const Json& e = g.at("reduce.ginv");
    ScalarMatrix printed = parseMatrix(e.at("rows"));
    ScalarMatrix patched = printed;
    for (const auto& f : e.value("intended", Json::array()))
      patched[f.at("row").get<std::size_t>()][f.at("col").get<std::size_t>()] =
          ScalarExpr::parse(f.at("value").get<std::string>());
    Json mism = Json::array();
    std::string diff;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j)
        if (!(printed[i][j] == r.ginv[i][j])) {
          mism.push_back({{"row", i}, {"col", j}, {"printed", printed[i][j].str()}, {"computed", r.ginv[i][j].str()}});
          diff += "(" + std::to_string(i) + "," + std::to_string(j) + ") printed " + printed[i][j].str() +
                  ", computed " + r.ginv[i][j].str() + "; ";
        }
    bool computedInverse = isIdentity(multiply(r.g, r.ginv));
    bool printedInverse = isIdentity(multiply(r.g, printed));
    bool patchedMatches = patched == r.ginv;
    bool ok = computedInverse && (mism.empty() || (!printedInverse && patchedMatches));
    return golden("reduce.ginv", g, "reduce.ginv", ok,
                  {{"entries", 25}, {"g_times_computed_is_identity", computedInverse},
                   {"g_times_printed_is_identity", printedInverse}, {"intended_reading_matches", patchedMatches},
                   {"mismatches", mism}},
                  diff);
  });
  checks.emplace_back("reduce.mc-pattern", [&] {
    const Json& e = g.at("reduce.mc.pattern").at("entries");
    std::string diff;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        FormExpr want = parseLinearForm(e[i][j].get<std::string>());
        if (!(want == r.s0.pattern[i][j]))
          diff += "(" + std::to_string(i) + "," + std::to_string(j) + ") pattern " + r.s0.pattern[i][j].str() +
                  ", printed " + want.str() + "; ";
      }
    for (const auto& v : r.mc.violations) diff += "dg g^-1 " + v + "; ";
    return golden("reduce.mc-pattern", g, "reduce.mc.pattern", diff.empty(), {{"violations", r.mc.violations}}, diff);
  });
  checks.emplace_back("reduce.alpha1", [&] { return compareForm("reduce.alpha1", g, "reduce.mc.alpha1", r.mc.alpha1); });
  checks.emplace_back("reduce.alpha2", [&] {
    CheckResult c = compareForm("reduce.alpha2", g, "reduce.mc.alpha2", r.mc.alpha2);
    FormExpr printed = g.oneForm("reduce.mc.alpha2", "printed_terms");
    if (printed == r.mc.alpha2) return c;
    bool printedHomogeneous = sameDegrees(groupDegrees(printed));
    bool computedHomogeneous = sameDegrees(groupDegrees(r.mc.alpha2));
    c.payload["printed_literal"] = toJson(printed);
    c.payload["printed_literal_bihomogeneous"] = printedHomogeneous;
    c.payload["computed_bihomogeneous"] = computedHomogeneous;
    c.payload["note"] = g.at("reduce.mc.alpha2").at("note");
    if (c.status == Status::Pass && printedHomogeneous) c.status = Status::Fail;
    c.diff = "literal print - computed = " + (printed - r.mc.alpha2).str();
    return c;
  });
  checks.emplace_back("reduce.reconstruction", [&] {
    Json stages = Json::object();
    bool ok = true;
    std::vector<std::pair<std::string, std::pair<const Stage*, std::vector<TorsionReport>>>> all = {
        {"stage0", {&r.s0, r.loop1}}, {"stage1", {&r.s1, r.loop2}}, {"stage2", {&r.s2, computeTorsion(r.s2)}}};
    for (const auto& [name, sr] : all) {
      Json forms = Json::object();
      for (const auto& t : sr.second) {
        FormExpr res = reconstructionResidual(t, *sr.first);
        forms[t.form.name()] = res.isZero() ? Json(0) : Json(res.str());
        ok = ok && res.isZero();
      }
      stages[name] = forms;
    }
    return result("reduce.reconstruction", ok, {{"residuals", stages}});
  });
  for (std::string n : {"X2", "X3", "X4", "X6", "X7", "Ybar8"}) {
    std::string check = "reduce." + n;
    checks.emplace_back(check, [&, n, check] { return compareScalar(check, g, check, r.torsion1.at(n)); });
  }
  checks.emplace_back("reduce.essential", [&] {
    Json per = Json::object();
    bool ok = true;
    for (const auto& [name, terms] : g.at("reduce.essential").at("combinations").items()) {
      std::vector<std::pair<TorsionComponent, Gaussian>> comb;
      for (const auto& t : terms)
        comb.push_back({{OneForm::named(t[0].get<std::string>()), OneForm::named(t[1].get<std::string>()),
                         OneForm::named(t[2].get<std::string>())},
                        Gaussian(t[3].get<long>())});
      auto v = r.absorption1.combination(comb);
      bool ess = r.absorption1.isEssential(v);
      per[name] = {{"essential", ess}, {"value", r.absorption1.evaluate(v).str()}};
      ok = ok && ess;
    }
    return golden("reduce.essential", g, "reduce.essential", ok,
                  {{"cokernel_dimension", r.absorption1.cokernel.size()},
                   {"unknowns", r.absorption1.unknowns},
                   {"combinations", per}});
  });
  checks.emplace_back("reduce.norm-b", [&] { return compareScalar("reduce.norm-b", g, "reduce.norm.b", r.norm1.at(GroupName::b)); });
  checks.emplace_back("reduce.norm-c", [&] { return compareScalar("reduce.norm-c", g, "reduce.norm.c", r.norm1.at(GroupName::c)); });
  checks.emplace_back("reduce.norm-d", [&] {
    CheckResult c = compareScalar("reduce.norm-d", g, "reduce.norm.d", r.norm1.at(GroupName::d));
    if (c.status == Status::Pass) return c;
    // The print is flagged when it is inhomogeneous in the frame weight while
    // the derived value is homogeneous and annihilates its target.
    ScalarExpr printed = g.scalar("reduce.norm.d");
    auto pw = frameWeights(printed * ab.inverse());
    auto cw = frameWeights(r.norm1.at(GroupName::d) * ab.inverse());
    std::set<int> ps(pw.begin(), pw.end()), cs(cw.begin(), cw.end());
    NormalizationMap withPrinted = r.norm1;
    withPrinted[GroupName::d] = printed;
    ScalarExpr x2Printed = applyNormalization(r.torsion1.at("X2"), withPrinted);
    ScalarExpr x2Computed = applyNormalization(r.torsion1.at("X2"), r.norm1);
    c.payload["printed_frame_weights"] = std::vector<int>(ps.begin(), ps.end());
    c.payload["computed_frame_weights"] = std::vector<int>(cs.begin(), cs.end());
    c.payload["X2_with_printed_d"] = x2Printed.str();
    c.payload["X2_with_computed_d"] = x2Computed.str();
    c.payload["note"] = g.at("reduce.norm.d").at("note");
    if (ps.size() > 1 && cs.size() == 1 && x2Computed.isZero() && !x2Printed.isZero()) c.status = Status::Pass;
    return c;
  });
  checks.emplace_back("reduce.norm-e", [&] {
    ScalarExpr e = r.norm2.at(GroupName::e);
    ScalarExpr e0 = e * a.inverse();
    ScalarExpr shape = g.scalar("reduce.norm.e", "shape");
    bool ok = !e0.hasGroup() && shape == a * ScalarExpr::base(BaseName::E0);
    return golden("reduce.norm-e", g, "reduce.norm.e", ok,
                  {{"e", e.str()}, {"E0", e0.str()}, {"E0_expanded", expandAbbreviations(e0, r).str()}});
  });
  checks.emplace_back("reduce.norm-annihilate", [&] {
    Json per = Json::object();
    bool ok = true;
    for (const auto& [name, t] : r.targets1) {
      ScalarExpr v = applyNormalization(t, r.norm1);
      per[name] = v.str();
      ok = ok && v.isZero();
    }
    ScalarExpr y = expandAbbreviations(applyNormalization(r.torsion2.at("Ybar'4"), r.norm2), r);
    per["Ybar'4"] = y.str();
    ok = ok && y.isZero();
    return result("reduce.norm-annihilate", ok, {{"targets_after_normalization", per}});
  });
  checks.emplace_back("reduce.loop2-zero", [&] {
    Json per = Json::object();
    bool ok = true;
    for (const auto& n : g.at("reduce.loop2.zero").at("names")) {
      ScalarExpr v = expandAbbreviations(r.torsion2.at(n.get<std::string>()), r);
      per[n.get<std::string>()] = v.str();
      ok = ok && v.isZero();
    }
    return golden("reduce.loop2-zero", g, "reduce.loop2.zero", ok, per);
  });
  checks.emplace_back("reduce.beta1", [&] {
    return compareForm("reduce.beta1", g, "reduce.mc.beta1", r.s1.mcDefinitions.at(OneForm::named("beta1")));
  });
  checks.emplace_back("reduce.beta2", [&] {
    return compareForm("reduce.beta2", g, "reduce.mc.beta2", r.s1.mcDefinitions.at(OneForm::named("beta2")));
  });
  checks.emplace_back("reduce.Y4", [&] {
    ScalarExpr want = g.scalar("reduce.loop2.Y4", "T_coefficient") * r.tRho1SigmabarZeta +
                      g.scalar("reduce.loop2.Y4", "rest");
    ScalarExpr y4 = r.torsion2.at("Y'4");
    bool ok = y4 == want;
    return golden("reduce.Y4", g, "reduce.loop2.Y4", ok,
                  {{"Y'4", y4.str()}, {"T", r.tRho1SigmabarZeta.str()}},
                  ok ? "" : "computed - expected = " + (y4 - want).str());
  });
  checks.emplace_back("reduce.loop2-third", [&] {
    Json per = Json::object();
    bool ok = true;
    for (const auto& [name, terms] : g.at("reduce.loop2.third").at("relations").items()) {
      ScalarExpr rhs;
      for (const auto& t : terms)
        rhs += ScalarExpr::parse(t[1].get<std::string>()) * r.torsion2.at(t[0].get<std::string>());
      ScalarExpr d = expandAbbreviations(r.torsion2.at(name) - rhs, r);
      per[name] = {{"value", r.torsion2.at(name).str()}, {"difference", d.str()}};
      ok = ok && d.isZero();
    }
    return golden("reduce.loop2-third", g, "reduce.loop2.third", ok, per);
  });
  checks.emplace_back("final.equations", [&] {
    const Json& e = g.at("final.equations");
    const OneForm lambda = OneForm::named("lambda");
    std::string diff;
    Json entries = Json::array();
    bool ok = true;
    // Maurer-Cartan part.
    for (OneForm f : {lifted[1], lifted[2], lifted[4]}) {
      const Json& mc = e.at("mc").at(f.name());
      for (OneForm l : {lambda, lambda.conj()}) {
        ScalarExpr want(mc.value(l.name(), 0L));
        ScalarExpr got = r.final.rules.at(f).coefficient({l, f});
        if (!(got == want)) {
          ok = false;
          diff += "d" + f.name() + " " + l.name() + "^" + f.name() + ": computed " + got.str() + ", printed " + want.str() + "; ";
        }
      }
    }
    // Torsion part: printed monomials, weights and named constants.
    std::set<std::tuple<std::string, std::string, std::string>> printedSet;
    for (const auto& t : e.at("terms")) {
      const Json& use = t.contains("intended") ? t.at("intended") : t;
      OneForm f = OneForm::named(t.at("form").get<std::string>());
      OneForm x = OneForm::named(use.at("x").get<std::string>()), y = OneForm::named(use.at("y").get<std::string>());
      printedSet.insert({f.name(), x.name(), y.name()});
      printedSet.insert({f.name(), y.name(), x.name()});
      ScalarExpr w = ScalarExpr::parse(use.at("weight").get<std::string>());
      ScalarExpr c = r.final.rules.at(f).coefficient({x, y});
      ScalarExpr q = c * w.inverse();
      bool weightOk = !q.hasGroup();
      bool valueOk = !t.contains("value") || q == ScalarExpr::parse(t.at("value").get<std::string>());
      Json entry{{"form", f.name()}, {"monomial", {x.name(), y.name()}}, {"name", use.at("name")},
                 {"weight", w.str()}, {"invariant", q.str()}, {"weight_ok", weightOk}, {"value_ok", valueOk}};
      if (t.contains("intended")) {
        // Flagged print: the printed monomial must break the conjugation
        // symmetry of d rho and the intended one must restore it.
        OneForm px = OneForm::named(t.at("x").get<std::string>()), py = OneForm::named(t.at("y").get<std::string>());
        bool printedAbsent = r.final.rules.at(f).coefficient({px, py}).isZero();
        bool conjPrinted = false;
        for (const auto& o : e.at("terms"))
          if (o.at("form") == t.at("form") && o.at("x") == px.conj().name() && o.at("y") == py.conj().name())
            conjPrinted = true;
        bool flaggedOk = f == f.conj() && printedAbsent && !conjPrinted;
        entry["printed_monomial"] = {px.name(), py.name()};
        entry["printed_monomial_breaks_conjugation_symmetry"] = !conjPrinted;
        entry["note"] = use.at("note");
        diff += "d" + f.name() + ": printed " + px.name() + "^" + py.name() + " read as " + x.name() + "^" + y.name() + "; ";
        ok = ok && flaggedOk;
      }
      ok = ok && weightOk && valueOk;
      if (!weightOk || !valueOk)
        diff += "d" + f.name() + " " + x.name() + "^" + y.name() + ": coefficient " + c.str() + "; ";
      entries.push_back(entry);
    }
    // No computed monomial outside the printed display.
    for (OneForm f : {lifted[1], lifted[2], lifted[4]})
      for (const auto& [m, c] : r.final.rules.at(f).terms()) {
        auto fs = m.factors();
        if (fs[0] == lambda || fs[0] == lambda.conj() || fs[1] == lambda || fs[1] == lambda.conj()) continue;
        if (!printedSet.contains({f.name(), fs[0].name(), fs[1].name()})) {
          ok = false;
          diff += "d" + f.name() + " has the unprinted monomial " + m.str() + " with coefficient " + c.str() + "; ";
        }
      }
    return golden("final.equations", g, "final.equations", ok, {{"terms", entries}}, diff);
  });
  checks.emplace_back("final.conjugation", [&] {
    std::string diff;
    for (OneForm f : sevenForms()) {
      FormExpr c = conjugate(r.final.rules.at(f));
      if (!(c == r.final.rules.at(f.conj()))) diff += "d" + f.conj().name() + " != conj(d" + f.name() + "); ";
    }
    return result("final.conjugation", diff.empty(), {{"diff", diff}});
  });
  checks.emplace_back("final.weights", [&] {
    Json per = Json::array();
    for (const auto& e : r.final.invariants)
      per.push_back({{"name", e.name}, {"weight", e.weight.str()}, {"group_free", e.groupFree}});
    return result("final.weights", r.final.weightFailures.empty(),
                  {{"failures", r.final.weightFailures}, {"components", per}});
  });
  checks.emplace_back("final.invariants", [&] {
    Json per = Json::object();
    for (const auto& e : r.final.invariants) per[e.name] = e.reduced.str();
    CheckResult c{"final.invariants", Status::DerivedOnly, {{"invariants", per}}};
    return c;
  });
  checks.emplace_back("final.dlambda", [&] {
    const OneForm lambda = OneForm::named("lambda");
    const FormExpr& dl = r.final.rules.at(lambda);
    bool semibasic = !dl.involves(lambda) && !dl.involves(lambda.conj()) &&
                     !dl.involves(Generation::GroupDifferential);
    bool lambdaOk = !(r.final.lambda - FormExpr(groupDifferential(GroupName::a), a.inverse()))
                         .involves(Generation::GroupDifferential);
    return result("final.dlambda", semibasic && lambdaOk,
                  {{"lambda", toJson(r.final.lambda)}, {"dlambda_terms", dl.terms().size()},
                   {"semibasic", semibasic}, {"lambda_minus_da_over_a_semibasic", lambdaOk}});
  });
  checks.emplace_back("final.flat", [&] {
    ConnectionForm w = buildConnection(r, true);
    auto names = algebraFormNames();
    StructureRules renamed = renameToAlgebra(w.equations, w, names);
    StructureRules want = goldenRules(g.at("flat.equations").at("equations"));
    StructureRules mc = mcEquations(g7(), names);
    std::string diff = rulesDiff(renamed, want);
    std::string diffMc = rulesDiff(renamed, mc);
    return golden("final.flat", g, "flat.equations", diff.empty() && diffMc.empty(),
                  {{"equations", rulesJson(renamed)}, {"matches_mc_equations_of_g7", diffMc.empty()}},
                  diff + diffMc);
  });

  rep.results = runChecks(checks, cfg);
  emitFinal(rep, r, cfg.flat);
  if (cfg.trace) {
    traceStage(rep, "stage0", r.loop1);
    traceStage(rep, "stage1", r.loop2);
    traceStage(rep, "stage2", computeTorsion(r.s2));
  }
  return rep;
}

Report runEmit(const RunConfig& cfg) {
  declareAlgebraForms();
  Report rep{"emit"};
  ReductionResult r = runReduction();
  emitFinal(rep, r, cfg.flat);
  if (!cfg.flat) {
    ConnectionForm w = buildConnection(r, true);
    rep.artifacts["flat_equations"] = rulesJson(renameToAlgebra(w.equations, w, algebraFormNames()));
  }
  if (cfg.trace) {
    traceStage(rep, "stage0", r.loop1);
    traceStage(rep, "stage1", r.loop2);
    traceStage(rep, "stage2", computeTorsion(r.s2));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// cartan-check

namespace {

Json certificate(const ConditionReport& c) {
  Json entries = Json::array();
  for (const auto& e : c.entries)
    entries.push_back({{"component", e.component}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"pass", e.pass}});
  return {{"condition", c.condition}, {"pass", c.pass}, {"entries", entries}, {"diagnostics", c.diagnostics}};
}

CheckResult conditionResult(const std::string& name, const ConditionReport& c) {
  CheckResult r = result(name, c.pass, certificate(c));
  if (!c.pass) {
    std::string d;
    for (const auto& x : c.diagnostics) d += x + "; ";
    r.diff = d;
  }
  return r;
}

}  // namespace

Report runCartanCheck(const RunConfig& cfg) {
  const Goldens g = loadGoldens(cfg);
  declareAlgebraForms();
  const ReductionResult r = runReduction();
  const ConnectionForm w = buildConnection(r, cfg.flat);
  const ConnectionForm flat = buildConnection(r, true);
  const LieAlgebra l = cfg.algebraPath ? loadAlgebra(*cfg.algebraPath) : g7();

  Registry checks;
  checks.emplace_back("cartan.i", [&] { return conditionResult("cartan.i", checkConditionI(w.definitions)); });
  checks.emplace_back("cartan.ii", [&] { return conditionResult("cartan.ii", checkConditionII(w)); });
  checks.emplace_back("cartan.iii.alpha", [&] { return conditionResult("cartan.iii.alpha", checkConditionIII(w, l, 1)); });
  checks.emplace_back("cartan.iii.alphabar", [&] {
    return conditionResult("cartan.iii.alphabar", checkConditionIII(w, l, 0));
  });
  checks.emplace_back("cartan.interior", [&] {
    const OneForm lambda = OneForm::named("lambda");
    std::string diff;
    Json per = Json::object();
    for (const auto& [name, want] : g.at("cartan.interior").at("contractions").items()) {
      OneForm f = OneForm::named(name);
      FormExpr got = interior(lambda, w.equations.at(f));
      FormExpr expected = want.get<std::string>() == "0" ? FormExpr(1) : parseLinearForm(want.get<std::string>());
      per[name] = got.str();
      if (!(got == expected)) diff += "e_alpha into d" + name + ": computed " + got.str() + ", printed " + expected.str() + "; ";
    }
    return golden("cartan.interior", g, "cartan.interior", diff.empty(), {{"contractions", per}}, diff);
  });
  checks.emplace_back("cartan.rho-reality", [&] { return conditionResult("cartan.rho-reality", checkRhoReality(w)); });
  checks.emplace_back("cartan.flat-curvature", [&] {
    auto curv = curvature(flat, l);
    Json per = Json::object();
    bool ok = true;
    for (std::size_t k = 0; k < curv.size(); ++k) {
      per[flat.forms[k].name()] = curv[k].str();
      ok = ok && curv[k].isZero();
    }
    return result("cartan.flat-curvature", ok, {{"curvature", per}});
  });

  Report rep{"cartan-check"};
  rep.results = runChecks(checks, cfg);
  auto curv = curvature(w, l);
  Json report = Json::object();
  for (std::size_t k = 0; k < curv.size(); ++k)
    report[w.forms[k].name()] = {{"terms", curv[k].terms().size()}, {"form", toJson(curv[k])}};
  rep.artifacts["curvature"] = report;
  rep.artifacts["flat"] = cfg.flat;
  return rep;
}

Report run(const RunConfig& cfg) {
  validateConfig(cfg);
  if (cfg.command == "verify-model") return runVerifyModel(cfg);
  if (cfg.command == "derive-secondary") return runDeriveSecondary(cfg);
  if (cfg.command == "reduce") return runReduce(cfg);
  if (cfg.command == "cartan-check") return runCartanCheck(cfg);
  return runEmit(cfg);
}

}  // namespace crequiv
