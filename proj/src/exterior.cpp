#include "crequiv/exterior.hpp"

#include "crequiv/linear.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

namespace crequiv {

// ---------------------------------------------------------------------------
// Symbol registry
// ---------------------------------------------------------------------------

namespace {

struct Entry {
  std::string name;
  std::string latex;
  Generation gen;
  std::uint16_t conj;
};

struct Registry {
  std::mutex mutex;
  std::vector<Entry> entries;
  std::unordered_map<std::string, std::uint16_t> byName;

  std::uint16_t add(std::string_view name, Generation gen, std::string_view conjName,
                    std::string_view latex) {
    if (auto it = byName.find(std::string(name)); it != byName.end()) return it->second;
    if (entries.size() >= 0xffff) throw ExteriorError("too many 1-form symbols");
    auto id = static_cast<std::uint16_t>(entries.size());
    entries.push_back({std::string(name), latex.empty() ? std::string(name) : std::string(latex),
                       gen, id});
    byName.emplace(std::string(name), id);
    if (!conjName.empty() && conjName != name) {
      if (auto it = byName.find(std::string(conjName)); it != byName.end()) {
        entries[id].conj = it->second;
        entries[it->second].conj = id;
      }
    }
    return id;
  }
};

void addPair(Registry& r, const std::string& name, const std::string& bar, Generation g,
             const std::string& latex, const std::string& latexBar) {
  r.add(bar, g, name, latexBar);
  r.add(name, g, bar, latex);
}

void addFrame(Registry& r, const std::string& suffix, Generation g) {
  std::string sub = suffix.empty() ? "" : "_" + suffix;
  addPair(r, "sigma" + suffix, "sigmabar" + suffix, g, "\\sigma" + sub,
          "\\overline{\\sigma}" + sub);
  r.add("rho" + suffix, g, {}, "\\rho" + sub);
  addPair(r, "zeta" + suffix, "zetabar" + suffix, g, "\\zeta" + sub, "\\overline{\\zeta}" + sub);
}

Registry& registry() {
  static Registry* r = [] {
    auto* reg = new Registry;
    for (const char* g : {"a", "b", "c", "d", "e"}) {
      std::string n(g);
      addPair(*reg, "d" + n, "d" + n + "bar", Generation::GroupDifferential, "d" + n,
              "d\\overline{" + n + "}");
    }
    for (int k = 1; k <= 5; ++k) {
      std::string s = std::to_string(k);
      addPair(*reg, "alpha" + s, "alphabar" + s, Generation::MaurerCartan, "\\alpha^{" + s + "}",
              "\\overline{\\alpha}^{" + s + "}");
    }
    for (int k = 1; k <= 2; ++k) {
      std::string s = std::to_string(k);
      addPair(*reg, "beta" + s, "betabar" + s, Generation::MaurerCartan, "\\beta^{" + s + "}",
              "\\overline{\\beta}^{" + s + "}");
    }
    addPair(*reg, "gamma1", "gammabar1", Generation::MaurerCartan, "\\gamma^{1}",
            "\\overline{\\gamma}^{1}");
    addPair(*reg, "lambda", "lambdabar", Generation::MaurerCartan, "\\lambda",
            "\\overline{\\lambda}");
    addFrame(*reg, "", Generation::Lifted);
    addFrame(*reg, "0", Generation::Base);
    addFrame(*reg, "1", Generation::Intermediate1);
    addFrame(*reg, "2", Generation::Intermediate2);
    return reg;
  }();
  return *r;
}

}  // namespace

OneForm OneForm::named(std::string_view name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.byName.find(std::string(name));
  if (it == r.byName.end()) throw ExteriorError("unknown 1-form symbol '" + std::string(name) + "'");
  return OneForm(it->second);
}

OneForm OneForm::declare(std::string_view name, Generation gen, std::string_view conjName,
                         std::string_view latex) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return OneForm(r.add(name, gen, conjName, latex));
}

const std::string& OneForm::name() const {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.entries[m_id].name;
}

const std::string& OneForm::latex() const {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.entries[m_id].latex;
}

Generation OneForm::generation() const {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.entries[m_id].gen;
}

OneForm OneForm::conj() const {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return OneForm(r.entries[m_id].conj);
}

OneForm baseCoframe(Letter l) {
  static const OneForm forms[] = {OneForm::named("sigmabar0"), OneForm::named("sigma0"),
                                  OneForm::named("rho0"), OneForm::named("zetabar0"),
                                  OneForm::named("zeta0")};
  switch (l) {
    case Letter::Sbar: return forms[0];
    case Letter::S: return forms[1];
    case Letter::T: return forms[2];
    case Letter::Lbar: return forms[3];
    case Letter::L: return forms[4];
  }
  throw ExteriorError("bad letter");
}

OneForm groupDifferential(GroupName g, bool conj) {
  static const char* names[] = {"a", "b", "c", "d", "e"};
  return OneForm::named(std::string("d") + names[int(g)] + (conj ? "bar" : ""));
}

// ---------------------------------------------------------------------------
// Monomials
// ---------------------------------------------------------------------------

FormMonomial FormMonomial::sorted(std::span<const OneForm> factors, int& sign) {
  if (factors.size() > kMaxDegree) throw ExteriorError("form degree too large");
  FormMonomial m;
  m.m_n = static_cast<std::uint8_t>(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i) m.m_ids[i] = factors[i].id();
  sign = 1;
  for (std::size_t i = 1; i < m.m_n; ++i)
    for (std::size_t j = i; j > 0 && m.m_ids[j - 1] >= m.m_ids[j]; --j) {
      if (m.m_ids[j - 1] == m.m_ids[j]) {
        sign = 0;
        return m;
      }
      std::swap(m.m_ids[j - 1], m.m_ids[j]);
      sign = -sign;
    }
  return m;
}

OneForm FormMonomial::operator[](std::size_t i) const { return OneForm(m_ids[i]); }

std::vector<OneForm> FormMonomial::factors() const {
  std::vector<OneForm> out;
  for (std::size_t i = 0; i < m_n; ++i) out.push_back((*this)[i]);
  return out;
}

bool FormMonomial::contains(OneForm f) const {
  for (std::size_t i = 0; i < m_n; ++i)
    if (m_ids[i] == f.id()) return true;
  return false;
}

std::string FormMonomial::str() const {
  if (m_n == 0) return "1";
  std::string s;
  for (std::size_t i = 0; i < m_n; ++i) {
    if (i) s += "^";
    s += (*this)[i].name();
  }
  return s;
}

// ---------------------------------------------------------------------------
// FormExpr
// ---------------------------------------------------------------------------

FormExpr::FormExpr(OneForm f, ScalarExpr coeff) : m_degree(1) {
  int sign;
  OneForm fs[] = {f};
  add(FormMonomial::sorted(fs, sign), coeff);
}

FormExpr FormExpr::scalar(ScalarExpr f) {
  FormExpr out(0);
  out.add(FormMonomial(), f);
  return out;
}

FormExpr FormExpr::monomial(std::initializer_list<OneForm> factors, ScalarExpr coeff) {
  FormExpr out(static_cast<int>(factors.size()));
  int sign;
  auto m = FormMonomial::sorted(std::span<const OneForm>(factors.begin(), factors.size()), sign);
  if (sign != 0) out.add(m, coeff.scaled(Gaussian(sign)));
  return out;
}

ScalarExpr FormExpr::coefficient(std::initializer_list<OneForm> factors) const {
  int sign;
  auto m = FormMonomial::sorted(std::span<const OneForm>(factors.begin(), factors.size()), sign);
  if (sign == 0) return {};
  return coefficient(m).scaled(Gaussian(sign));
}

ScalarExpr FormExpr::coefficient(const FormMonomial& m) const {
  auto it = m_terms.find(m);
  return it == m_terms.end() ? ScalarExpr() : it->second;
}

void FormExpr::add(const FormMonomial& m, const ScalarExpr& c) {
  if (c.isZero()) return;
  if (static_cast<int>(m.degree()) != m_degree) {
    if (m_terms.empty() && m_degree == 0)
      m_degree = static_cast<int>(m.degree());
    else
      throw ExteriorError("adding a term of the wrong degree");
  }
  auto [it, inserted] = m_terms.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.isZero()) m_terms.erase(it);
  }
}

FormExpr& FormExpr::operator+=(const FormExpr& o) {
  if (o.m_terms.empty()) return *this;
  if (m_terms.empty()) m_degree = o.m_degree;
  for (const auto& [m, c] : o.m_terms) add(m, c);
  return *this;
}

FormExpr& FormExpr::operator-=(const FormExpr& o) { return *this += -o; }

FormExpr FormExpr::operator-() const {
  FormExpr out = *this;
  for (auto& [m, c] : out.m_terms) c = -c;
  return out;
}

FormExpr operator*(const ScalarExpr& c, const FormExpr& x) {
  FormExpr out(x.m_degree);
  if (c.isZero()) return out;
  for (const auto& [m, v] : x.m_terms) out.add(m, c * v);
  return out;
}

bool FormExpr::involves(Generation g) const {
  for (const auto& [m, c] : m_terms)
    for (auto f : m.factors())
      if (f.generation() == g) return true;
  return false;
}

bool FormExpr::involves(OneForm f) const {
  return std::any_of(m_terms.begin(), m_terms.end(),
                     [&](const auto& kv) { return kv.first.contains(f); });
}

std::string FormExpr::str() const {
  if (m_terms.empty()) return "0";
  std::string s;
  for (const auto& [m, c] : m_terms) {
    std::string piece;
    if (m.degree() == 0)
      piece = c.str();
    else if (c.isConstant() && c.constantValue()->isOne())
      piece = m.str();
    else if (c.size() == 1 && c == ScalarExpr(-1))
      piece = "-" + m.str();
    else if (c.size() == 1)
      piece = c.str() + "*" + m.str();
    else
      piece = "(" + c.str() + ")*" + m.str();
    if (s.empty())
      s = piece;
    else if (piece[0] == '-')
      s += " - " + piece.substr(1);
    else
      s += " + " + piece;
  }
  return s;
}

std::string FormExpr::latex() const {
  if (m_terms.empty()) return "0";
  std::string s;
  for (const auto& [m, c] : m_terms) {
    std::string mono;
    for (auto f : m.factors()) mono += (mono.empty() ? "" : " \\wedge ") + f.latex();
    std::string coeff = c.latex();
    std::string piece;
    if (mono.empty())
      piece = coeff;
    else if (coeff == "1")
      piece = mono;
    else if (coeff == "-1")
      piece = "-" + mono;
    else if (c.size() == 1)
      piece = coeff + "\\, " + mono;
    else
      piece = "\\left(" + coeff + "\\right) " + mono;
    if (s.empty())
      s = piece;
    else if (piece[0] == '-')
      s += " - " + piece.substr(1);
    else
      s += " + " + piece;
  }
  return s;
}

FormExpr wedge(const FormExpr& x, const FormExpr& y) {
  FormExpr out(x.degree() + y.degree());
  for (const auto& [mx, cx] : x.terms()) {
    for (const auto& [my, cy] : y.terms()) {
      std::vector<OneForm> fs = mx.factors();
      auto fy = my.factors();
      fs.insert(fs.end(), fy.begin(), fy.end());
      int sign;
      auto m = FormMonomial::sorted(fs, sign);
      if (sign == 0) continue;
      out.add(m, (cx * cy).scaled(Gaussian(sign)));
    }
  }
  return out;
}

FormExpr conjugate(const FormExpr& x) {
  FormExpr out(x.degree());
  for (const auto& [m, c] : x.terms()) {
    std::vector<OneForm> fs;
    for (auto f : m.factors()) fs.push_back(f.conj());
    int sign;
    auto cm = FormMonomial::sorted(fs, sign);
    out.add(cm, conjugate(c).scaled(Gaussian(sign)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Differentials
// ---------------------------------------------------------------------------

FormExpr differential(const ScalarExpr& f) {
  FormExpr out(1);
  for (Letter l : kLetters) out += FormExpr(baseCoframe(l), derive(f, l));
  static const GroupName groups[] = {GroupName::a, GroupName::b, GroupName::c, GroupName::d,
                                     GroupName::e};
  for (GroupName g : groups)
    for (bool c : {false, true}) {
      Atom a = Atom::group(g, c);
      if (f.contains(a)) out += FormExpr(groupDifferential(g, c), f.partial(a));
    }
  return out;
}

namespace {

const FormExpr& ruleFor(OneForm f, const StructureRules& rules) {
  static const FormExpr zero2(2);
  auto it = rules.find(f);
  if (it != rules.end()) return it->second;
  if (f.generation() == Generation::GroupDifferential) return zero2;
  throw ExteriorError("no structure rule for " + f.name());
}

}  // namespace

FormExpr exteriorD(const FormExpr& x, const StructureRules& rules) {
  FormExpr out(x.degree() + 1);
  for (const auto& [m, c] : x.terms()) {
    auto fs = m.factors();
    FormExpr mono = FormExpr::scalar(1);
    for (auto f : fs) mono = wedge(mono, FormExpr(f));
    out += wedge(differential(c), mono);
    for (std::size_t j = 0; j < fs.size(); ++j) {
      const FormExpr& dj = ruleFor(fs[j], rules);
      if (dj.isZero()) continue;
      FormExpr piece = FormExpr::scalar(j % 2 ? -c : c);
      for (std::size_t i = 0; i < fs.size(); ++i)
        piece = wedge(piece, i == j ? dj : FormExpr(fs[i]));
      out += piece;
    }
  }
  return out;
}

FormExpr interior(OneForm dual, const FormExpr& x) {
  if (x.degree() == 0) return FormExpr(0);
  FormExpr out(x.degree() - 1);
  for (const auto& [m, c] : x.terms()) {
    auto fs = m.factors();
    for (std::size_t p = 0; p < fs.size(); ++p) {
      if (!(fs[p] == dual)) continue;
      fs.erase(fs.begin() + static_cast<std::ptrdiff_t>(p));
      int sign = 0;
      FormMonomial rest = FormMonomial::sorted(fs, sign);
      out.add(rest, (p % 2 ? -c : c).scaled(sign));
      break;
    }
  }
  return out;
}

FormExpr changeBasis(const FormExpr& x, const std::map<OneForm, FormExpr>& map) {
  FormExpr out(x.degree());
  for (const auto& [m, c] : x.terms()) {
    FormExpr piece = FormExpr::scalar(c);
    for (auto f : m.factors()) {
      auto it = map.find(f);
      piece = wedge(piece, it == map.end() ? FormExpr(f) : it->second);
    }
    out += piece;
  }
  return out;
}

StructureRules initialDarboux() {
  auto s = [](BaseName n, bool c = false) { return ScalarExpr::base(n, c); };
  const OneForm sb = OneForm::named("sigmabar0"), sg = OneForm::named("sigma0"),
                rh = OneForm::named("rho0"), zb = OneForm::named("zetabar0"),
                z = OneForm::named("zeta0");
  using F = FormExpr;
  const ScalarExpr I = ScalarExpr::i();
  StructureRules r;
  r[sb] = F::monomial({sb, sg}, -s(BaseName::K, true)) + F::monomial({sb, rh}, s(BaseName::F, true)) +
          F::monomial({sb, zb}, s(BaseName::Q, true)) + F::monomial({sb, z}, s(BaseName::B, true)) +
          F::monomial({sg, rh}, s(BaseName::G)) + F::monomial({sg, zb}, s(BaseName::B, true)) +
          F::monomial({sg, z}, s(BaseName::R)) + F::monomial({rh, zb});
  r[sg] = F::monomial({sb, sg}, s(BaseName::K)) + F::monomial({sb, rh}, s(BaseName::G, true)) +
          F::monomial({sb, zb}, s(BaseName::R, true)) + F::monomial({sb, z}, s(BaseName::B)) +
          F::monomial({sg, rh}, s(BaseName::F)) + F::monomial({sg, zb}, s(BaseName::B)) +
          F::monomial({sg, z}, s(BaseName::Q)) + F::monomial({rh, z});
  r[rh] = F::monomial({sb, sg}, I * s(BaseName::J)) + F::monomial({sb, rh}, s(BaseName::E, true)) +
          F::monomial({sb, zb}, s(BaseName::P, true)) + F::monomial({sb, z}, s(BaseName::A)) +
          F::monomial({sg, rh}, s(BaseName::E)) + F::monomial({sg, zb}, s(BaseName::A)) +
          F::monomial({sg, z}, s(BaseName::P)) + F::monomial({zb, z}, -I);
  r[zb] = F(2);
  r[z] = F(2);
  return r;
}

// ---------------------------------------------------------------------------
// Secondary brackets
// ---------------------------------------------------------------------------

ScalarExpr applySecondary(const ScalarExpr& x, const std::map<BaseName, ScalarExpr>& table) {
  std::map<Atom, ScalarExpr> m;
  for (const auto& [n, v] : table) m[Atom::base(n)] = v;
  return substituteBase(x, m);
}

namespace {

int coframeWeight(OneForm f) {
  const std::string& n = f.name();
  if (n.starts_with("sigma")) return 3;
  if (n.starts_with("rho")) return 2;
  if (n.starts_with("zeta")) return 1;
  return 0;
}

struct Component {
  std::string name;
  int weight;
  ScalarExpr value;
};

std::vector<Component> d2Components(const StructureRules& rules) {
  std::vector<Component> out;
  for (const auto& [f, df] : rules) {
    if (df.isZero()) continue;
    FormExpr dd = exteriorD(df, rules);
    for (const auto& [m, c] : dd.terms()) {
      int w = 0;
      for (auto g : m.factors()) w += coframeWeight(g);
      out.push_back({"d2(" + f.name() + ")[" + m.str() + "]", w, c});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Component& a, const Component& b) { return a.weight < b.weight; });
  return out;
}

ScalarExpr rewriteWithSolved(const ScalarExpr& x, const std::map<Atom, ScalarExpr>& solved) {
  const Word tWord{Letter::T};
  return rewriteAtoms(x, [&](Atom a) -> std::optional<ScalarExpr> {
    if (!a.isBase()) return std::nullopt;
    Word w = a.word();
    if (auto it = solved.find(a.stem()); it != solved.end()) return applyWord(w, it->second);
    if (!w.empty() && w.back() == Letter::T) {
      auto it = solved.find(Atom::base(a.baseName(), a.conj(), tWord));
      if (it != solved.end()) {
        w.pop_back();
        return applyWord(w, it->second);
      }
    }
    return std::nullopt;
  });
}

}  // namespace

SecondaryBrackets deriveSecondaryBrackets(const StructureRules& rules) {
  std::vector<Atom> candidates;
  for (BaseName n : kSecondaryBase) {
    candidates.push_back(Atom::base(n));
    if (!isReal(n)) candidates.push_back(Atom::base(n, true));
  }
  const Word tWord{Letter::T};
  for (BaseName n : kPrimaryBase) {
    candidates.push_back(Atom::base(n, false, tWord));
    if (!isReal(n)) candidates.push_back(Atom::base(n, true, tWord));
  }

  std::map<Atom, ScalarExpr> solved;  // keys: secondary stems or T(X) atoms
  auto rewrite = [&](const ScalarExpr& x) { return rewriteWithSolved(x, solved); };

  auto comps = d2Components(rules);
  SecondaryBrackets out;
  std::size_t i = 0;
  while (i < comps.size()) {
    int w = comps[i].weight;
    std::vector<std::size_t> level;
    for (; i < comps.size() && comps[i].weight == w; ++i) level.push_back(i);

    std::vector<ScalarExpr> eqs;
    for (auto k : level) eqs.push_back(rewrite(comps[k].value));
    std::vector<Atom> unknowns;
    for (Atom c : candidates) {
      if (solved.contains(c)) continue;
      if (std::any_of(eqs.begin(), eqs.end(), [&](const ScalarExpr& e) { return e.contains(c); }))
        unknowns.push_back(c);
    }
    GMatrix m;
    std::vector<ScalarExpr> rhs;
    for (std::size_t q = 0; q < eqs.size(); ++q) {
      std::vector<Gaussian> row(unknowns.size());
      ScalarExpr rest = eqs[q];
      for (std::size_t u = 0; u < unknowns.size(); ++u) {
        auto lin = rest.linearIn(unknowns[u]);
        auto cv = lin ? lin->first.constantValue() : std::nullopt;
        if (!cv)
          throw ExteriorError("component " + comps[level[q]].name + " is not linear in " +
                              unknowns[u].str() + " with constant coefficient");
        row[u] = *cv;
        rest = lin->second;
      }
      m.push_back(std::move(row));
      rhs.push_back(-rest);
    }
    auto sol = solveLinear(m, rhs);
    if (!sol.freeColumns.empty()) {
      std::string what;
      for (auto c : sol.freeColumns) what += " " + unknowns[c].str();
      throw ExteriorError("secondary brackets underdetermined at weight " + std::to_string(w) +
                          ":" + what);
    }
    for (std::size_t u = 0; u < unknowns.size(); ++u) solved[unknowns[u]] = sol.values[u];
    for (auto& [k, v] : solved) v = rewrite(v);
  }

  for (const auto& [k, v] : solved) {
    if (k.wordLength() != 0)
      out.derivativeRelations[k] = v;
    else if (!k.conj())
      out.table[k.baseName()] = v;
  }
  for (const auto& c : comps) {
    ScalarExpr r = rewrite(c.value);
    if (!r.isZero()) out.residualRelations.emplace_back(c.name, r);
  }
  return out;
}

ScalarExpr reduceModRelations(const ScalarExpr& x, const SecondaryBrackets& sb) {
  std::map<Atom, ScalarExpr> solved = sb.derivativeRelations;
  for (const auto& [n, v] : sb.table) {
    solved[Atom::base(n)] = v;
    if (!isReal(n)) solved[Atom::base(n, true)] = conjugate(v);
  }
  return rewriteWithSolved(x, solved);
}

std::vector<std::pair<OneForm, FormExpr>> checkD2(const StructureRules& rules,
                                                   const std::map<BaseName, ScalarExpr>& table) {
  std::vector<std::pair<OneForm, FormExpr>> out;
  for (const auto& [f, df] : rules) {
    FormExpr dd = exteriorD(df, rules).mapCoefficients(
        [&](const ScalarExpr& c) { return applySecondary(c, table); });
    if (!dd.isZero()) out.emplace_back(f, dd);
  }
  return out;
}

}  // namespace crequiv
