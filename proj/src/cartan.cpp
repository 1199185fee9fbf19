#include "crequiv/cartan.hpp"

#include <algorithm>

namespace crequiv {

namespace {

std::vector<OneForm> conditionBasis() {
  std::vector<OneForm> b = {groupDifferential(GroupName::a, true), groupDifferential(GroupName::a)};
  for (OneForm f : stageCoframe(2)) b.push_back(f);
  return b;
}

}  // namespace

ConnectionForm buildConnection(const ReductionResult& r, bool flat) {
  const Coframe lifted = liftedCoframe();
  const OneForm lambda = OneForm::named("lambda");
  ConnectionForm w;
  w.forms = {lambda.conj(), lambda};
  for (OneForm f : lifted) w.forms.push_back(f);

  std::map<OneForm, FormExpr> liftedDefs;
  for (std::size_t i = 0; i < 5; ++i) {
    FormExpr d(1);
    for (std::size_t j = 0; j < 5; ++j)
      if (!r.s2.group[i][j].isZero()) d += FormExpr(r.s2.base[j], r.s2.group[i][j]);
    liftedDefs[lifted[i]] = d;
  }
  FormExpr l = changeBasis(r.final.lambda, liftedDefs);
  w.definitions = {conjugate(l), l};
  for (OneForm f : lifted) w.definitions.push_back(liftedDefs.at(f));
  w.equations = flat ? flatten(r.final.rules) : r.final.rules;
  return w;
}

ConditionReport checkConditionI(const std::vector<FormExpr>& definitions) {
  ConditionReport rep;
  rep.condition = "i";
  const auto basis = conditionBasis();
  std::vector<std::vector<ScalarExpr>> m;
  for (const auto& d : definitions) {
    std::vector<ScalarExpr> row;
    for (OneForm b : basis) row.push_back(d.coefficient({b}));
    m.push_back(std::move(row));
  }
  std::vector<bool> used(m.size(), false);
  std::size_t pivots = 0;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    std::size_t piv = m.size();
    for (std::size_t r = 0; r < m.size(); ++r)
      if (!used[r] && m[r][col].invertible()) {
        piv = r;
        break;
      }
    CertificateEntry e{basis[col].name(), piv < m.size() ? m[piv][col].str() : "0", "invertible pivot", piv < m.size()};
    if (piv == m.size()) {
      rep.diagnostics.push_back("no invertible pivot in column " + basis[col].name());
      rep.entries.push_back(std::move(e));
      continue;
    }
    used[piv] = true;
    ++pivots;
    ScalarExpr inv = m[piv][col].inverse();
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == piv || m[r][col].isZero()) continue;
      ScalarExpr f = m[r][col] * inv;
      for (std::size_t c = 0; c < basis.size(); ++c)
        if (!m[piv][c].isZero()) m[r][c] -= f * m[piv][c];
    }
    rep.entries.push_back(std::move(e));
  }
  if (definitions.size() != basis.size())
    rep.diagnostics.push_back(std::to_string(definitions.size()) + " forms for a " + std::to_string(basis.size()) +
                              "-dimensional cotangent space");
  rep.pass = pivots == basis.size() && definitions.size() == basis.size();
  return rep;
}

ConditionReport checkConditionII(const ConnectionForm& w) {
  ConditionReport rep;
  rep.condition = "ii";
  for (std::size_t k = 0; k < w.forms.size(); ++k) {
    FormExpr rest = w.definitions[k];
    std::string expected = "semibasic";
    const std::string& n = w.forms[k].name();
    if (n == "lambda" || n == "lambdabar") {
      bool bar = n == "lambdabar";
      ScalarExpr a = ScalarExpr::group(GroupName::a, bar);
      rest -= FormExpr(groupDifferential(GroupName::a, bar), a.inverse());
      expected = bar ? "dabar/abar + semibasic" : "da/a + semibasic";
    }
    bool ok = !rest.involves(Generation::GroupDifferential);
    rep.entries.push_back({n, w.definitions[k].str(), expected, ok});
    if (!ok) rep.diagnostics.push_back(n + " has a group-differential residue");
  }
  rep.pass = rep.diagnostics.empty();
  return rep;
}

ConditionReport checkConditionIII(const ConnectionForm& w, const LieAlgebra& l, std::size_t index) {
  if (l.dim() != w.forms.size()) throw std::invalid_argument("algebra and connection have different dimensions");
  ConditionReport rep;
  rep.condition = "iii:" + l.labels()[index];
  const OneForm dual = w.forms[index];
  for (std::size_t k = 0; k < w.forms.size(); ++k) {
    auto it = w.equations.find(w.forms[k]);
    if (it == w.equations.end()) throw std::invalid_argument("no structure equation for " + w.forms[k].name());
    FormExpr lhs = interior(dual, it->second);
    FormExpr rhs(1);
    for (std::size_t j = 0; j < w.forms.size(); ++j) {
      Gaussian c = l.constant(index, j, k);
      if (!c.isZero()) rhs -= FormExpr(w.forms[j], ScalarExpr(c));
    }
    bool ok = lhs == rhs;
    rep.entries.push_back({l.labels()[k], lhs.str(), rhs.str(), ok});
    if (!ok)
      rep.diagnostics.push_back("direction " + l.labels()[k] + ": contraction gives " + lhs.str() + ", -ad gives " +
                                rhs.str());
  }
  rep.pass = rep.diagnostics.empty();
  return rep;
}

std::vector<FormExpr> curvature(const ConnectionForm& w, const LieAlgebra& l) {
  std::vector<FormExpr> out;
  for (std::size_t k = 0; k < w.forms.size(); ++k) {
    FormExpr omega = w.equations.at(w.forms[k]);
    for (std::size_t i = 0; i < w.forms.size(); ++i)
      for (std::size_t j = i + 1; j < w.forms.size(); ++j) {
        Gaussian c = l.constant(i, j, k);
        if (!c.isZero()) omega += FormExpr::monomial({w.forms[i], w.forms[j]}, ScalarExpr(c));
      }
    out.push_back(std::move(omega));
  }
  return out;
}

ConditionReport checkRhoReality(const ConnectionForm& w) {
  ConditionReport rep;
  rep.condition = "rho-reality";
  const OneForm rho = OneForm::named("rho");
  const FormExpr& d = w.equations.at(rho);
  FormExpr c = conjugate(d);
  rep.pass = c == d;
  rep.entries.push_back({"rho", d.str(), c.str(), rep.pass});
  if (!rep.pass) rep.diagnostics.push_back("d rho differs from its conjugate by " + (d - c).str());
  return rep;
}

std::vector<std::string> algebraFormNames() {
  return {"w_alphabar", "w_alpha", "w_sigmabar", "w_sigma", "w_rho", "w_zetabar", "w_zeta"};
}

StructureRules renameToAlgebra(const StructureRules& rules, const ConnectionForm& w,
                               const std::vector<std::string>& formNames) {
  if (formNames.size() != w.forms.size()) throw std::invalid_argument("one name per connection form is required");
  std::vector<OneForm> target;
  for (std::size_t k = 0; k < w.forms.size(); ++k) {
    auto c = std::find(w.forms.begin(), w.forms.end(), w.forms[k].conj()) - w.forms.begin();
    target.push_back(OneForm::declare(formNames[k], Generation::Custom, formNames[static_cast<std::size_t>(c)]));
  }
  std::map<OneForm, FormExpr> rename;
  for (std::size_t k = 0; k < w.forms.size(); ++k) rename[w.forms[k]] = FormExpr(target[k]);
  StructureRules out;
  for (std::size_t k = 0; k < w.forms.size(); ++k)
    if (auto it = rules.find(w.forms[k]); it != rules.end()) out[target[k]] = changeBasis(it->second, rename);
  return out;
}

}  // namespace crequiv
