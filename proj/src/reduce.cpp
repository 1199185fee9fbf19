#include "crequiv/reduce.hpp"

#include <algorithm>

namespace crequiv {

namespace {

ScalarExpr grp(GroupName n, bool conj = false) { return ScalarExpr::group(n, conj); }
ScalarExpr sym(BaseName n, bool conj = false) { return ScalarExpr::base(n, conj); }
FormExpr mc(const char* name) { return FormExpr(OneForm::named(name)); }

FormExpr combine(const std::vector<ScalarExpr>& row, const Coframe& basis) {
  FormExpr out(1);
  for (std::size_t j = 0; j < basis.size(); ++j)
    if (!row[j].isZero()) out += FormExpr(basis[j], row[j]);
  return out;
}

std::map<OneForm, FormExpr> basisMap(const Coframe& from, const ScalarMatrix& m, const Coframe& to) {
  std::map<OneForm, FormExpr> out;
  for (std::size_t i = 0; i < from.size(); ++i) out[from[i]] = combine(m[i], to);
  return out;
}

ScalarMatrix zeroMatrix(std::size_t n) { return ScalarMatrix(n, std::vector<ScalarExpr>(n)); }

std::vector<std::vector<FormExpr>> zeroPattern() {
  return std::vector<std::vector<FormExpr>>(5, std::vector<FormExpr>(5, FormExpr(1)));
}

/// dg g^{-1} entrywise.
FormMatrix dgGinv(const ScalarMatrix& g) {
  ScalarMatrix gi = invertGroupMatrix(g);
  const std::size_t n = g.size();
  FormMatrix out(n, std::vector<FormExpr>(n, FormExpr(1)));
  std::vector<std::vector<FormExpr>> dg(n, std::vector<FormExpr>(n, FormExpr(1)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dg[i][j] = differential(g[i][j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j)
        if (!gi[j][k].isZero() && !dg[i][j].isZero()) out[i][k] += gi[j][k] * dg[i][j];
  return out;
}

std::vector<std::string> patternViolations(const FormMatrix& entries, const Stage& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t k = 0; k < 5; ++k) {
      FormExpr expected = changeBasis(s.pattern[i][k], s.mcDefinitions);
      if (!(expected == entries[i][k]))
        out.push_back("(" + std::to_string(i + 1) + "," + std::to_string(k + 1) + "): computed " +
                      entries[i][k].str() + ", expected " + expected.str());
    }
  return out;
}

/// Fills the Maurer-Cartan definitions from dg g^{-1}: each named unbarred
/// symbol is read at its position, the barred one is its conjugate.
void defineFrom(Stage& s, const std::vector<std::tuple<const char*, std::size_t, std::size_t>>& where) {
  FormMatrix e = dgGinv(s.group);
  for (const auto& [name, i, k] : where) {
    OneForm f = OneForm::named(name);
    s.mcDefinitions[f] = e[i][k];
    s.mcDefinitions[f.conj()] = conjugate(e[i][k]);
  }
}

}  // namespace

Coframe liftedCoframe() {
  return {OneForm::named("sigmabar"), OneForm::named("sigma"), OneForm::named("rho"), OneForm::named("zetabar"),
          OneForm::named("zeta")};
}

Coframe stageCoframe(int generation) {
  std::string s = std::to_string(generation);
  return {OneForm::named("sigmabar" + s), OneForm::named("sigma" + s), OneForm::named("rho" + s),
          OneForm::named("zetabar" + s), OneForm::named("zeta" + s)};
}

ScalarMatrix multiply(const ScalarMatrix& x, const ScalarMatrix& y) {
  ScalarMatrix out(x.size(), std::vector<ScalarExpr>(y.front().size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < y.front().size(); ++k)
      for (std::size_t j = 0; j < y.size(); ++j)
        if (!x[i][j].isZero() && !y[j][k].isZero()) out[i][k] += x[i][j] * y[j][k];
  return out;
}

ScalarMatrix identityMatrix(std::size_t n) {
  ScalarMatrix m = zeroMatrix(n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

ScalarMatrix buildInitialGStructure() {
  using G = GroupName;
  auto a = grp(G::a), ab = grp(G::a, true);
  ScalarMatrix g = zeroMatrix(5);
  g[0][0] = a * ab * ab;
  g[1][1] = a * a * ab;
  g[2][0] = grp(G::c, true);
  g[2][1] = grp(G::c);
  g[2][2] = a * ab;
  g[3][0] = grp(G::e, true);
  g[3][1] = grp(G::d);
  g[3][2] = grp(G::b, true);
  g[3][3] = ab;
  g[4][0] = grp(G::d, true);
  g[4][1] = grp(G::e);
  g[4][2] = grp(G::b);
  g[4][4] = a;
  return g;
}

ScalarMatrix invertGroupMatrix(const ScalarMatrix& g) {
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i].size() != n) throw ReduceError("group matrix is not square");
    for (std::size_t j = i + 1; j < n; ++j)
      if (!g[i][j].isZero()) throw ReduceError("group matrix is not lower triangular");
    if (!g[i][i].invertible()) throw ReduceError("diagonal entry " + g[i][i].str() + " is not invertible");
  }
  ScalarMatrix inv = zeroMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    ScalarExpr di = g[i][i].inverse();
    inv[i][i] = di;
    for (std::size_t j = 0; j < i; ++j) {
      ScalarExpr s;
      for (std::size_t k = j; k < i; ++k)
        if (!g[i][k].isZero() && !inv[k][j].isZero()) s += g[i][k] * inv[k][j];
      inv[i][j] = -(di * s);
    }
  }
  return inv;
}

MaurerCartanResult maurerCartan(const ScalarMatrix& g) {
  Stage s = stage0();
  s.group = g;
  MaurerCartanResult r;
  r.dgginv = dgGinv(g);
  r.alpha1 = r.dgginv[4][4];
  r.alpha2 = r.dgginv[2][1];
  // Definitions read from the same matrix make the check about the pattern
  // (zeros, diagonal combinations, conjugate positions) only.
  s.mcDefinitions.clear();
  defineFrom(s, {{"alpha1", 4, 4}, {"alpha2", 2, 1}, {"alpha3", 4, 1}, {"alpha4", 4, 0}, {"alpha5", 4, 2}});
  r.violations = patternViolations(r.dgginv, s);
  return r;
}

Stage stage0() {
  Stage s;
  s.name = "initial";
  s.base = stageCoframe(0);
  s.fromInitial = identityMatrix(5);
  s.group = buildInitialGStructure();
  auto p = zeroPattern();
  p[0][0] = mc("alpha1") + 2 * mc("alphabar1");
  p[1][1] = 2 * mc("alpha1") + mc("alphabar1");
  p[2][0] = mc("alphabar2");
  p[2][1] = mc("alpha2");
  p[2][2] = mc("alpha1") + mc("alphabar1");
  p[3][0] = mc("alphabar3");
  p[3][1] = mc("alphabar4");
  p[3][2] = mc("alphabar5");
  p[3][3] = mc("alphabar1");
  p[4][0] = mc("alpha4");
  p[4][1] = mc("alpha3");
  p[4][2] = mc("alpha5");
  p[4][4] = mc("alpha1");
  s.pattern = p;
  defineFrom(s, {{"alpha1", 4, 4}, {"alpha2", 2, 1}, {"alpha3", 4, 1}, {"alpha4", 4, 0}, {"alpha5", 4, 2}});
  return s;
}

Stage stage1() {
  using G = GroupName;
  using B = BaseName;
  Stage s;
  s.name = "loop2";
  s.base = stageCoframe(1);
  s.fromInitial = identityMatrix(5);
  s.fromInitial[2][0] = sym(B::C0, true);
  s.fromInitial[2][1] = sym(B::C0);
  s.fromInitial[3][1] = sym(B::D0);
  s.fromInitial[3][2] = sym(B::B0, true);
  s.fromInitial[4][0] = sym(B::D0, true);
  s.fromInitial[4][2] = sym(B::B0);
  auto a = grp(G::a), ab = grp(G::a, true);
  s.group = zeroMatrix(5);
  s.group[0][0] = a * ab * ab;
  s.group[1][1] = a * a * ab;
  s.group[2][2] = a * ab;
  s.group[3][0] = grp(G::e, true);
  s.group[3][3] = ab;
  s.group[4][1] = grp(G::e);
  s.group[4][4] = a;
  auto p = zeroPattern();
  p[0][0] = mc("beta1") + 2 * mc("betabar1");
  p[1][1] = 2 * mc("beta1") + mc("betabar1");
  p[2][2] = mc("beta1") + mc("betabar1");
  p[3][0] = mc("betabar2");
  p[3][3] = mc("betabar1");
  p[4][1] = mc("beta2");
  p[4][4] = mc("beta1");
  s.pattern = p;
  defineFrom(s, {{"beta1", 4, 4}, {"beta2", 4, 1}});
  return s;
}

Stage stage2() {
  using B = BaseName;
  Stage s = stage1();
  s.name = "final";
  s.base = stageCoframe(2);
  s.fromInitial[3][0] = sym(B::E0, true);
  s.fromInitial[4][1] = sym(B::E0);
  auto a = grp(GroupName::a), ab = grp(GroupName::a, true);
  s.group = zeroMatrix(5);
  s.group[0][0] = a * ab * ab;
  s.group[1][1] = a * a * ab;
  s.group[2][2] = a * ab;
  s.group[3][3] = ab;
  s.group[4][4] = a;
  auto p = zeroPattern();
  p[0][0] = mc("gamma1") + 2 * mc("gammabar1");
  p[1][1] = 2 * mc("gamma1") + mc("gammabar1");
  p[2][2] = mc("gamma1") + mc("gammabar1");
  p[3][3] = mc("gammabar1");
  p[4][4] = mc("gamma1");
  s.pattern = p;
  s.mcDefinitions.clear();
  defineFrom(s, {{"gamma1", 4, 4}});
  return s;
}

StructureRules stageRules(const Stage& s) {
  StructureRules darboux = initialDarboux();
  const Coframe init = stageCoframe(0);
  if (s.base == init) return darboux;
  auto toBase = basisMap(init, invertGroupMatrix(s.fromInitial), s.base);
  StructureRules out;
  for (std::size_t j = 0; j < 5; ++j)
    out[s.base[j]] = changeBasis(exteriorD(combine(s.fromInitial[j], init), darboux), toBase);
  return out;
}

std::vector<TorsionReport> computeTorsion(const Stage& s) {
  const Coframe lifted = liftedCoframe();
  const Coframe init = stageCoframe(0);
  StructureRules rules = stageRules(s);
  auto toLifted = basisMap(s.base, invertGroupMatrix(s.group), lifted);
  std::map<OneForm, FormExpr> initToBase;
  if (!(s.base == init)) initToBase = basisMap(init, invertGroupMatrix(s.fromInitial), s.base);

  std::vector<FormExpr> dBase;
  for (std::size_t j = 0; j < 5; ++j) dBase.push_back(changeBasis(rules.at(s.base[j]), toLifted));

  std::vector<TorsionReport> out;
  for (std::size_t i = 0; i < 5; ++i) {
    TorsionReport r{lifted[i], FormExpr(2), FormExpr(2), FormExpr(2)};
    FormExpr d = exteriorD(combine(s.group[i], s.base), rules);
    if (!initToBase.empty()) d = changeBasis(d, initToBase);
    r.direct = changeBasis(d, toLifted);
    for (std::size_t k = 0; k < 5; ++k)
      if (!s.pattern[i][k].isZero()) r.mcPart += wedge(s.pattern[i][k], FormExpr(lifted[k]));
    for (std::size_t j = 0; j < 5; ++j)
      if (!s.group[i][j].isZero()) r.torsion += s.group[i][j] * dBase[j];
    out.push_back(std::move(r));
  }
  return out;
}

FormExpr reconstructionResidual(const TorsionReport& r, const Stage& s) {
  // The Maurer-Cartan symbols wedge lifted forms; expand the symbols only.
  FormExpr expanded = changeBasis(r.mcPart, s.mcDefinitions);
  return r.direct - expanded - r.torsion;
}

std::vector<std::pair<OneForm, OneForm>> orderedPairs() {
  const Coframe l = liftedCoframe();
  std::vector<std::pair<OneForm, OneForm>> out;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j) out.emplace_back(l[i], l[j]);
  return out;
}

std::map<std::string, ScalarExpr> namedTorsion(const std::vector<TorsionReport>& reports, bool primed) {
  static const std::vector<std::string> xs = {"X1", "X2", "X3", "X4", "X5", "X6", "X7"};
  static const std::vector<std::string> ys = {"Y1",    "Y2",    "Y3", "Y4",   "Ybar2",
                                              "Ybar4", "Ybar3", "Y8", "Ybar8"};
  const auto pairs = orderedPairs();
  auto prime = [&](const std::string& n) {
    if (!primed) return n;
    std::size_t pos = n.find_first_of("0123456789");
    return n.substr(0, pos) + "'" + n.substr(pos);
  };
  auto barred = [](const std::string& n) {
    if (n.starts_with("Ybar")) return "Y" + n.substr(4);
    return n.substr(0, 1) + "bar" + n.substr(1);
  };
  std::map<std::string, ScalarExpr> out;
  for (const auto& r : reports) {
    const std::string& f = r.form.name();
    if (f == "sigma" || f == "sigmabar") {
      for (std::size_t k = 0; k < xs.size(); ++k) {
        auto [x, y] = pairs[k];
        if (f == "sigma") out[prime(xs[k])] = r.coefficient(x, y);
        else out[prime(barred(xs[k]))] = r.coefficient(x.conj(), y.conj());
      }
    } else if (f == "rho") {
      for (std::size_t k = 0; k < ys.size(); ++k) out[prime(ys[k])] = r.coefficient(pairs[k].first, pairs[k].second);
    } else if (f == "zeta" || f == "zetabar") {
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        std::string n = "Z" + std::to_string(k + 1);
        auto [x, y] = pairs[k];
        if (f == "zeta") out[prime(n)] = r.coefficient(x, y);
        else out[prime(barred(n))] = r.coefficient(x.conj(), y.conj());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Absorption
// ---------------------------------------------------------------------------

std::string TorsionComponent::str() const { return "d" + form.name() + "[" + x.name() + "^" + y.name() + "]"; }

std::size_t AbsorptionSystem::componentIndex(OneForm form, OneForm x, OneForm y) const {
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    if (c.form == form && ((c.x == x && c.y == y) || (c.x == y && c.y == x))) return i;
  }
  throw ReduceError("no torsion component d" + form.name() + "[" + x.name() + "^" + y.name() + "]");
}

std::vector<Gaussian> AbsorptionSystem::combination(
    const std::vector<std::pair<TorsionComponent, Gaussian>>& terms) const {
  std::vector<Gaussian> v(components.size());
  for (const auto& [c, g] : terms) {
    std::size_t k = componentIndex(c.form, c.x, c.y);
    // Components are stored with x before y in the wedge order.
    bool swapped = !(components[k].x == c.x);
    v[k] += swapped ? -g : g;
  }
  return v;
}

bool AbsorptionSystem::isEssential(const std::vector<Gaussian>& combination) const {
  GMatrix m = cokernel;
  std::size_t r0 = rank(m);
  m.push_back(combination);
  return rank(m) == r0;
}

ScalarExpr AbsorptionSystem::evaluate(const std::vector<Gaussian>& combination) const {
  ScalarExpr s;
  for (std::size_t k = 0; k < combination.size(); ++k)
    if (!combination[k].isZero()) s += t0[k].scaled(combination[k]);
  return s;
}

AbsorptionSystem absorb(const Stage& s, const std::vector<TorsionReport>& reports,
                        const std::vector<OneForm>& modified, const std::vector<OneForm>& rows) {
  static const char* letters = "ABCDE";
  const Coframe lifted = liftedCoframe();
  const auto pairs = orderedPairs();
  AbsorptionSystem sys;

  // Columns: for each modified symbol m and lifted form theta_j, the torsion
  // shift produced by m -> m + theta_j (and the conjugate modification).
  std::vector<std::vector<FormExpr>> columns;  // per unknown, per row
  for (OneForm m : modified) {
    std::string idx = m.name().substr(m.name().find_first_of("0123456789"));
    for (bool bar : {false, true}) {
      OneForm sym = bar ? m.conj() : m;
      for (std::size_t j = 0; j < 5; ++j) {
        sys.unknowns.push_back(std::string(1, letters[j]) + (bar ? "bar" : "") + idx);
        OneForm theta = bar ? lifted[j].conj() : lifted[j];
        std::vector<FormExpr> col;
        for (OneForm row : rows) {
          std::size_t i = std::find(lifted.begin(), lifted.end(), row) - lifted.begin();
          FormExpr shift(2);
          for (std::size_t k = 0; k < 5; ++k) {
            ScalarExpr kappa = s.pattern[i][k].coefficient({sym});
            if (!kappa.isZero()) shift += wedge(FormExpr(theta, kappa), FormExpr(lifted[k]));
          }
          col.push_back(shift);
        }
        columns.push_back(std::move(col));
      }
    }
  }
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    auto it = std::find_if(reports.begin(), reports.end(), [&](const TorsionReport& r) { return r.form == rows[ri]; });
    if (it == reports.end()) throw ReduceError("no torsion report for " + rows[ri].name());
    for (const auto& [x, y] : pairs) {
      sys.components.push_back({rows[ri], x, y});
      sys.t0.push_back(it->coefficient(x, y));
      std::vector<Gaussian> row;
      for (const auto& col : columns) {
        auto c = col[ri].coefficient({x, y}).constantValue();
        if (!c) throw ReduceError("absorption coefficient is not constant");
        row.push_back(*c);
      }
      sys.matrix.push_back(std::move(row));
    }
  }
  sys.cokernel = leftNullSpace(sys.matrix);
  return sys;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

ScalarExpr applyNormalization(const ScalarExpr& x, const NormalizationMap& n) {
  std::map<Atom, ScalarExpr> m;
  for (const auto& [g, v] : n) {
    m[Atom::group(g)] = v;
    m[Atom::group(g, true)] = conjugate(v);
  }
  return substituteGroup(x, m);
}

NormalizationMap solveNormalizations(const std::vector<std::pair<std::string, ScalarExpr>>& targets,
                                     const std::vector<GroupName>& params) {
  std::map<Atom, ScalarExpr> solved;
  auto subst = [&](const ScalarExpr& x) {
    ScalarExpr cur = x;
    for (int round = 0; round < 16; ++round) {
      ScalarExpr next = substituteGroup(cur, solved);
      if (next == cur) return cur;
      cur = next;
    }
    throw ReduceError("normalization substitution does not settle");
  };
  std::vector<std::pair<std::string, ScalarExpr>> pending = targets;
  while (!pending.empty()) {
    bool progress = false;
    for (auto it = pending.begin(); it != pending.end() && !progress; ++it) {
      ScalarExpr t = subst(it->second);
      if (t.isZero()) {
        pending.erase(it);
        progress = true;
        break;
      }
      for (GroupName g : params) {
        for (bool bar : {false, true}) {
          Atom atom = Atom::group(g, bar);
          if (solved.contains(atom)) continue;
          auto lin = t.linearIn(atom);
          if (!lin || !lin->first.invertible()) continue;
          ScalarExpr value = -(lin->second / lin->first);
          if (value.contains(Atom::group(g, !bar))) continue;
          solved[atom] = value;
          solved[Atom::group(g, !bar)] = conjugate(value);
          pending.erase(it);
          progress = true;
          break;
        }
        if (progress) break;
      }
      if (progress) break;
    }
    if (!progress) {
      std::string names;
      for (const auto& [n, v] : pending) names += " " + n;
      throw ReduceError("unsolvable normalization targets:" + names);
    }
  }
  NormalizationMap out;
  for (GroupName g : params)
    if (auto it = solved.find(Atom::group(g)); it != solved.end()) out[g] = subst(it->second);
  return out;
}

// ---------------------------------------------------------------------------
// Final structure
// ---------------------------------------------------------------------------

ScalarExpr aWeight(OneForm form, OneForm x, OneForm y) {
  auto w = [](OneForm f) -> ScalarExpr {
    auto a = grp(GroupName::a), ab = grp(GroupName::a, true);
    const std::string& n = f.name();
    if (n == "sigma") return a * a * ab;
    if (n == "sigmabar") return a * ab * ab;
    if (n == "rho") return a * ab;
    if (n == "zeta") return a;
    if (n == "zetabar") return ab;
    if (n == "lambda" || n == "lambdabar") return 1;
    throw ReduceError("no weight for " + n);
  };
  return w(form) / (w(x) * w(y));
}

FinalStructure finalStructureEquations(const Stage& s, const std::map<BaseName, ScalarExpr>& abbreviations) {
  std::map<Atom, ScalarExpr> abbr;
  for (const auto& [n, v] : abbreviations) abbr[Atom::base(n)] = v;
  auto expand = [&](const ScalarExpr& x) { return abbr.empty() ? x : substituteBase(x, abbr); };
  const Coframe lifted = liftedCoframe();
  const Coframe init = stageCoframe(0);
  const auto pairs = orderedPairs();
  const OneForm gamma = OneForm::named("gamma1"), gammabar = gamma.conj();
  const OneForm lambda = OneForm::named("lambda"), lambdabar = lambda.conj();
  auto reports = computeTorsion(s);
  for (const auto& r : reports)
    if (!reconstructionResidual(r, s).isZero()) throw ReduceError("final stage does not reconstruct d" + r.form.name());

  // Unknowns 0..4: lambda = gamma1 + sum v_j theta_j; 5..9: the conjugate.
  std::vector<TorsionComponent> comps;
  GMatrix m;
  std::vector<ScalarExpr> t0;
  for (std::size_t i = 0; i < 5; ++i) {
    ScalarExpr kg = s.pattern[i][i].coefficient({gamma}), kgb = s.pattern[i][i].coefficient({gammabar});
    for (const auto& [x, y] : pairs) {
      comps.push_back({lifted[i], x, y});
      t0.push_back(expand(reports[i].coefficient(x, y)));
      std::vector<Gaussian> row(10);
      for (std::size_t j = 0; j < 5; ++j) {
        FormExpr shift = wedge(FormExpr(lifted[j], -kg), FormExpr(lifted[i]));
        row[j] = *shift.coefficient({x, y}).constantValue();
        FormExpr shiftBar = wedge(FormExpr(lifted[j].conj(), -kgb), FormExpr(lifted[i]));
        row[5 + j] = *shiftBar.coefficient({x, y}).constantValue();
      }
      m.push_back(std::move(row));
    }
  }
  auto conjIndex = [&](std::size_t k) {
    const auto& c = comps[k];
    for (std::size_t q = 0; q < comps.size(); ++q)
      if (comps[q].form == c.form.conj() &&
          ((comps[q].x == c.x.conj() && comps[q].y == c.y.conj()) || (comps[q].x == c.y.conj() && comps[q].y == c.x.conj())))
        return q;
    throw ReduceError("no conjugate component for " + c.str());
  };

  FinalStructure out;
  GMatrix sel;
  std::vector<std::size_t> pivots;
  for (std::size_t k = 0; k < comps.size() && sel.size() < 10; ++k) {
    for (std::size_t q : {k, conjIndex(k)}) {
      if (std::find(pivots.begin(), pivots.end(), q) != pivots.end()) continue;
      GMatrix trial = sel;
      trial.push_back(m[q]);
      if (rank(trial) > sel.size()) {
        sel = std::move(trial);
        pivots.push_back(q);
      }
    }
  }
  if (sel.size() != 10) throw ReduceError("last absorption has rank " + std::to_string(sel.size()) + " < 10");
  std::vector<ScalarExpr> rhs;
  for (auto q : pivots) {
    rhs.push_back(-t0[q]);
    out.pivots.push_back(comps[q]);
  }
  auto sol = solveLinear(sel, rhs);
  if (!sol.freeColumns.empty() || !sol.inconsistencies.empty()) throw ReduceError("last absorption is singular");
  for (std::size_t j = 0; j < 5; ++j) {
    out.v[j] = sol.values[j];
    // Unknown 5 + j multiplies conj(theta_j) in lambdabar.
    if (!(sol.values[5 + j] == conjugate(sol.values[j])))
      throw ReduceError("last absorption is not conjugation-symmetric at " + lifted[j].name());
  }

  // lambda and the final equations.
  out.lambda = s.mcDefinitions.at(gamma);
  for (std::size_t j = 0; j < 5; ++j)
    if (!out.v[j].isZero()) out.lambda += FormExpr(lifted[j], out.v[j]);
  std::vector<ScalarExpr> tfinal(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) {
    ScalarExpr t = t0[k];
    for (std::size_t u = 0; u < 10; ++u)
      if (!m[k][u].isZero()) t += sol.values[u].scaled(m[k][u]);
    tfinal[k] = t;
  }
  for (std::size_t i = 0; i < 5; ++i) {
    FormExpr d(2);
    ScalarExpr kg = s.pattern[i][i].coefficient({gamma}), kgb = s.pattern[i][i].coefficient({gammabar});
    if (!kg.isZero()) d += wedge(FormExpr(lambda, kg), FormExpr(lifted[i]));
    if (!kgb.isZero()) d += wedge(FormExpr(lambdabar, kgb), FormExpr(lifted[i]));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const ScalarExpr& c = tfinal[i * pairs.size() + p];
      if (!c.isZero()) d += FormExpr::monomial({pairs[p].first, pairs[p].second}, c);
    }
    out.rules[lifted[i]] = d;
  }

  // d lambda = sum dv_j ^ theta_j + v_j d theta_j, with da, dabar and the
  // initial coframe rewritten in (lambda, lambdabar, lifted).
  ScalarMatrix initToLifted = multiply(invertGroupMatrix(s.fromInitial), invertGroupMatrix(s.group));
  for (auto& row : initToLifted)
    for (auto& e : row) e = expand(e);
  std::map<OneForm, FormExpr> back = basisMap(init, initToLifted, lifted);
  auto a = grp(GroupName::a), ab = grp(GroupName::a, true);
  FormExpr vTheta(1), vThetaBar(1);
  for (std::size_t j = 0; j < 5; ++j) {
    if (!out.v[j].isZero()) vTheta += FormExpr(lifted[j], out.v[j]);
    if (!out.v[j].isZero()) vThetaBar += FormExpr(lifted[j].conj(), conjugate(out.v[j]));
  }
  back[groupDifferential(GroupName::a)] = a * (FormExpr(lambda) - vTheta);
  back[groupDifferential(GroupName::a, true)] = ab * (FormExpr(lambdabar) - vThetaBar);
  FormExpr dl(2);
  for (std::size_t j = 0; j < 5; ++j) {
    if (out.v[j].isZero()) continue;
    dl += wedge(changeBasis(differential(out.v[j]), back), FormExpr(lifted[j]));
    dl += out.v[j] * out.rules.at(lifted[j]);
  }
  out.rules[lambda] = dl;
  out.rules[lambdabar] = conjugate(dl);

  // Invariant table.
  auto record = [&](OneForm form, OneForm x, OneForm y, const ScalarExpr& c) {
    InvariantEntry e{"d" + form.name() + "[" + x.name() + "^" + y.name() + "]", form, x, y, c, aWeight(form, x, y),
                     ScalarExpr(), false};
    e.reduced = c / e.weight;
    e.groupFree = !e.reduced.hasGroup();
    if (!e.groupFree) out.weightFailures.push_back(e.name);
    out.invariants.push_back(std::move(e));
  };
  for (std::size_t k = 0; k < comps.size(); ++k)
    if (!tfinal[k].isZero()) record(comps[k].form, comps[k].x, comps[k].y, tfinal[k]);
  for (const auto& [x, y] : pairs) {
    ScalarExpr c = dl.coefficient({x, y});
    if (!c.isZero()) record(lambda, x, y, c);
  }
  return out;
}

StructureRules flatten(const StructureRules& rules) {
  StructureRules out;
  for (const auto& [f, d] : rules) out[f] = d.mapCoefficients([](const ScalarExpr& c) { return flatten(c); });
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

ScalarExpr expandAbbreviations(const ScalarExpr& x, const ReductionResult& r) {
  std::map<Atom, ScalarExpr> m;
  for (const auto& [n, v] : r.abbreviations) m[Atom::base(n)] = v;
  return substituteBase(x, m);
}

ReductionResult runReduction() {
  using G = GroupName;
  using B = BaseName;
  ReductionResult r;
  r.g = buildInitialGStructure();
  r.ginv = invertGroupMatrix(r.g);
  r.mc = maurerCartan(r.g);

  // Loop 1.
  r.s0 = stage0();
  r.loop1 = computeTorsion(r.s0);
  r.torsion1 = namedTorsion(r.loop1);
  const Coframe l = liftedCoframe();
  r.absorption1 = absorb(r.s0, r.loop1, {OneForm::named("alpha1"), OneForm::named("alpha2")}, {l[0], l[1], l[2]});
  const auto& t = r.torsion1;
  r.targets1 = {{"X2", t.at("X2")}, {"X4", t.at("X4")}, {"Xbar6+X7-3Ybar8", t.at("Xbar6") + t.at("X7") - 3 * t.at("Ybar8")}};
  r.norm1 = solveNormalizations(r.targets1, {G::b, G::c, G::d});
  auto a = grp(G::a), ab = grp(G::a, true);
  r.abbreviations[B::B0] = r.norm1.at(G::b) / a;
  r.abbreviations[B::C0] = r.norm1.at(G::c) / (a * ab);
  r.abbreviations[B::D0] = r.norm1.at(G::d) / ab;

  // Loop 2.
  r.s1 = stage1();
  r.loop2 = computeTorsion(r.s1);
  r.torsion2 = namedTorsion(r.loop2, true);
  r.absorption2 = absorb(r.s1, r.loop2, {OneForm::named("beta1")}, {l[0], l[1], l[2]});
  const Coframe c1 = stageCoframe(1);
  r.tRho1SigmabarZeta = stageRules(r.s1).at(c1[2]).coefficient({c1[0], c1[4]});
  r.norm2 = solveNormalizations({{"Ybar'4", r.torsion2.at("Ybar'4")}}, {G::e});
  r.abbreviations[B::E0] = r.norm2.at(G::e) / a;

  // Final stage.
  r.s2 = stage2();
  r.final = finalStructureEquations(r.s2, r.abbreviations);
  return r;
}

}  // namespace crequiv
