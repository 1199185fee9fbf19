#include "properties.hpp"

#include <algorithm>

namespace crequiv::proptest {

int RandomExprs::uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(m_rng); }

Gaussian RandomExprs::gaussian() {
  long re = uniform(-3, 3), im = uniform(-2, 2);
  long den = uniform(1, 3);
  Gaussian g(mpq_class(re, den), mpq_class(im, 1));
  return g.isZero() ? Gaussian(1) : g;
}

Letter RandomExprs::letter() { return kLetters[uniform(0, 4)]; }

Word RandomExprs::word(std::size_t maxLength) {
  Word w(static_cast<std::size_t>(uniform(0, static_cast<int>(maxLength))));
  for (auto& l : w) l = letter();
  return w;
}

Atom RandomExprs::atom(std::size_t maxWord) {
  if (uniform(0, 2) == 0) return Atom::group(static_cast<GroupName>(uniform(0, 4)), uniform(0, 1) == 1);
  Word w = word(maxWord);
  std::sort(w.begin(), w.end());
  return Atom::base(kPrimaryBase[uniform(0, 4)], uniform(0, 1) == 1, w);
}

ScalarExpr RandomExprs::scalar(std::size_t maxTerms, std::size_t maxWord) {
  ScalarExpr out;
  const int terms = uniform(1, static_cast<int>(maxTerms));
  for (int t = 0; t < terms; ++t) {
    ScalarExpr term(gaussian());
    const int factors = uniform(0, 3);
    for (int f = 0; f < factors; ++f) {
      Atom x = atom(maxWord);
      term *= x.invertible() ? ScalarExpr(x).pow(uniform(-2, 2)) : ScalarExpr(x);
    }
    out += term;
  }
  return out;
}

ScalarExpr RandomExprs::groupPolynomial(const std::vector<GroupName>& params, std::size_t maxTerms) {
  ScalarExpr out;
  const int terms = uniform(1, static_cast<int>(maxTerms));
  for (int t = 0; t < terms; ++t) {
    ScalarExpr term(gaussian());
    if (uniform(0, 1) == 0) term *= ScalarExpr::base(kPrimaryBase[uniform(0, 4)], uniform(0, 1) == 1);
    for (GroupName g : params)
      for (bool conj : {false, true}) {
        ScalarExpr x = ScalarExpr::group(g, conj);
        term *= g == GroupName::a ? x.pow(uniform(-1, 2)) : x.pow(uniform(0, 1));
      }
    out += term;
  }
  return out;
}

FormExpr RandomExprs::form(int degree, const std::vector<OneForm>& basis, std::size_t maxTerms) {
  if (degree == 0) return FormExpr::scalar(scalar(maxTerms));
  FormExpr out(degree);
  const int terms = uniform(1, static_cast<int>(maxTerms));
  for (int t = 0; t < terms; ++t) {
    std::vector<OneForm> fs;
    for (int k = 0; k < degree; ++k) fs.push_back(basis[static_cast<std::size_t>(uniform(0, static_cast<int>(basis.size()) - 1))]);
    int sign = 0;
    FormMonomial m = FormMonomial::sorted(fs, sign);
    if (sign != 0) out.add(m, scalar(2).scaled(sign));
  }
  return out;
}

namespace {

void record(PropertyResult& r, bool ok, const std::string& what) {
  ++r.instances;
  if (ok) return;
  if (r.failures++ == 0) r.firstFailure = what;
}

std::vector<OneForm> baseBasis() {
  std::vector<OneForm> out;
  for (Letter l : kLetters) out.push_back(baseCoframe(l));
  out.push_back(groupDifferential(GroupName::a));
  out.push_back(groupDifferential(GroupName::b, true));
  return out;
}

FormExpr scale(const ScalarExpr& c, const FormExpr& x) { return c * x; }

}  // namespace

PropertyResult normalFormIdempotence(std::uint64_t seed, std::size_t n) {
  RandomExprs gen(seed);
  PropertyResult r{"normal-form idempotence"};
  for (std::size_t k = 0; k < n; ++k) {
    ScalarExpr x = gen.scalar(4, 2);
    ScalarExpr back = ScalarExpr::parse(x.str());
    bool ok = back == x && ScalarExpr::parse(back.str()) == back && back.str() == x.str() &&
              x + ScalarExpr() == x && x * ScalarExpr(1) == x;
    record(r, ok, x.str() + " reparsed as " + back.str());
  }
  return r;
}

PropertyResult conjugationInvolution(std::uint64_t seed, std::size_t n) {
  RandomExprs gen(seed);
  PropertyResult r{"conjugation involution"};
  for (std::size_t k = 0; k < n; ++k) {
    ScalarExpr x = gen.scalar(3, 2), y = gen.scalar(3, 2);
    bool ok = conjugate(conjugate(x)) == x && conjugate(x * y) == conjugate(x) * conjugate(y) &&
              conjugate(x + y) == conjugate(x) + conjugate(y);
    record(r, ok, "x = " + x.str() + ", y = " + y.str());
  }
  return r;
}

PropertyResult ringAxioms(std::uint64_t seed, std::size_t n) {
  RandomExprs gen(seed);
  PropertyResult r{"ring axioms"};
  for (std::size_t k = 0; k < n; ++k) {
    ScalarExpr x = gen.scalar(), y = gen.scalar(), z = gen.scalar();
    bool ok = (x * y) * z == x * (y * z) && x * (y + z) == x * y + x * z && x * y == y * x &&
              (x + y) + z == x + (y + z) && (x - x).isZero();
    record(r, ok, "x = " + x.str() + ", y = " + y.str() + ", z = " + z.str());
  }
  return r;
}

PropertyResult leibniz(std::uint64_t seed, std::size_t n) {
  RandomExprs gen(seed);
  PropertyResult r{"Leibniz"};
  for (std::size_t k = 0; k < n; ++k) {
    ScalarExpr x = gen.scalar(2), y = gen.scalar(2);
    Letter l = gen.letter();
    ScalarExpr lhs = derive(x * y, l);
    ScalarExpr rhs = derive(x, l) * y + x * derive(y, l);
    bool ok = lhs == rhs && derive(ScalarExpr(gen.gaussian()), l).isZero();
    record(r, ok, std::string(letterName(l)) + " of (" + x.str() + ") * (" + y.str() + ")");
  }
  return r;
}

PropertyResult antiderivation(std::uint64_t seed, std::size_t n) {
  RandomExprs gen(seed);
  PropertyResult r{"antiderivation"};
  const StructureRules rules = initialDarboux();
  const auto basis = baseBasis();
  for (std::size_t k = 0; k < n; ++k) {
    int p = gen.uniform(0, 2);
    int q = gen.uniform(0, 3 - p);
    FormExpr x = gen.form(p, basis, 2), y = gen.form(q, basis, 2);
    FormExpr lhs = exteriorD(wedge(x, y), rules);
    FormExpr rhs = wedge(exteriorD(x, rules), y) + scale(p % 2 == 0 ? 1 : -1, wedge(x, exteriorD(y, rules)));
    record(r, lhs == rhs, "x = " + x.str() + ", y = " + y.str());
  }
  return r;
}

PropertyResult gradedAnticommutativity(std::uint64_t seed, std::size_t n) {
  RandomExprs gen(seed);
  PropertyResult r{"graded anticommutativity"};
  const auto basis = baseBasis();
  for (std::size_t k = 0; k < n; ++k) {
    int p = gen.uniform(0, 2), q = gen.uniform(0, 2);
    int s = gen.uniform(0, std::min(2, 4 - p - q));
    FormExpr x = gen.form(p, basis), y = gen.form(q, basis), z = gen.form(s, basis);
    bool ok = wedge(x, y) == scale((p * q) % 2 == 0 ? 1 : -1, wedge(y, x)) &&
              wedge(wedge(x, y), z) == wedge(x, wedge(y, z));
    if (p % 2 == 1) ok = ok && wedge(x, x).isZero();
    record(r, ok, "x = " + x.str() + ", y = " + y.str() + ", z = " + z.str());
  }
  return r;
}

PropertyResult changeBasisWedge(std::uint64_t seed, std::size_t n) {
  RandomExprs gen(seed);
  PropertyResult r{"changeBasis commutes with wedge"};
  const auto basis = baseBasis();
  const Coframe lifted = liftedCoframe();
  const std::vector<OneForm> target(lifted.begin(), lifted.end());
  for (std::size_t k = 0; k < n; ++k) {
    std::map<OneForm, FormExpr> map;
    for (Letter l : kLetters) map[baseCoframe(l)] = gen.form(1, target, 2);
    int p = gen.uniform(1, 2), q = gen.uniform(0, 2);
    FormExpr x = gen.form(p, basis), y = gen.form(q, basis);
    bool ok = changeBasis(wedge(x, y), map) == wedge(changeBasis(x, map), changeBasis(y, map));
    record(r, ok, "x = " + x.str() + ", y = " + y.str());
  }
  return r;
}

std::vector<Word> allWords(std::size_t maxLength) {
  std::vector<Word> layer = {{}}, out;
  for (std::size_t len = 1; len <= maxLength; ++len) {
    std::vector<Word> next;
    for (const auto& w : layer)
      for (Letter l : kLetters) {
        Word x = w;
        x.push_back(l);
        next.push_back(std::move(x));
      }
    layer = std::move(next);
    if (len >= 2) out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

PropertyResult rewritingConfluence(std::uint64_t seed, std::size_t n) {
  RandomExprs gen(seed);
  PropertyResult r{"rewriting confluence"};
  auto check = [&](const Word& w, BaseName sym, bool conj) {
    ScalarExpr direct = reorderDerivations(w, sym, conj);
    ScalarExpr left = applyOperator(normalOrder(w, RewriteStrategy::LeftmostInversion), sym, conj);
    ScalarExpr right = applyOperator(normalOrder(w, RewriteStrategy::RightmostInversion), sym, conj);
    std::string ws;
    for (Letter l : w) ws += std::string(letterName(l)) + " ";
    record(r, direct == left && left == right, ws + "applied to " + Atom::base(sym, conj).str());
  };
  for (const auto& w : allWords(4)) check(w, BaseName::B, false);
  for (std::size_t k = 0; k < n; ++k) {
    Word w = gen.word(4);
    while (w.size() < 2) w.push_back(gen.letter());
    check(w, kPrimaryBase[gen.uniform(0, 4)], gen.uniform(0, 1) == 1);
  }
  return r;
}

PropertyResult roundTripReconstruction(const Stage& s, const std::vector<GroupName>& params, std::uint64_t seed,
                                       std::size_t n) {
  RandomExprs gen(seed);
  PropertyResult r{"round-trip reconstruction (" + s.name + ")"};
  const Coframe lifted = liftedCoframe();
  const Coframe init = stageCoframe(0);
  const StructureRules rules = stageRules(s);
  const auto reports = computeTorsion(s);

  auto linearMap = [](const Coframe& from, const ScalarMatrix& m, const Coframe& to) {
    std::map<OneForm, FormExpr> out;
    for (std::size_t i = 0; i < 5; ++i) {
      FormExpr x(1);
      for (std::size_t j = 0; j < 5; ++j)
        if (!m[i][j].isZero()) x += FormExpr(to[j], m[i][j]);
      out[from[i]] = x;
    }
    return out;
  };
  const auto toLifted = linearMap(s.base, invertGroupMatrix(s.group), lifted);
  std::map<OneForm, FormExpr> initToBase;
  if (!(s.base == init)) initToBase = linearMap(init, invertGroupMatrix(s.fromInitial), s.base);
  auto overLifted = [&](FormExpr x) {
    if (!initToBase.empty()) x = changeBasis(x, initToBase);
    return changeBasis(x, toLifted);
  };

  std::vector<FormExpr> dLifted;
  for (const auto& t : reports) dLifted.push_back(changeBasis(t.mcPart, s.mcDefinitions) + t.torsion);

  for (std::size_t k = 0; k < n; ++k) {
    std::array<ScalarExpr, 5> f;
    for (auto& x : f)
      if (gen.uniform(0, 3) > 0) x = gen.groupPolynomial(params, 2);
    FormExpr theta(1);
    FormExpr product(2);
    for (std::size_t i = 0; i < 5; ++i) {
      if (f[i].isZero()) continue;
      for (std::size_t j = 0; j < 5; ++j)
        if (!s.group[i][j].isZero()) theta += FormExpr(s.base[j], f[i] * s.group[i][j]);
      product += wedge(overLifted(differential(f[i])), FormExpr(lifted[i])) + f[i] * dLifted[i];
    }
    FormExpr direct = overLifted(exteriorD(theta, rules));
    FormExpr diff = direct - product;
    record(r, diff.isZero(), "residual " + diff.str());
  }
  return r;
}

std::vector<PropertyResult> allProperties(std::uint64_t seed, std::size_t n) {
  using G = GroupName;
  std::vector<PropertyResult> out;
  out.push_back(normalFormIdempotence(seed, n));
  out.push_back(conjugationInvolution(seed + 1, n));
  out.push_back(ringAxioms(seed + 2, n));
  out.push_back(leibniz(seed + 3, n));
  out.push_back(antiderivation(seed + 4, n));
  out.push_back(gradedAnticommutativity(seed + 5, n));
  out.push_back(changeBasisWedge(seed + 6, n));
  out.push_back(rewritingConfluence(seed + 7, n));
  out.push_back(roundTripReconstruction(stage0(), {G::a, G::b, G::c, G::d, G::e}, seed + 8, n));
  out.push_back(roundTripReconstruction(stage1(), {G::a, G::e}, seed + 9, n));
  out.push_back(roundTripReconstruction(stage2(), {G::a}, seed + 10, n));
  return out;
}

}  // namespace crequiv::proptest
