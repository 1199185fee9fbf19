#include "crequiv/liealg.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace crequiv {

LieAlgebra::LieAlgebra(std::vector<std::string> labels)
    : m_labels(std::move(labels)), m_c(m_labels.size() * m_labels.size() * m_labels.size()) {}

LieAlgebra LieAlgebra::fromJson(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  auto labels = doc.at("labels").get<std::vector<std::string>>();
  if (doc.contains("dim") && doc.at("dim").get<std::size_t>() != labels.size())
    throw std::invalid_argument("dim does not match the number of labels");
  LieAlgebra l(labels);
  auto coeff = [](const nlohmann::json& v) -> Gaussian {
    if (v.is_number_integer()) return Gaussian(v.get<long>());
    auto c = ScalarExpr::parse(v.get<std::string>()).constantValue();
    if (!c) throw std::invalid_argument("structure constant is not a constant: " + v.dump());
    return *c;
  };
  for (const auto& b : doc.at("brackets")) {
    auto i = b.at(0).get<std::size_t>(), j = b.at(1).get<std::size_t>();
    if (i >= l.dim() || j >= l.dim()) throw std::invalid_argument("bracket index out of range");
    LieElement v(l.dim());
    for (const auto& kc : b.at(2)) {
      auto k = kc.at(0).get<std::size_t>();
      if (k >= l.dim()) throw std::invalid_argument("bracket index out of range");
      v[k] += coeff(kc.at(1));
    }
    l.setBracket(i, j, v);
  }
  if (doc.contains("conjugation")) l.setConjugation(doc.at("conjugation").get<std::vector<std::size_t>>());
  return l;
}

std::size_t LieAlgebra::index(const std::string& label) const {
  auto it = std::find(m_labels.begin(), m_labels.end(), label);
  if (it == m_labels.end()) throw std::out_of_range("unknown basis label " + label);
  return static_cast<std::size_t>(it - m_labels.begin());
}

void LieAlgebra::setBracket(std::size_t i, std::size_t j, const LieElement& value) {
  if (value.size() != dim()) throw std::invalid_argument("element has wrong dimension");
  if (i == j) {
    if (std::any_of(value.begin(), value.end(), [](const Gaussian& g) { return !g.isZero(); }))
      throw std::invalid_argument("[x, x] must vanish");
    return;
  }
  for (std::size_t k = 0; k < dim(); ++k) {
    at(i, j, k) = value[k];
    at(j, i, k) = -value[k];
  }
}

void LieAlgebra::setBracket(const std::string& x, const std::string& y,
                            std::initializer_list<std::pair<std::string, Gaussian>> value) {
  LieElement v(dim());
  for (const auto& [lab, c] : value) v[index(lab)] += c;
  setBracket(index(x), index(y), v);
}

void LieAlgebra::setConjugation(std::vector<std::size_t> partner) {
  if (partner.size() != dim()) throw std::invalid_argument("conjugation has wrong size");
  for (std::size_t i = 0; i < dim(); ++i)
    if (partner[i] >= dim() || partner[partner[i]] != i)
      throw std::invalid_argument("conjugation is not an involution");
  m_conj = std::move(partner);
}

LieElement LieAlgebra::basis(std::size_t i) const {
  LieElement e(dim());
  e.at(i) = 1;
  return e;
}

LieElement LieAlgebra::bracket(std::size_t i, std::size_t j) const {
  LieElement out(dim());
  for (std::size_t k = 0; k < dim(); ++k) out[k] = constant(i, j, k);
  return out;
}

LieElement LieAlgebra::bracket(const LieElement& x, const LieElement& y) const {
  LieElement out(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (x[i].isZero()) continue;
    for (std::size_t j = 0; j < dim(); ++j) {
      if (y[j].isZero() || i == j) continue;
      Gaussian xy = x[i] * y[j];
      for (std::size_t k = 0; k < dim(); ++k)
        if (!constant(i, j, k).isZero()) out[k] += xy * constant(i, j, k);
    }
  }
  return out;
}

std::vector<JacobiViolation> LieAlgebra::jacobiResidual() const {
  std::vector<JacobiViolation> out;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = i + 1; j < dim(); ++j)
      for (std::size_t k = j + 1; k < dim(); ++k) {
        auto ei = basis(i), ej = basis(j), ek = basis(k);
        LieElement r = bracket(ei, bracket(ej, ek));
        auto r2 = bracket(ej, bracket(ek, ei));
        auto r3 = bracket(ek, bracket(ei, ej));
        bool zero = true;
        for (std::size_t q = 0; q < dim(); ++q) {
          r[q] += r2[q] + r3[q];
          zero = zero && r[q].isZero();
        }
        if (!zero) out.push_back({i, j, k, r});
      }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> LieAlgebra::conjugationResidual() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (m_conj.empty()) return out;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = i + 1; j < dim(); ++j)
      for (std::size_t k = 0; k < dim(); ++k)
        if (constant(i, j, k).conj() != constant(m_conj[i], m_conj[j], m_conj[k])) {
          out.emplace_back(i, j);
          break;
        }
  return out;
}

GMatrix LieAlgebra::adMatrix(std::size_t k) const {
  GMatrix m(dim(), std::vector<Gaussian>(dim()));
  for (std::size_t j = 0; j < dim(); ++j)
    for (std::size_t r = 0; r < dim(); ++r) m[r][j] = constant(k, j, r);
  return m;
}

bool LieAlgebra::isSubalgebra(const std::vector<std::size_t>& members) const {
  for (auto i : members)
    for (auto j : members)
      for (std::size_t k = 0; k < dim(); ++k)
        if (!constant(i, j, k).isZero() && std::find(members.begin(), members.end(), k) == members.end())
          return false;
  return true;
}

LieAlgebra LieAlgebra::subalgebra(const std::vector<std::size_t>& members) const {
  if (!isSubalgebra(members)) throw std::invalid_argument("subset is not bracket-closed");
  std::vector<std::string> labels;
  for (auto i : members) labels.push_back(m_labels.at(i));
  LieAlgebra s(labels);
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      LieElement v(members.size());
      for (std::size_t c = 0; c < members.size(); ++c) v[c] = constant(members[a], members[b], members[c]);
      s.setBracket(a, b, v);
    }
  return s;
}

std::string LieAlgebra::elementStr(const LieElement& x) const {
  std::string out;
  for (std::size_t k = 0; k < dim(); ++k) {
    if (x[k].isZero()) continue;
    if (!out.empty()) out += " + ";
    out += x[k].str() + "*" + m_labels[k];
  }
  return out.empty() ? "0" : out;
}

StructureRules mcEquations(const LieAlgebra& l, const std::vector<std::string>& formNames) {
  if (formNames.size() != l.dim()) throw std::invalid_argument("one form name per basis vector is required");
  const auto& pair = l.conjugation();
  std::vector<OneForm> w;
  for (std::size_t i = 0; i < l.dim(); ++i)
    w.push_back(OneForm::declare(formNames[i], Generation::Custom, pair.empty() ? formNames[i] : formNames[pair[i]]));
  StructureRules rules;
  for (std::size_t k = 0; k < l.dim(); ++k) {
    FormExpr dk(2);
    for (std::size_t i = 0; i < l.dim(); ++i)
      for (std::size_t j = i + 1; j < l.dim(); ++j)
        if (!l.constant(i, j, k).isZero()) dk += FormExpr::monomial({w[i], w[j]}, ScalarExpr(-l.constant(i, j, k)));
    rules[w[k]] = dk;
  }
  return rules;
}

FormExpr constantD(const FormExpr& x, const StructureRules& rules) {
  FormExpr out(x.degree() + 1);
  for (const auto& [m, c] : x.terms()) {
    if (!c.isConstant()) throw std::invalid_argument("constantD needs constant coefficients");
    auto fs = m.factors();
    for (std::size_t p = 0; p < fs.size(); ++p) {
      auto it = rules.find(fs[p]);
      if (it == rules.end()) throw ExteriorError("no rule for " + fs[p].name());
      FormExpr left = FormExpr::scalar(c);
      for (std::size_t q = 0; q < p; ++q) left = wedge(left, FormExpr(fs[q]));
      FormExpr term = wedge(left, it->second);
      for (std::size_t q = p + 1; q < fs.size(); ++q) term = wedge(term, FormExpr(fs[q]));
      if (p % 2) out -= term;
      else out += term;
    }
  }
  return out;
}

namespace {

/// Indices of basis vectors that occur in some bracket of the algebra.
std::vector<bool> derivedSupport(const LieAlgebra& l) {
  std::vector<bool> s(l.dim());
  for (std::size_t i = 0; i < l.dim(); ++i)
    for (std::size_t j = 0; j < l.dim(); ++j)
      for (std::size_t k = 0; k < l.dim(); ++k)
        if (!l.constant(i, j, k).isZero()) s[k] = true;
  return s;
}

bool preserves(const LieAlgebra& src, const LieAlgebra& tgt, const IsoWitness& w) {
  for (std::size_t i = 0; i < tgt.dim(); ++i)
    for (std::size_t j = i + 1; j < tgt.dim(); ++j)
      for (std::size_t k = 0; k < tgt.dim(); ++k) {
        Gaussian lhs = w.scale[i] * w.scale[j] * src.constant(w.image[i], w.image[j], w.image[k]);
        Gaussian rhs = tgt.constant(i, j, k) * w.scale[k];
        if (lhs != rhs) return false;
      }
  return true;
}

std::optional<IsoWitness> forcedScales(const LieAlgebra& src, const LieAlgebra& tgt, std::vector<std::size_t> image,
                                       std::vector<std::optional<Gaussian>> scale) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < tgt.dim(); ++i)
      for (std::size_t j = 0; j < tgt.dim(); ++j) {
        if (!scale[i] || !scale[j]) continue;
        for (std::size_t k = 0; k < tgt.dim(); ++k) {
          if (scale[k] || tgt.constant(i, j, k).isZero()) continue;
          Gaussian s = src.constant(image[i], image[j], image[k]);
          if (s.isZero()) return std::nullopt;
          scale[k] = *scale[i] * *scale[j] * s / tgt.constant(i, j, k);
          changed = true;
        }
      }
  }
  IsoWitness w{std::move(image), {}};
  for (auto& s : scale) {
    if (!s) return std::nullopt;
    w.scale.push_back(*s);
  }
  if (!preserves(src, tgt, w)) return std::nullopt;
  return w;
}

}  // namespace

std::optional<IsoWitness> checkNilpotentIso(const LieAlgebra& source, const LieAlgebra& target) {
  if (source.dim() != target.dim()) return std::nullopt;
  const std::size_t n = target.dim();
  auto derived = derivedSupport(target);
  std::vector<std::size_t> generators;
  for (std::size_t i = 0; i < n; ++i)
    if (!derived[i]) generators.push_back(i);
  const Gaussian choices[] = {Gaussian(1), Gaussian(-1), Gaussian::i(), -Gaussian::i()};

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::size_t combos = 1;
    for (std::size_t g = 0; g < generators.size(); ++g) combos *= 4;
    for (std::size_t c = 0; c < combos; ++c) {
      std::vector<std::optional<Gaussian>> scale(n);
      std::size_t code = c;
      for (auto g : generators) {
        scale[g] = choices[code % 4];
        code /= 4;
      }
      if (auto w = forcedScales(source, target, perm, scale)) return w;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

LieAlgebra n54() {
  LieAlgebra l({"x1", "x2", "x3", "x4", "x5"});
  l.setBracket("x1", "x2", {{"x3", 1}});
  l.setBracket("x1", "x3", {{"x4", 1}});
  l.setBracket("x2", "x3", {{"x5", 1}});
  return l;
}

namespace {

const std::vector<std::string> kG7Labels = {"e_alphabar", "e_alpha",   "e_sigmabar", "e_sigma",
                                            "e_rho",      "e_zetabar", "e_zeta"};

LieAlgebra g7Common() {
  LieAlgebra l(kG7Labels);
  l.setBracket("e_alphabar", "e_sigmabar", {{"e_sigmabar", -2}});
  l.setBracket("e_alpha", "e_sigmabar", {{"e_sigmabar", -1}});
  l.setBracket("e_alphabar", "e_sigma", {{"e_sigma", -1}});
  l.setBracket("e_alpha", "e_sigma", {{"e_sigma", -2}});
  l.setBracket("e_rho", "e_zetabar", {{"e_sigmabar", -1}});
  l.setBracket("e_alphabar", "e_rho", {{"e_rho", -1}});
  l.setBracket("e_alpha", "e_rho", {{"e_rho", -1}});
  l.setBracket("e_alphabar", "e_zetabar", {{"e_zetabar", -1}});
  l.setBracket("e_alpha", "e_zeta", {{"e_zeta", -1}});
  l.setConjugation({1, 0, 3, 2, 4, 6, 5});
  return l;
}

}  // namespace

LieAlgebra g7() {
  LieAlgebra l = g7Common();
  l.setBracket("e_rho", "e_zeta", {{"e_sigma", -1}});
  l.setBracket("e_zetabar", "e_zeta", {{"e_rho", Gaussian::i()}});
  return l;
}

LieAlgebra g7Printed() {
  LieAlgebra l = g7Common();
  l.setBracket("e_rho", "e_sigma", {{"e_sigma", -1}});
  l.setBracket("e_zetabar", "e_zeta", {{"e_rho", -Gaussian::i()}});
  return l;
}

LieAlgebra autTable() {
  LieAlgebra l({"S2", "S1", "T", "L2", "L1", "D", "R"});
  l.setBracket("S2", "D", {{"S2", 3}});
  l.setBracket("S2", "R", {{"S1", -1}});
  l.setBracket("S1", "D", {{"S1", 3}});
  l.setBracket("S1", "R", {{"S2", 1}});
  l.setBracket("T", "L2", {{"S2", 4}});
  l.setBracket("T", "L1", {{"S1", 4}});
  l.setBracket("T", "D", {{"T", 2}});
  l.setBracket("L2", "L1", {{"T", -4}});
  l.setBracket("L2", "D", {{"L2", 1}});
  l.setBracket("L2", "R", {{"L1", -1}});
  l.setBracket("L1", "D", {{"L1", 1}});
  l.setBracket("L1", "R", {{"L2", 1}});
  return l;
}

}  // namespace crequiv
