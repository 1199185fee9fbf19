#include "crequiv/vecfield.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>

namespace crequiv {

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

Poly Poly::constant(std::size_t nvars, const Gaussian& c) {
  Poly p(nvars);
  p.add(Exponents(nvars), c);
  return p;
}

Poly Poly::var(std::size_t nvars, std::size_t i) {
  Poly p(nvars);
  Exponents e(nvars);
  e.at(i) = 1;
  p.add(e, 1);
  return p;
}

void Poly::add(const Exponents& e, const Gaussian& c) {
  if (c.isZero()) return;
  auto [it, fresh] = m_terms.try_emplace(e, c);
  if (!fresh) {
    it->second += c;
    if (it->second.isZero()) m_terms.erase(it);
  }
}

std::size_t Poly::totalDegree() const {
  std::size_t d = 0;
  for (const auto& [e, c] : m_terms) {
    std::size_t s = 0;
    for (auto k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

Poly& Poly::operator+=(const Poly& o) {
  if (m_n != o.m_n) throw VecFieldError("polynomials live in different rings");
  for (const auto& [e, c] : o.m_terms) add(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) { return *this += -o; }

Poly Poly::operator-() const {
  Poly p(m_n);
  for (const auto& [e, c] : m_terms) p.m_terms.emplace(e, -c);
  return p;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.m_n != b.m_n) throw VecFieldError("polynomials live in different rings");
  Poly p(a.m_n);
  for (const auto& [ea, ca] : a.m_terms)
    for (const auto& [eb, cb] : b.m_terms) {
      Poly::Exponents e(ea);
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      p.add(e, ca * cb);
    }
  return p;
}

Poly operator*(const Gaussian& c, const Poly& p) {
  Poly out(p.m_n);
  for (const auto& [e, x] : p.m_terms) out.add(e, c * x);
  return out;
}

Poly Poly::pow(unsigned k) const {
  Poly out = constant(m_n, 1);
  for (unsigned i = 0; i < k; ++i) out = out * *this;
  return out;
}

Poly Poly::derivative(std::size_t i) const {
  Poly p(m_n);
  for (const auto& [e, c] : m_terms) {
    if (e.at(i) == 0) continue;
    Exponents f(e);
    --f[i];
    p.add(f, c * Gaussian(static_cast<long>(e[i])));
  }
  return p;
}

Gaussian Poly::evaluate(const std::vector<Gaussian>& point) const {
  if (point.size() != m_n) throw VecFieldError("point has wrong dimension");
  Gaussian sum;
  for (const auto& [e, c] : m_terms) {
    Gaussian t = c;
    for (std::size_t i = 0; i < m_n; ++i)
      for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
    sum += t;
  }
  return sum;
}

Poly Poly::substitute(const std::vector<Poly>& images) const {
  if (images.size() != m_n) throw VecFieldError("substitution has wrong arity");
  std::size_t target = images.empty() ? 0 : images.front().nvars();
  Poly out(target);
  for (const auto& [e, c] : m_terms) {
    Poly t = constant(target, c);
    for (std::size_t i = 0; i < m_n; ++i)
      if (e[i]) t = t * images[i].pow(e[i]);
    out += t;
  }
  return out;
}

Poly Poly::conjCoefficients() const {
  Poly p(m_n);
  for (const auto& [e, c] : m_terms) p.m_terms.emplace(e, c.conj());
  return p;
}

std::string Poly::str(const std::vector<std::string>& vars) const {
  if (m_terms.empty()) return "0";
  std::string out;
  // Highest total degree first, then reverse lexicographic exponents.
  std::vector<std::pair<Exponents, Gaussian>> ts(m_terms.rbegin(), m_terms.rend());
  for (const auto& [e, c] : ts) {
    std::string mono;
    for (std::size_t i = 0; i < m_n; ++i) {
      if (!e[i]) continue;
      if (!mono.empty()) mono += "*";
      mono += vars.at(i);
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    std::string cs = c.str();
    bool neg = !cs.empty() && cs[0] == '-';
    if (neg) cs.erase(0, 1);
    std::string body = mono.empty() ? cs : (cs == "1" ? mono : cs + "*" + mono);
    if (out.empty()) out = neg ? "-" + body : body;
    else out += (neg ? " - " : " + ") + body;
  }
  return out;
}

namespace {

class PolyParser {
public:
  PolyParser(std::string_view s, const std::vector<std::string>& vars) : m_s(s), m_vars(vars) {}

  Poly run() {
    Poly p = sum();
    skip();
    if (m_pos != m_s.size()) fail("unexpected trailing input");
    return p;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw VecFieldError("polynomial parse error at " + std::to_string(m_pos) + ": " + what + " in '" +
                        std::string(m_s) + "'");
  }
  void skip() {
    while (m_pos < m_s.size() && std::isspace(static_cast<unsigned char>(m_s[m_pos]))) ++m_pos;
  }
  bool eat(char c) {
    skip();
    if (m_pos < m_s.size() && m_s[m_pos] == c) {
      ++m_pos;
      return true;
    }
    return false;
  }
  Poly sum() {
    bool neg = eat('-');
    if (!neg) eat('+');
    Poly p = product();
    if (neg) p = -p;
    while (true) {
      if (eat('+')) p += product();
      else if (eat('-')) p -= product();
      else return p;
    }
  }
  Poly product() {
    Poly p = power();
    while (true) {
      if (eat('*')) p = p * power();
      else if (eat('/')) {
        Poly d = power();
        if (d.totalDegree() != 0 || d.isZero()) fail("division by a non-constant");
        p = d.terms().begin()->second.inverse() * p;
      } else break;
    }
    return p;
  }
  Poly power() {
    Poly b = atom();
    if (eat('^')) {
      skip();
      std::size_t start = m_pos;
      while (m_pos < m_s.size() && std::isdigit(static_cast<unsigned char>(m_s[m_pos]))) ++m_pos;
      if (start == m_pos) fail("exponent expected");
      b = b.pow(static_cast<unsigned>(std::stoul(std::string(m_s.substr(start, m_pos - start)))));
    }
    return b;
  }
  Poly atom() {
    skip();
    if (eat('(')) {
      Poly p = sum();
      if (!eat(')')) fail("')' expected");
      return p;
    }
    if (m_pos >= m_s.size()) fail("operand expected");
    if (std::isdigit(static_cast<unsigned char>(m_s[m_pos]))) {
      std::size_t start = m_pos;
      while (m_pos < m_s.size() && std::isdigit(static_cast<unsigned char>(m_s[m_pos]))) ++m_pos;
      return Poly::constant(m_vars.size(), Gaussian(mpq_class(std::string(m_s.substr(start, m_pos - start)))));
    }
    std::size_t start = m_pos;
    while (m_pos < m_s.size() && (std::isalnum(static_cast<unsigned char>(m_s[m_pos])) || m_s[m_pos] == '_'))
      ++m_pos;
    std::string id(m_s.substr(start, m_pos - start));
    if (id.empty()) fail("operand expected");
    if (id == "I") return Poly::constant(m_vars.size(), Gaussian::i());
    auto it = std::find(m_vars.begin(), m_vars.end(), id);
    if (it == m_vars.end()) fail("unknown variable '" + id + "'");
    return Poly::var(m_vars.size(), static_cast<std::size_t>(it - m_vars.begin()));
  }

  std::string_view m_s;
  const std::vector<std::string>& m_vars;
  std::size_t m_pos = 0;
};

}  // namespace

Poly Poly::parse(std::string_view text, const std::vector<std::string>& vars) {
  return PolyParser(text, vars).run();
}

// ---------------------------------------------------------------------------
// Charts and fields
// ---------------------------------------------------------------------------

Chart Chart::real() { return {"real", {"z", "zb", "u1", "u2", "u3"}}; }
Chart Chart::holomorphic() { return {"holomorphic", {"z", "w1", "w2", "w3"}}; }

std::size_t Chart::index(const std::string& var) const {
  auto it = std::find(vars.begin(), vars.end(), var);
  if (it == vars.end()) throw VecFieldError("chart " + name + " has no coordinate " + var);
  return static_cast<std::size_t>(it - vars.begin());
}

PolyVectorField::PolyVectorField(Chart chart, std::vector<Poly> components)
    : m_chart(std::move(chart)), m_comp(std::move(components)) {
  if (m_comp.size() != m_chart.vars.size()) throw VecFieldError("one component per coordinate is required");
  for (const auto& c : m_comp)
    if (c.nvars() != m_chart.vars.size()) throw VecFieldError("component ring does not match the chart");
}

PolyVectorField PolyVectorField::parse(const Chart& chart, const std::map<std::string, std::string>& components) {
  std::vector<Poly> comp(chart.vars.size(), Poly(chart.vars.size()));
  for (const auto& [v, text] : components) comp[chart.index(v)] = Poly::parse(text, chart.vars);
  return PolyVectorField(chart, std::move(comp));
}

Poly PolyVectorField::apply(const Poly& f) const {
  Poly out(m_chart.vars.size());
  for (std::size_t i = 0; i < m_comp.size(); ++i)
    if (!m_comp[i].isZero()) out += m_comp[i] * f.derivative(i);
  return out;
}

PolyVectorField PolyVectorField::scaled(const Gaussian& c) const {
  PolyVectorField out = *this;
  for (auto& p : out.m_comp) p = c * p;
  return out;
}

PolyVectorField PolyVectorField::operator+(const PolyVectorField& o) const {
  if (!(m_chart == o.m_chart)) throw VecFieldError("chart mismatch");
  PolyVectorField out = *this;
  for (std::size_t i = 0; i < m_comp.size(); ++i) out.m_comp[i] += o.m_comp[i];
  return out;
}

PolyVectorField PolyVectorField::operator-(const PolyVectorField& o) const { return *this + o.scaled(-1); }

bool PolyVectorField::isZero() const {
  return std::all_of(m_comp.begin(), m_comp.end(), [](const Poly& p) { return p.isZero(); });
}

std::vector<Gaussian> PolyVectorField::at(const std::vector<Gaussian>& point) const {
  std::vector<Gaussian> v;
  for (const auto& c : m_comp) v.push_back(c.evaluate(point));
  return v;
}

PolyVectorField PolyVectorField::conjugateReal() const {
  if (!(m_chart == Chart::real())) throw VecFieldError("conjugateReal needs the real chart");
  const std::size_t n = m_chart.vars.size();
  std::vector<Poly> swap;
  for (std::size_t i = 0; i < n; ++i) swap.push_back(Poly::var(n, i));
  std::swap(swap[0], swap[1]);
  std::vector<Poly> comp;
  for (const auto& c : m_comp) comp.push_back(c.conjCoefficients().substitute(swap));
  std::swap(comp[0], comp[1]);
  return PolyVectorField(m_chart, std::move(comp));
}

std::string PolyVectorField::str() const {
  std::string out;
  for (std::size_t i = 0; i < m_comp.size(); ++i) {
    if (m_comp[i].isZero()) continue;
    if (!out.empty()) out += " + ";
    out += "(" + m_comp[i].str(m_chart.vars) + ")*d/d" + m_chart.vars[i];
  }
  return out.empty() ? "0" : out;
}

PolyVectorField lieBracketVF(const PolyVectorField& x, const PolyVectorField& y) {
  if (!(x.chart() == y.chart()))
    throw VecFieldError("bracket of fields on charts " + x.chart().name + " and " + y.chart().name);
  std::vector<Poly> comp;
  for (std::size_t i = 0; i < x.components().size(); ++i)
    comp.push_back(x.apply(y.components()[i]) - y.apply(x.components()[i]));
  return PolyVectorField(x.chart(), std::move(comp));
}

std::size_t rankAtPoint(const std::vector<PolyVectorField>& fields, const std::vector<Gaussian>& point) {
  GMatrix m;
  for (const auto& f : fields) {
    if (!(f.chart() == fields.front().chart())) throw VecFieldError("rank of fields on different charts");
    m.push_back(f.at(point));
  }
  return rank(m);
}

LieAlgebra commutatorTable(const std::vector<std::pair<std::string, PolyVectorField>>& fields) {
  std::vector<std::string> labels;
  for (const auto& [l, f] : fields) labels.push_back(l);
  LieAlgebra table(labels);
  if (fields.empty()) return table;
  const Chart& chart = fields.front().second.chart();

  // Rows are (component, monomial) pairs of the spanning fields.
  std::vector<std::pair<std::size_t, Poly::Exponents>> rows;
  auto rowsOf = [&](const PolyVectorField& f) {
    for (std::size_t i = 0; i < f.components().size(); ++i)
      for (const auto& [e, c] : f.components()[i].terms()) {
        std::pair<std::size_t, Poly::Exponents> key{i, e};
        if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
      }
  };
  for (const auto& [l, f] : fields) {
    if (!(f.chart() == chart)) throw VecFieldError("commutator table needs a single chart");
    rowsOf(f);
  }
  auto coeff = [](const PolyVectorField& f, const std::pair<std::size_t, Poly::Exponents>& r) {
    const auto& ts = f.components()[r.first].terms();
    auto it = ts.find(r.second);
    return it == ts.end() ? Gaussian() : it->second;
  };

  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = i + 1; j < fields.size(); ++j) {
      PolyVectorField b = lieBracketVF(fields[i].second, fields[j].second);
      GMatrix m;
      std::vector<ScalarExpr> rhs;
      for (const auto& r : rows) {
        std::vector<Gaussian> row;
        for (const auto& [l, f] : fields) row.push_back(coeff(f, r));
        m.push_back(std::move(row));
        rhs.emplace_back(coeff(b, r));
      }
      auto sol = solveLinear(m, rhs);
      LieElement v(fields.size());
      for (std::size_t k = 0; k < fields.size(); ++k) v[k] = *sol.values[k].constantValue();
      PolyVectorField rest = b;
      for (std::size_t k = 0; k < fields.size(); ++k)
        if (!v[k].isZero()) rest = rest - fields[k].second.scaled(v[k]);
      if (!rest.isZero())
        throw VecFieldError("[" + labels[i] + ", " + labels[j] + "] leaves the span; remainder " + rest.str());
      table.setBracket(i, j, v);
    }
  return table;
}

// ---------------------------------------------------------------------------
// Model surface and tangency
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kSurfaceVars = {"z", "zb"};

}  // namespace

ModelSurface ModelSurface::beloshapka() {
  return {{Poly::parse("z*zb", kSurfaceVars), Poly::parse("z^2*zb + z*zb^2", kSurfaceVars),
           Poly::parse("-I*(z^2*zb - z*zb^2)", kSurfaceVars)}};
}

ModelSurface ModelSurface::fromJson(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  auto vars = doc.at("vars").get<std::vector<std::string>>();
  if (vars.size() != 2) throw VecFieldError("model surface needs the two variables (z, zb)");
  ModelSurface m;
  for (const auto& e : doc.at("equations")) m.phi.push_back(Poly::parse(e.get<std::string>(), vars));
  if (m.phi.size() != 3) throw VecFieldError("model surface needs three equations");
  return m;
}

bool ModelSurface::isReal() const {
  std::vector<Poly> swap = {Poly::var(2, 1), Poly::var(2, 0)};
  return std::all_of(phi.begin(), phi.end(),
                     [&](const Poly& p) { return p.conjCoefficients().substitute(swap) == p; });
}

std::vector<Poly> tangencyResidues(const PolyVectorField& x, const ModelSurface& m) {
  if (x.chart() == Chart::real()) return {};
  if (!(x.chart() == Chart::holomorphic())) throw VecFieldError("tangency needs the holomorphic or real chart");
  // Ring: z zb w1 w2 w3 wb1 wb2 wb3 u1 u2 u3.
  const std::size_t n = 11;
  auto v = [&](std::size_t i) { return Poly::var(n, i); };
  std::vector<Poly> holo = {v(0), v(2), v(3), v(4)};
  std::vector<Poly> antiholo = {v(1), v(5), v(6), v(7)};
  const std::size_t slot[] = {0, 2, 3, 4};
  const std::size_t slotBar[] = {1, 5, 6, 7};

  std::vector<Poly> comp(n, Poly(n));
  for (std::size_t i = 0; i < 4; ++i) {
    comp[slot[i]] = x.components()[i].substitute(holo);
    comp[slotBar[i]] = x.components()[i].conjCoefficients().substitute(antiholo);
  }
  Chart big{"ambient", {"z", "zb", "w1", "w2", "w3", "wb1", "wb2", "wb3", "u1", "u2", "u3"}};
  PolyVectorField re(big, comp);

  std::vector<Poly> phiAmb;
  for (const auto& p : m.phi) phiAmb.push_back(p.substitute({v(0), v(1)}));
  // Restriction to M: w_j = u_j + I*phi_j, wb_j = u_j - I*phi_j.
  std::vector<Poly> onM(n, Poly(n));
  for (std::size_t i = 0; i < n; ++i) onM[i] = v(i);
  for (std::size_t j = 0; j < 3; ++j) {
    onM[2 + j] = v(8 + j) + Gaussian::i() * phiAmb[j];
    onM[5 + j] = v(8 + j) - Gaussian::i() * phiAmb[j];
  }
  const Gaussian halfOverI = Gaussian::rational(1, 2) * Gaussian::i().inverse();
  std::vector<Poly> out;
  for (std::size_t j = 0; j < 3; ++j) {
    Poly r = halfOverI * (v(2 + j) - v(5 + j)) - phiAmb[j];
    Poly res = re.apply(r).substitute(onM);
    // Express in (z, zb, u1, u2, u3).
    std::vector<Poly> proj(n, Poly(5));
    proj[0] = Poly::var(5, 0);
    proj[1] = Poly::var(5, 1);
    for (std::size_t k = 0; k < 3; ++k) proj[8 + k] = Poly::var(5, 2 + k);
    for (std::size_t k = 2; k < 8; ++k) proj[k] = Poly(5);
    out.push_back(res.substitute(proj));
  }
  return out;
}

bool checkTangency(const PolyVectorField& x, const ModelSurface& m) {
  auto r = tangencyResidues(x, m);
  return std::all_of(r.begin(), r.end(), [](const Poly& p) { return p.isZero(); });
}

// ---------------------------------------------------------------------------
// Built-in fields
// ---------------------------------------------------------------------------

PolyVectorField modelL() {
  return PolyVectorField::parse(Chart::real(), {{"z", "1"},
                                                {"u1", "I*zb"},
                                                {"u2", "I*(2*z*zb + zb^2)"},
                                                {"u3", "2*z*zb - zb^2"}});
}

std::vector<std::pair<std::string, PolyVectorField>> adaptedFrame() {
  PolyVectorField l = modelL();
  PolyVectorField lb = l.conjugateReal();
  PolyVectorField t = lieBracketVF(l, lb).scaled(Gaussian::i());
  PolyVectorField s = lieBracketVF(l, t);
  PolyVectorField sb = lieBracketVF(lb, t);
  return {{"L", l}, {"Lb", lb}, {"T", t}, {"S", s}, {"Sb", sb}};
}

std::vector<std::pair<std::string, PolyVectorField>> printedFrame() {
  const Chart c = Chart::real();
  return {
      {"L", modelL()},
      {"Lb", PolyVectorField::parse(
                 c, {{"zb", "1"}, {"u1", "-I*z"}, {"u2", "-I*(2*z*zb + z^2)"}, {"u3", "2*z*zb - z^2"}})},
      {"T", PolyVectorField::parse(c, {{"u1", "2"}, {"u2", "4*(z + zb)"}, {"u3", "-4*I*(z - zb)"}})},
      {"S", PolyVectorField::parse(c, {{"u2", "4"}, {"u3", "-4*I"}})},
      {"Sb", PolyVectorField::parse(c, {{"u2", "4"}, {"u3", "4*I"}})},
  };
}

std::vector<std::pair<std::string, PolyVectorField>> automorphismFields() {
  const Chart c = Chart::holomorphic();
  return {
      {"S2", PolyVectorField::parse(c, {{"w3", "1"}})},
      {"S1", PolyVectorField::parse(c, {{"w2", "1"}})},
      {"T", PolyVectorField::parse(c, {{"w1", "1"}})},
      {"L2", PolyVectorField::parse(
                 c, {{"z", "I"}, {"w1", "2*z"}, {"w2", "2*z^2"}, {"w3", "-(2*I*z^2 - 4*w1)"}})},
      {"L1", PolyVectorField::parse(
                 c, {{"z", "1"}, {"w1", "2*I*z"}, {"w2", "2*I*z^2 + 4*w1"}, {"w3", "2*z^2"}})},
      {"D", PolyVectorField::parse(c, {{"z", "z"}, {"w1", "2*w1"}, {"w2", "3*w2"}, {"w3", "3*w3"}})},
      {"R", PolyVectorField::parse(c, {{"z", "I*z"}, {"w2", "-w3"}, {"w3", "w2"}})},
  };
}

}  // namespace crequiv
