#include "crequiv/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace crequiv {

namespace {

constexpr std::uint64_t kBaseKind = 1;

std::string_view baseNameStr(BaseName n) {
  switch (n) {
    case BaseName::A: return "A";
    case BaseName::B: return "B";
    case BaseName::P: return "P";
    case BaseName::Q: return "Q";
    case BaseName::R: return "R";
    case BaseName::E: return "E";
    case BaseName::F: return "F";
    case BaseName::G: return "G";
    case BaseName::J: return "J";
    case BaseName::K: return "K";
    case BaseName::B0: return "B0";
    case BaseName::C0: return "C0";
    case BaseName::D0: return "D0";
    case BaseName::E0: return "E0";
  }
  return "?";
}

std::string_view groupNameStr(GroupName n) {
  static constexpr std::string_view names[] = {"a", "b", "c", "d", "e"};
  return names[static_cast<int>(n)];
}

}  // namespace

Letter conjugate(Letter l) {
  switch (l) {
    case Letter::L: return Letter::Lbar;
    case Letter::Lbar: return Letter::L;
    case Letter::S: return Letter::Sbar;
    case Letter::Sbar: return Letter::S;
    case Letter::T: return Letter::T;
  }
  return l;
}

std::string_view letterName(Letter l) {
  switch (l) {
    case Letter::L: return "L";
    case Letter::Lbar: return "Lb";
    case Letter::T: return "T";
    case Letter::S: return "S";
    case Letter::Sbar: return "Sb";
  }
  return "?";
}

bool isReal(BaseName n) { return n == BaseName::A || n == BaseName::J; }

bool isCanonical(std::span<const Letter> word) {
  return std::is_sorted(word.begin(), word.end());
}

// ---------------------------------------------------------------------------
// Atom
// ---------------------------------------------------------------------------

Atom Atom::group(GroupName n, bool conj) {
  return Atom((std::uint64_t(n) << 52) | (std::uint64_t(conj) << 51));
}

Atom Atom::base(BaseName n, bool conj, std::span<const Letter> word) {
  if (word.size() > kMaxWord) throw ScalarError("derivation word too long");
  if (isReal(n)) conj = false;
  std::uint64_t k = (kBaseKind << 60) | (std::uint64_t(n) << 52) | (std::uint64_t(conj) << 51) |
                    (std::uint64_t(word.size()) << 47);
  for (std::size_t i = 0; i < word.size(); ++i)
    k |= std::uint64_t(word[i]) << (3 * (kMaxWord - 1 - i));
  return Atom(k);
}

Word Atom::word() const {
  Word w(wordLength());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = static_cast<Letter>((m_key >> (3 * (kMaxWord - 1 - i))) & 7);
  return w;
}

Atom Atom::stem() const {
  if (isGroup()) return *this;
  return base(baseName(), conj());
}

std::string Atom::str() const {
  if (isGroup()) return std::string(groupNameStr(groupName())) + (conj() ? "bar" : "");
  std::string s = std::string(baseNameStr(baseName())) + (conj() ? "bar" : "");
  Word w = word();
  for (auto it = w.rbegin(); it != w.rend(); ++it) s = std::string(letterName(*it)) + "(" + s + ")";
  return s;
}

// ---------------------------------------------------------------------------
// Monomial
// ---------------------------------------------------------------------------

Monomial::Monomial(Atom a, int e) {
  if (e != 0) m_factors.push_back({a, e});
}

int Monomial::degreeIn(Atom a) const {
  for (const auto& f : m_factors)
    if (f.atom == a) return f.exp;
  return 0;
}

bool Monomial::hasGroup() const {
  return std::any_of(m_factors.begin(), m_factors.end(),
                     [](const Factor& f) { return f.atom.isGroup(); });
}

bool Monomial::hasBase() const {
  return std::any_of(m_factors.begin(), m_factors.end(),
                     [](const Factor& f) { return f.atom.isBase(); });
}

bool Monomial::invertible() const {
  return std::all_of(m_factors.begin(), m_factors.end(),
                     [](const Factor& f) { return f.atom.invertible(); });
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  r.m_factors.reserve(m_factors.size() + o.m_factors.size());
  auto i = m_factors.begin(), j = o.m_factors.begin();
  while (i != m_factors.end() && j != o.m_factors.end()) {
    if (i->atom < j->atom) {
      r.m_factors.push_back(*i++);
    } else if (j->atom < i->atom) {
      r.m_factors.push_back(*j++);
    } else {
      int e = i->exp + j->exp;
      if (e != 0) r.m_factors.push_back({i->atom, e});
      ++i;
      ++j;
    }
  }
  r.m_factors.insert(r.m_factors.end(), i, m_factors.end());
  r.m_factors.insert(r.m_factors.end(), j, o.m_factors.end());
  return r;
}

Monomial Monomial::inverse() const {
  if (!invertible()) throw ScalarError("monomial is not invertible: " + str());
  Monomial r = *this;
  for (auto& f : r.m_factors) f.exp = -f.exp;
  return r;
}

Monomial Monomial::without(Atom a) const {
  Monomial r;
  for (const auto& f : m_factors)
    if (f.atom != a) r.m_factors.push_back(f);
  return r;
}

std::string Monomial::str() const {
  std::string s;
  for (const auto& f : m_factors) {
    if (!s.empty()) s += "*";
    s += f.atom.str();
    if (f.exp != 1) s += "^" + std::to_string(f.exp);
  }
  return s.empty() ? "1" : s;
}

// ---------------------------------------------------------------------------
// ScalarExpr
// ---------------------------------------------------------------------------

ScalarExpr::ScalarExpr(Gaussian c) {
  if (!c.isZero()) m_terms.push_back({Monomial(), std::move(c)});
}

ScalarExpr::ScalarExpr(Atom a) { m_terms.push_back({Monomial(a), 1}); }

ScalarExpr::ScalarExpr(Monomial m, Gaussian c) {
  if (!c.isZero()) m_terms.push_back({std::move(m), std::move(c)});
}

void ScalarExpr::normalize() {
  std::sort(m_terms.begin(), m_terms.end(),
            [](const Term& x, const Term& y) { return x.mono < y.mono; });
  std::vector<Term> out;
  out.reserve(m_terms.size());
  for (auto& t : m_terms) {
    if (!out.empty() && out.back().mono == t.mono) {
      out.back().coeff += t.coeff;
    } else {
      if (!out.empty() && out.back().coeff.isZero()) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().coeff.isZero()) out.pop_back();
  m_terms = std::move(out);
}

bool ScalarExpr::isConstant() const {
  return m_terms.empty() || (m_terms.size() == 1 && m_terms[0].mono.isOne());
}

std::optional<Gaussian> ScalarExpr::constantValue() const {
  if (m_terms.empty()) return Gaussian(0);
  if (m_terms.size() == 1 && m_terms[0].mono.isOne()) return m_terms[0].coeff;
  return std::nullopt;
}

bool ScalarExpr::hasGroup() const {
  return std::any_of(m_terms.begin(), m_terms.end(),
                     [](const Term& t) { return t.mono.hasGroup(); });
}

bool ScalarExpr::hasBase() const {
  return std::any_of(m_terms.begin(), m_terms.end(),
                     [](const Term& t) { return t.mono.hasBase(); });
}

bool ScalarExpr::contains(Atom a) const {
  return std::any_of(m_terms.begin(), m_terms.end(),
                     [&](const Term& t) { return t.mono.degreeIn(a) != 0; });
}

bool ScalarExpr::invertible() const {
  return m_terms.size() == 1 && m_terms[0].mono.invertible();
}

ScalarExpr& ScalarExpr::operator+=(const ScalarExpr& o) {
  if (o.m_terms.empty()) return *this;
  std::vector<Term> out;
  out.reserve(m_terms.size() + o.m_terms.size());
  auto i = m_terms.begin();
  auto j = o.m_terms.begin();
  while (i != m_terms.end() && j != o.m_terms.end()) {
    if (i->mono < j->mono) {
      out.push_back(std::move(*i++));
    } else if (j->mono < i->mono) {
      out.push_back(*j++);
    } else {
      Gaussian c = i->coeff + j->coeff;
      if (!c.isZero()) out.push_back({std::move(i->mono), std::move(c)});
      ++i;
      ++j;
    }
  }
  for (; i != m_terms.end(); ++i) out.push_back(std::move(*i));
  for (; j != o.m_terms.end(); ++j) out.push_back(*j);
  m_terms = std::move(out);
  return *this;
}

ScalarExpr& ScalarExpr::operator-=(const ScalarExpr& o) { return *this += -o; }

ScalarExpr operator*(const ScalarExpr& x, const ScalarExpr& y) {
  ScalarExpr r;
  if (x.m_terms.empty() || y.m_terms.empty()) return r;
  r.m_terms.reserve(x.m_terms.size() * y.m_terms.size());
  for (const auto& s : x.m_terms)
    for (const auto& t : y.m_terms) r.m_terms.push_back({s.mono * t.mono, s.coeff * t.coeff});
  r.normalize();
  return r;
}

ScalarExpr ScalarExpr::operator-() const { return scaled(Gaussian(-1)); }

ScalarExpr ScalarExpr::scaled(const Gaussian& c) const {
  if (c.isZero()) return {};
  ScalarExpr r = *this;
  for (auto& t : r.m_terms) t.coeff *= c;
  return r;
}

ScalarExpr ScalarExpr::inverse() const {
  if (!invertible()) throw ScalarError("expression is not invertible: " + str());
  return ScalarExpr(m_terms[0].mono.inverse(), m_terms[0].coeff.inverse());
}

ScalarExpr ScalarExpr::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  if (invertible() || m_terms.size() == 1) {
    if (m_terms.empty()) return n == 0 ? ScalarExpr(1) : ScalarExpr();
    Monomial m;
    for (auto f : m_terms[0].mono.factors()) {
      f.exp *= n;
      m = m * Monomial(f.atom, f.exp);
    }
    Gaussian c = 1;
    for (int k = 0; k < n; ++k) c *= m_terms[0].coeff;
    return ScalarExpr(m, c);
  }
  ScalarExpr r(1), base = *this;
  while (n > 0) {
    if (n & 1) r *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return r;
}

ScalarExpr ScalarExpr::partial(Atom g) const {
  ScalarExpr r;
  for (const auto& t : m_terms) {
    int e = t.mono.degreeIn(g);
    if (e == 0) continue;
    r.m_terms.push_back({t.mono * Monomial(g, -1), t.coeff * Gaussian(e)});
  }
  r.normalize();
  return r;
}

std::optional<std::pair<ScalarExpr, ScalarExpr>> ScalarExpr::linearIn(Atom a) const {
  ScalarExpr coeff, rest;
  for (const auto& t : m_terms) {
    int e = t.mono.degreeIn(a);
    if (e == 0)
      rest.m_terms.push_back(t);
    else if (e == 1)
      coeff.m_terms.push_back({t.mono.without(a), t.coeff});
    else
      return std::nullopt;
  }
  coeff.normalize();
  rest.normalize();
  return std::make_pair(coeff, rest);
}

std::map<Monomial, ScalarExpr> ScalarExpr::byGroupMonomial() const {
  std::map<Monomial, ScalarExpr> out;
  for (const auto& t : m_terms) {
    Monomial g, b;
    for (const auto& f : t.mono.factors()) {
      if (f.atom.isGroup())
        g.m_factors.push_back(f);
      else
        b.m_factors.push_back(f);
    }
    out[g] += ScalarExpr(b, t.coeff);
  }
  return out;
}

std::string ScalarExpr::str() const {
  if (m_terms.empty()) return "0";
  std::string s;
  for (const auto& t : m_terms) {
    std::string piece;
    if (t.mono.isOne())
      piece = t.coeff.str();
    else if (t.coeff.isOne())
      piece = t.mono.str();
    else if (t.coeff == Gaussian(-1))
      piece = "-" + t.mono.str();
    else
      piece = t.coeff.str() + "*" + t.mono.str();
    if (s.empty())
      s = piece;
    else if (piece[0] == '-')
      s += " - " + piece.substr(1);
    else
      s += " + " + piece;
  }
  return s;
}

namespace {

std::string atomLatex(Atom a) {
  std::string core;
  if (a.isGroup()) {
    core = std::string(groupNameStr(a.groupName()));
  } else {
    core = std::string(baseNameStr(a.baseName()));
    if (core.size() == 2) core = std::string("\\mathbf{") + core[0] + "}_{" + core[1] + "}";
  }
  if (a.conj()) core = "\\overline{" + core + "}";
  if (a.isBase()) {
    Word w = a.word();
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      std::string l;
      switch (*it) {
        case Letter::L: l = "\\mathcal{L}"; break;
        case Letter::Lbar: l = "\\overline{\\mathcal{L}}"; break;
        case Letter::T: l = "\\mathcal{T}"; break;
        case Letter::S: l = "\\mathcal{S}"; break;
        case Letter::Sbar: l = "\\overline{\\mathcal{S}}"; break;
      }
      core = l + "(" + core + ")";
    }
  }
  return core;
}

std::string gaussianLatex(const Gaussian& g) {
  auto q = [](const mpq_class& v) {
    mpq_class a = abs(v);
    if (a.get_den() == 1) return a.get_num().get_str();
    return "\\frac{" + a.get_num().get_str() + "}{" + a.get_den().get_str() + "}";
  };
  if (g.isReal()) return (sgn(g.re()) < 0 ? "-" : "") + q(g.re());
  std::string im = (g.im() == 1 || g.im() == -1) ? "" : q(g.im());
  std::string ims = (sgn(g.im()) < 0 ? "-" : "") + im + "\\sqrt{-1}";
  if (sgn(g.re()) == 0) return ims;
  return "(" + std::string(sgn(g.re()) < 0 ? "-" : "") + q(g.re()) +
         (sgn(g.im()) < 0 ? "" : "+") + ims + ")";
}

}  // namespace

std::string ScalarExpr::latex() const {
  if (m_terms.empty()) return "0";
  std::string s;
  for (const auto& t : m_terms) {
    std::string num, den;
    for (const auto& f : t.mono.factors()) {
      std::string base = atomLatex(f.atom);
      int e = f.exp < 0 ? -f.exp : f.exp;
      std::string p = e == 1 ? base : base + "^{" + std::to_string(e) + "}";
      (f.exp < 0 ? den : num) += p;
    }
    std::string c = gaussianLatex(t.coeff);
    bool neg = !c.empty() && c[0] == '-';
    if (neg) c = c.substr(1);
    std::string body;
    if (num.empty() && den.empty())
      body = c;
    else {
      std::string cm = (c == "1") ? "" : c;
      body = cm + (num.empty() ? (cm.empty() ? "1" : "") : num);
      if (!den.empty()) body = "\\frac{" + body + "}{" + den + "}";
    }
    if (s.empty())
      s = (neg ? "-" : "") + body;
    else
      s += (neg ? " - " : " + ") + body;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Frame derivations
// ---------------------------------------------------------------------------

namespace {

ScalarExpr sym(BaseName n, bool conj = false) { return ScalarExpr(Atom::base(n, conj)); }

// Frame brackets as listed with the structure functions, each pair in one
// orientation only. Read off from the initial structure equations with
// d(w)(X, Y) = -w([X, Y]).
std::optional<std::vector<std::pair<ScalarExpr, Letter>>> listedBracket(Letter x, Letter y) {
  using L = Letter;
  const ScalarExpr I = ScalarExpr::i();
  auto is = [&](L a, L b) { return x == a && y == b; };
  if (is(L::L, L::Lbar)) return {{{-I, L::T}}};
  if (is(L::L, L::T)) return {{{1, L::S}}};
  if (is(L::Lbar, L::T)) return {{{1, L::Sbar}}};
  if (is(L::L, L::S))
    return {{{sym(BaseName::P), L::T}, {sym(BaseName::Q), L::S}, {sym(BaseName::R), L::Sbar}}};
  if (is(L::L, L::Sbar) || is(L::Lbar, L::S))
    return {{{sym(BaseName::A), L::T},
             {sym(BaseName::B), L::S},
             {sym(BaseName::B, true), L::Sbar}}};
  if (is(L::Lbar, L::Sbar))
    return {{{sym(BaseName::P, true), L::T},
             {sym(BaseName::R, true), L::S},
             {sym(BaseName::Q, true), L::Sbar}}};
  if (is(L::T, L::S))
    return {{{sym(BaseName::E), L::T}, {sym(BaseName::F), L::S}, {sym(BaseName::G), L::Sbar}}};
  if (is(L::T, L::Sbar))
    return {{{sym(BaseName::E, true), L::T},
             {sym(BaseName::G, true), L::S},
             {sym(BaseName::F, true), L::Sbar}}};
  if (is(L::S, L::Sbar))
    return {{{I * sym(BaseName::J), L::T},
             {sym(BaseName::K), L::S},
             {-sym(BaseName::K, true), L::Sbar}}};
  return std::nullopt;
}

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
    return std::hash<std::uint64_t>()(p.first * 0x9E3779B97F4A7C15ull ^ p.second);
  }
};

ScalarExpr applyLetter(Letter x, Atom a);

ScalarExpr applyLetterUncached(Letter x, Atom a) {
  Word w = a.word();
  if (w.empty() || x <= w.front()) {
    w.insert(w.begin(), x);
    return ScalarExpr(Atom::base(a.baseName(), a.conj(), w));
  }
  Letter y = w.front();
  Word rest(w.begin() + 1, w.end());
  Atom inner = Atom::base(a.baseName(), a.conj(), rest);
  // x(y(g)) = y(x(g)) + [x, y](g)
  ScalarExpr r = derive(applyLetter(x, inner), y);
  for (const auto& [c, z] : frameBracket(x, y)) r += c * applyLetter(z, inner);
  return r;
}

ScalarExpr applyLetter(Letter x, Atom a) {
  thread_local std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, ScalarExpr, PairHash>
      cache;
  auto key = std::make_pair(std::uint64_t(x), a.key());
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  ScalarExpr r = applyLetterUncached(x, a);
  cache.emplace(key, r);
  return r;
}

ScalarExpr conjugateAtom(Atom a) {
  if (a.isGroup()) return Atom::group(a.groupName(), !a.conj());
  thread_local std::unordered_map<std::uint64_t, ScalarExpr> cache;
  if (auto it = cache.find(a.key()); it != cache.end()) return it->second;
  Word w = a.word();
  for (auto& l : w) l = conjugate(l);
  ScalarExpr r = reorderDerivations(w, a.baseName(), !a.conj());
  cache.emplace(a.key(), r);
  return r;
}

}  // namespace

std::vector<std::pair<ScalarExpr, Letter>> frameBracket(Letter x, Letter y) {
  if (x == y) return {};
  if (auto r = listedBracket(x, y)) return *r;
  if (auto r = listedBracket(y, x)) {
    for (auto& [c, z] : *r) c = -c;
    return *r;
  }
  throw ScalarError("no frame relation for [" + std::string(letterName(x)) + ", " +
                    std::string(letterName(y)) + "]");
}

std::vector<std::pair<Letter, Letter>> missingFrameRelations() {
  std::vector<std::pair<Letter, Letter>> missing;
  for (std::size_t i = 0; i < std::size(kLetters); ++i)
    for (std::size_t j = i + 1; j < std::size(kLetters); ++j)
      if (!listedBracket(kLetters[i], kLetters[j]) && !listedBracket(kLetters[j], kLetters[i]))
        missing.emplace_back(kLetters[i], kLetters[j]);
  return missing;
}

ScalarExpr derive(const ScalarExpr& x, Letter dir) {
  ScalarExpr r;
  for (const auto& t : x.terms()) {
    for (const auto& f : t.mono.factors()) {
      if (f.atom.isGroup()) continue;
      ScalarExpr rest(t.mono * Monomial(f.atom, -1), t.coeff * Gaussian(f.exp));
      r += rest * applyLetter(dir, f.atom);
    }
  }
  return r;
}

ScalarExpr applyWord(std::span<const Letter> word, const ScalarExpr& x) {
  ScalarExpr r = x;
  for (auto it = word.rbegin(); it != word.rend(); ++it) r = derive(r, *it);
  return r;
}

ScalarExpr reorderDerivations(std::span<const Letter> word, BaseName s, bool conj) {
  return applyWord(word, ScalarExpr(Atom::base(s, conj)));
}

ScalarExpr conjugate(const ScalarExpr& x) {
  ScalarExpr r;
  for (const auto& t : x.terms()) {
    ScalarExpr piece(t.coeff.conj());
    for (const auto& f : t.mono.factors()) piece *= conjugateAtom(f.atom).pow(f.exp);
    r += piece;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Operator normal ordering (confluence audit)
// ---------------------------------------------------------------------------

namespace {

void addTo(OperatorPoly& p, const Word& w, const ScalarExpr& c) {
  if (c.isZero()) return;
  auto [it, inserted] = p.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second.isZero()) p.erase(it);
  }
}

OperatorPoly composeLetter(Letter x, const OperatorPoly& p) {
  OperatorPoly out;
  for (const auto& [w, g] : p) {
    addTo(out, w, derive(g, x));
    Word xw = w;
    xw.insert(xw.begin(), x);
    addTo(out, xw, g);
  }
  return out;
}

}  // namespace

OperatorPoly normalOrder(std::span<const Letter> word, RewriteStrategy strategy) {
  OperatorPoly cur;
  cur[Word(word.begin(), word.end())] = ScalarExpr(1);
  for (;;) {
    auto it = std::find_if(cur.begin(), cur.end(),
                           [](const auto& kv) { return !isCanonical(kv.first); });
    if (it == cur.end()) return cur;
    Word w = it->first;
    ScalarExpr g = it->second;
    cur.erase(it);
    std::size_t pos = w.size();
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] > w[i + 1]) {
        pos = i;
        if (strategy == RewriteStrategy::LeftmostInversion) break;
      }
    }
    Word swapped = w;
    std::swap(swapped[pos], swapped[pos + 1]);
    addTo(cur, swapped, g);
    Word prefix(w.begin(), w.begin() + pos);
    Word suffix(w.begin() + pos + 2, w.end());
    for (const auto& [c, z] : frameBracket(w[pos], w[pos + 1])) {
      Word zs = suffix;
      zs.insert(zs.begin(), z);
      OperatorPoly piece{{zs, c}};
      for (auto l = prefix.rbegin(); l != prefix.rend(); ++l) piece = composeLetter(*l, piece);
      for (const auto& [pw, pc] : piece) addTo(cur, pw, g * pc);
    }
  }
}

ScalarExpr applyOperator(const OperatorPoly& op, BaseName s, bool conj) {
  ScalarExpr r;
  for (const auto& [w, g] : op) r += g * reorderDerivations(w, s, conj);
  return r;
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

ScalarExpr substituteGroup(const ScalarExpr& x, const std::map<Atom, ScalarExpr>& map) {
  for (const auto& [k, v] : map)
    if (k.invertible() && !v.invertible())
      throw ScalarError("cannot substitute non-invertible expression " + v.str() + " for " +
                        k.str());
  ScalarExpr r;
  for (const auto& t : x.terms()) {
    ScalarExpr piece(t.coeff);
    Monomial keep;
    for (const auto& f : t.mono.factors()) {
      auto it = map.find(f.atom);
      if (it == map.end())
        keep = keep * Monomial(f.atom, f.exp);
      else
        piece *= it->second.pow(f.exp);
    }
    r += piece * ScalarExpr(keep);
  }
  return r;
}

ScalarExpr rewriteAtoms(const ScalarExpr& x,
                        const std::function<std::optional<ScalarExpr>(Atom)>& rule, int maxRounds) {
  std::unordered_map<std::uint64_t, std::optional<ScalarExpr>> cache;
  auto lookup = [&](Atom a) -> const std::optional<ScalarExpr>& {
    auto it = cache.find(a.key());
    if (it == cache.end()) it = cache.emplace(a.key(), rule(a)).first;
    return it->second;
  };
  ScalarExpr cur = x;
  for (int round = 0; round < maxRounds; ++round) {
    bool touched = false;
    ScalarExpr next;
    for (const auto& t : cur.terms()) {
      ScalarExpr piece(t.coeff);
      Monomial keep;
      for (const auto& f : t.mono.factors()) {
        const auto& r = lookup(f.atom);
        if (!r) {
          keep = keep * Monomial(f.atom, f.exp);
          continue;
        }
        touched = true;
        piece *= r->pow(f.exp);
      }
      next += piece * ScalarExpr(keep);
    }
    cur = std::move(next);
    if (!touched) return cur;
  }
  throw ScalarError("atom rewriting did not reach a fixed point");
}

ScalarExpr substituteBase(const ScalarExpr& x, const std::map<Atom, ScalarExpr>& m,
                          int maxRounds) {
  std::map<Atom, ScalarExpr> map = m;
  for (const auto& [k, v] : m) {
    Atom ck = Atom::base(k.baseName(), !k.conj());
    if (ck != k && !map.contains(ck)) map.emplace(ck, conjugate(v));
  }
  return rewriteAtoms(
      x,
      [&](Atom a) -> std::optional<ScalarExpr> {
        if (!a.isBase()) return std::nullopt;
        auto it = map.find(a.stem());
        if (it == map.end()) return std::nullopt;
        return applyWord(a.word(), it->second);
      },
      maxRounds);
}

ScalarExpr flatten(const ScalarExpr& x) {
  ScalarExpr r;
  for (const auto& t : x.terms())
    if (!t.mono.hasBase()) r += ScalarExpr(t.mono, t.coeff);
  return r;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
  explicit Parser(std::string_view s) : m_s(s) {}

  ScalarExpr parseAll() {
    ScalarExpr e = expr();
    skip();
    if (m_p != m_s.size()) fail("trailing input");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& what) {
    throw ScalarError("parse error at " + std::to_string(m_p) + " in '" + std::string(m_s) +
                      "': " + what);
  }
  void skip() {
    while (m_p < m_s.size() && std::isspace(static_cast<unsigned char>(m_s[m_p]))) ++m_p;
  }
  bool eat(char c) {
    skip();
    if (m_p < m_s.size() && m_s[m_p] == c) {
      ++m_p;
      return true;
    }
    return false;
  }

  ScalarExpr expr() {
    ScalarExpr r = term();
    for (;;) {
      if (eat('+'))
        r += term();
      else if (eat('-'))
        r -= term();
      else
        return r;
    }
  }
  ScalarExpr term() {
    ScalarExpr r = unary();
    for (;;) {
      if (eat('*')) {
        r *= unary();
      } else if (eat('/')) {
        ScalarExpr d = unary();
        auto c = d.constantValue();
        r = c ? r.scaled(c->inverse()) : r * d.inverse();
      } else {
        return r;
      }
    }
  }
  ScalarExpr unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  ScalarExpr power() {
    ScalarExpr b = primary();
    if (eat('^')) {
      bool paren = eat('(');
      bool neg = eat('-');
      skip();
      std::size_t st = m_p;
      while (m_p < m_s.size() && std::isdigit(static_cast<unsigned char>(m_s[m_p]))) ++m_p;
      if (st == m_p) fail("expected exponent");
      int e = std::stoi(std::string(m_s.substr(st, m_p - st)));
      if (paren && !eat(')')) fail("expected ')'");
      b = b.pow(neg ? -e : e);
    }
    return b;
  }
  ScalarExpr primary() {
    skip();
    if (m_p >= m_s.size()) fail("unexpected end");
    char c = m_s[m_p];
    if (c == '(') {
      ++m_p;
      ScalarExpr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t st = m_p;
      while (m_p < m_s.size() && std::isdigit(static_cast<unsigned char>(m_s[m_p]))) ++m_p;
      return ScalarExpr(Gaussian(mpq_class(std::string(m_s.substr(st, m_p - st)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t st = m_p;
      while (m_p < m_s.size() && std::isalnum(static_cast<unsigned char>(m_s[m_p]))) ++m_p;
      std::string id(m_s.substr(st, m_p - st));
      return identifier(id);
    }
    fail(std::string("unexpected '") + c + "'");
  }
  ScalarExpr identifier(const std::string& id) {
    if (id == "I") return ScalarExpr::i();
    static const std::map<std::string, Letter> letters = {
        {"L", Letter::L}, {"Lb", Letter::Lbar}, {"T", Letter::T}, {"S", Letter::S},
        {"Sb", Letter::Sbar}};
    if (auto it = letters.find(id); it != letters.end()) {
      skip();
      if (m_p < m_s.size() && m_s[m_p] == '(') {
        ++m_p;
        ScalarExpr inner = expr();
        if (!eat(')')) fail("expected ')'");
        return derive(inner, it->second);
      }
    }
    std::string name = id;
    bool conj = false;
    if (name.size() > 3 && name.ends_with("bar")) {
      conj = true;
      name.resize(name.size() - 3);
    }
    static const std::map<std::string, GroupName> groups = {{"a", GroupName::a},
                                                            {"b", GroupName::b},
                                                            {"c", GroupName::c},
                                                            {"d", GroupName::d},
                                                            {"e", GroupName::e}};
    if (auto it = groups.find(name); it != groups.end()) return Atom::group(it->second, conj);
    static const std::map<std::string, BaseName> bases = {
        {"A", BaseName::A},   {"B", BaseName::B},   {"P", BaseName::P},   {"Q", BaseName::Q},
        {"R", BaseName::R},   {"E", BaseName::E},   {"F", BaseName::F},   {"G", BaseName::G},
        {"J", BaseName::J},   {"K", BaseName::K},   {"B0", BaseName::B0}, {"C0", BaseName::C0},
        {"D0", BaseName::D0}, {"E0", BaseName::E0}};
    if (auto it = bases.find(name); it != bases.end()) {
      if (conj && isReal(it->second)) return conjugate(ScalarExpr(Atom::base(it->second)));
      return Atom::base(it->second, conj);
    }
    fail("unknown identifier '" + id + "'");
  }

  std::string_view m_s;
  std::size_t m_p = 0;
};

}  // namespace

ScalarExpr ScalarExpr::parse(std::string_view text) { return Parser(text).parseAll(); }

}  // namespace crequiv
