#include "crequiv/linear.hpp"

namespace crequiv {

namespace {

/// Gauss-Jordan in place; applies the same row operations to `aux`.
template <class Aux>
std::vector<std::size_t> reduce(GMatrix& m, std::vector<Aux>& aux) {
  std::vector<std::size_t> pivots;
  std::size_t cols = m.empty() ? 0 : m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c].isZero()) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    std::swap(aux[p], aux[r]);
    Gaussian inv = m[r][c].inverse();
    for (auto& v : m[r]) v *= inv;
    aux[r] = aux[r] * inv;
    for (std::size_t q = 0; q < m.size(); ++q) {
      if (q == r || m[q][c].isZero()) continue;
      Gaussian f = m[q][c];
      for (std::size_t k = c; k < cols; ++k) m[q][k] -= f * m[r][k];
      aux[q] = aux[q] - aux[r] * f;
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

struct Tag {
  friend Tag operator*(Tag, const Gaussian&) { return {}; }
  friend Tag operator-(Tag, Tag) { return {}; }
};

struct SymRow {
  ScalarExpr e;
  friend SymRow operator*(const SymRow& s, const Gaussian& g) { return {s.e.scaled(g)}; }
  friend SymRow operator-(const SymRow& x, const SymRow& y) { return {x.e - y.e}; }
};

struct Row {
  std::vector<Gaussian> v;
  friend Row operator*(const Row& r, const Gaussian& g) {
    Row o = r;
    for (auto& x : o.v) x *= g;
    return o;
  }
  friend Row operator-(const Row& a, const Row& b) {
    Row o = a;
    for (std::size_t i = 0; i < o.v.size(); ++i) o.v[i] -= b.v[i];
    return o;
  }
};

}  // namespace

AffineSolution solveLinear(GMatrix m, std::vector<ScalarExpr> rhs) {
  std::size_t cols = m.empty() ? 0 : m[0].size();
  std::vector<SymRow> aux;
  for (auto& r : rhs) aux.push_back({std::move(r)});
  auto pivots = reduce(m, aux);
  AffineSolution out;
  out.values.assign(cols, ScalarExpr());
  std::vector<bool> isPivot(cols, false);
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    out.values[pivots[i]] = aux[i].e;
    isPivot[pivots[i]] = true;
  }
  for (std::size_t c = 0; c < cols; ++c)
    if (!isPivot[c]) out.freeColumns.push_back(c);
  for (std::size_t i = pivots.size(); i < aux.size(); ++i)
    if (!aux[i].e.isZero()) out.inconsistencies.push_back(aux[i].e);
  return out;
}

std::size_t rank(GMatrix m) {
  std::vector<Tag> aux(m.size());
  return reduce(m, aux).size();
}

GMatrix leftNullSpace(const GMatrix& m) {
  // Reduce [M | I]; rows whose M-part vanishes carry the left kernel.
  std::size_t rows = m.size();
  GMatrix work = m;
  std::vector<Row> aux(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    aux[i].v.assign(rows, Gaussian(0));
    aux[i].v[i] = 1;
  }
  auto pivots = reduce(work, aux);
  GMatrix basis;
  for (std::size_t i = pivots.size(); i < rows; ++i) basis.push_back(aux[i].v);
  std::vector<Tag> tags(basis.size());
  reduce(basis, tags);
  return basis;
}

}  // namespace crequiv
