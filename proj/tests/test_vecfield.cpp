#include "crequiv/vecfield.hpp"

#include "printers.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace crequiv;

namespace {

using Fields = std::vector<std::pair<std::string, PolyVectorField>>;

const PolyVectorField& get(const Fields& fs, const std::string& name) {
  for (const auto& [n, f] : fs)
    if (n == name) return f;
  throw std::runtime_error("no field " + name);
}

/// Determinant by fraction-exact elimination.
Gaussian determinant(std::vector<std::vector<Gaussian>> m) {
  const std::size_t n = m.size();
  Gaussian det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c].isZero()) ++p;
    if (p == n) return Gaussian(0);
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      Gaussian f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

/// Bracket recomputed from partial derivatives, for comparison with
/// lieBracketVF.
PolyVectorField bracketByHand(const PolyVectorField& x, const PolyVectorField& y) {
  const std::size_t n = x.components().size();
  std::vector<Poly> out(n, Poly(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      out[i] += x.components()[k] * y.components()[i].derivative(k) -
                y.components()[k] * x.components()[i].derivative(k);
  return PolyVectorField(x.chart(), out);
}

/// 2 Re(X)(v_j - phi_j) at a point of the Beloshapka surface, evaluated
/// exactly; X lives on (z, w1, w2, w3).
std::vector<Gaussian> tangencyAt(const PolyVectorField& x, const Gaussian& z, const std::vector<Gaussian>& u) {
  ModelSurface m = ModelSurface::beloshapka();
  std::vector<Gaussian> zz = {z, z.conj()};
  std::vector<Gaussian> point = {z};
  for (std::size_t j = 0; j < 3; ++j) point.push_back(u[j] + Gaussian::i() * m.phi[j].evaluate(zz));
  std::vector<Gaussian> out;
  Gaussian xz = x.components()[0].evaluate(point);
  for (std::size_t j = 0; j < 3; ++j) {
    Gaussian xw = x.components()[j + 1].evaluate(point);
    Gaussian holo = xw / (Gaussian(2) * Gaussian::i()) - xz * m.phi[j].derivative(0).evaluate(zz);
    out.push_back(Gaussian(2) * Gaussian(holo.re()));
  }
  return out;
}

bool tangentAtSamples(const PolyVectorField& x) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-4, 4);
  for (int s = 0; s < 12; ++s) {
    Gaussian z(mpq_class(d(rng), 3), mpq_class(d(rng), 2));
    std::vector<Gaussian> u = {Gaussian(d(rng)), Gaussian(d(rng)), Gaussian(d(rng))};
    for (const auto& v : tangencyAt(x, z, u))
      if (!v.isZero()) return false;
  }
  return true;
}

}  // namespace

TEST(Poly, ArithmeticAndParse) {
  std::vector<std::string> vars = {"z", "zb"};
  Poly p = Poly::parse("(z + zb)^2 - 2*z*zb", vars);
  EXPECT_EQ(p, Poly::parse("z^2 + zb^2", vars));
  EXPECT_EQ(p.derivative(0), Poly::parse("2*z", vars));
  EXPECT_EQ(p.evaluate({Gaussian::i(), Gaussian(1)}), Gaussian(0));
  EXPECT_EQ(p.totalDegree(), 2u);
  EXPECT_THROW(Poly::parse("z + q", vars), VecFieldError);
}

TEST(VecField, ImLBracketLbarIsT) {
  Fields frame = printedFrame();
  PolyVectorField L = get(frame, "L"), Lb = get(frame, "Lb");
  PolyVectorField t = lieBracketVF(L, Lb).scaled(Gaussian::i());
  EXPECT_EQ(t, get(frame, "T"));
  EXPECT_EQ(bracketByHand(L, Lb).scaled(Gaussian::i()), t);
}

TEST(VecField, AdaptedFrameReproducesThePrintedFrame) {
  Fields built = adaptedFrame(), printed = printedFrame();
  ASSERT_EQ(built.size(), 5u);
  for (const auto& [name, f] : printed) EXPECT_EQ(get(built, name), f) << name;
  EXPECT_EQ(get(built, "L"), modelL());
}

TEST(VecField, BracketOnHolomorphicChart) {
  Fields aut = automorphismFields();
  EXPECT_EQ(lieBracketVF(get(aut, "T"), get(aut, "L2")), get(aut, "S2").scaled(4));
  EXPECT_EQ(lieBracketVF(get(aut, "L2"), get(aut, "L1")), get(aut, "T").scaled(-4));
  EXPECT_EQ(lieBracketVF(get(aut, "S2"), get(aut, "D")), get(aut, "S2").scaled(3));
  for (const auto& [n, f] : aut) EXPECT_TRUE(lieBracketVF(f, f).isZero()) << n;
}

TEST(VecField, BracketAgreesWithHandExpansion) {
  Fields aut = automorphismFields();
  for (const auto& [n1, f] : aut)
    for (const auto& [n2, g] : aut) EXPECT_EQ(lieBracketVF(f, g), bracketByHand(f, g)) << n1 << "," << n2;
}

TEST(VecField, ChartMismatchThrows) {
  EXPECT_THROW(lieBracketVF(modelL(), get(automorphismFields(), "T")), VecFieldError);
}

TEST(VecField, JacobiAndAntisymmetryOnRandomFields) {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> coef(-2, 2), expo(0, 2);
  const std::size_t n = 3;
  Chart chart{"test", {"x", "y", "t"}};
  auto randomPoly = [&] {
    Poly p(n);
    for (int t = 0; t < 3; ++t) {
      Poly m = Poly::constant(n, Gaussian(mpq_class(coef(rng)), mpq_class(coef(rng))));
      for (std::size_t v = 0; v < n; ++v) m = m * Poly::var(n, v).pow(static_cast<unsigned>(expo(rng)));
      p += m;
    }
    return p;
  };
  auto randomField = [&] { return PolyVectorField(chart, {randomPoly(), randomPoly(), randomPoly()}); };
  for (int k = 0; k < 100; ++k) {
    PolyVectorField x = randomField(), y = randomField(), z = randomField();
    EXPECT_EQ(lieBracketVF(x, y), lieBracketVF(y, x).scaled(-1));
    EXPECT_TRUE((lieBracketVF(x, lieBracketVF(y, z)) + lieBracketVF(y, lieBracketVF(z, x)) +
                 lieBracketVF(z, lieBracketVF(x, y)))
                    .isZero());
  }
}

TEST(VecField, RankOfTheFrame) {
  Fields frame = printedFrame();
  std::vector<PolyVectorField> fs;
  for (const auto& [n, f] : frame) fs.push_back(f);
  std::vector<std::vector<Gaussian>> points = {
      {0, 0, 0, 0, 0},
      {Gaussian(1, 1), Gaussian(1, -1), 2, -1, 3},
      {Gaussian(mpq_class(1, 2), 3), Gaussian(mpq_class(1, 2), -3), 0, 5, -7},
      {Gaussian(-2), Gaussian(-2), 1, 1, 1},
      {Gaussian(0, mpq_class(-3, 4)), Gaussian(0, mpq_class(3, 4)), mpq_class(1, 3), 0, 0},
      {Gaussian(7, 5), Gaussian(7, -5), -9, 4, 11},
  };
  for (const auto& p : points) {
    EXPECT_EQ(rankAtPoint(fs, p), 5u);
    std::vector<std::vector<Gaussian>> m;
    for (const auto& f : fs) m.push_back(f.at(p));
    EXPECT_FALSE(determinant(m).isZero());
  }
  std::vector<PolyVectorField> ss = {get(frame, "S"), get(frame, "Sb")};
  EXPECT_EQ(rankAtPoint(ss, points[1]), 2u);
  ss.push_back(get(frame, "S"));
  EXPECT_EQ(rankAtPoint(ss, points[2]), 2u);
}

TEST(VecField, CommutatorTableOfTheAutomorphisms) {
  LieAlgebra table = commutatorTable(automorphismFields());
  LieAlgebra printed = autTable();
  ASSERT_EQ(table.labels(), printed.labels());
  std::size_t compared = 0;
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = i + 1; j < 7; ++j, ++compared)
      EXPECT_EQ(table.bracket(i, j), printed.bracket(i, j)) << printed.labels()[i] << "," << printed.labels()[j];
  EXPECT_EQ(compared, 21u);
}

TEST(VecField, CommutatorTableOfCommutingFields) {
  Fields aut = automorphismFields();
  LieAlgebra t = commutatorTable({{"S2", get(aut, "S2")}, {"S1", get(aut, "S1")}, {"T", get(aut, "T")}});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(t.bracket(i, j), LieElement(3));
}

TEST(VecField, CommutatorTableRejectsAnOpenSpan) {
  Fields aut = automorphismFields();
  EXPECT_THROW(commutatorTable({{"L2", get(aut, "L2")}, {"L1", get(aut, "L1")}}), VecFieldError);
}

TEST(VecField, OnlyDAndRVanishAtTheOrigin) {
  std::vector<std::string> vanishing;
  for (const auto& [n, f] : automorphismFields()) {
    auto v = f.at({0, 0, 0, 0});
    if (std::all_of(v.begin(), v.end(), [](const Gaussian& g) { return g.isZero(); })) vanishing.push_back(n);
  }
  EXPECT_EQ(vanishing, (std::vector<std::string>{"D", "R"}));
}

TEST(VecField, Tangency) {
  ModelSurface m = ModelSurface::beloshapka();
  ASSERT_TRUE(m.isReal());
  Fields aut = automorphismFields();
  for (const auto& [n, f] : aut) {
    EXPECT_TRUE(checkTangency(f, m)) << n;
    EXPECT_TRUE(tangentAtSamples(f)) << n;
  }
  PolyVectorField iT = get(aut, "T").scaled(Gaussian::i());
  EXPECT_FALSE(checkTangency(iT, m));
  EXPECT_FALSE(tangentAtSamples(iT));
}

TEST(VecField, TangencyAgainstAnotherSurface) {
  ModelSurface flat = ModelSurface::fromJson(R"({"vars": ["z", "zb"], "equations": ["z*zb", "0", "0"]})");
  EXPECT_TRUE(flat.isReal());
  EXPECT_FALSE(checkTangency(get(automorphismFields(), "L1"), flat));
  EXPECT_THROW(ModelSurface::fromJson(R"({"vars": ["z"], "equations": []})"), VecFieldError);
  EXPECT_FALSE(ModelSurface::fromJson(R"({"vars": ["z", "zb"], "equations": ["I*z", "0", "0"]})").isReal());
}
