#include "crequiv/cartan.hpp"

#include "printers.hpp"

#include <gtest/gtest.h>

using namespace crequiv;

namespace {

OneForm F(std::string_view name) { return OneForm::named(name); }

const ReductionResult& reduction() {
  static const ReductionResult r = runReduction();
  return r;
}

const ConnectionForm& connection() {
  static const ConnectionForm w = buildConnection(reduction());
  return w;
}

}  // namespace

TEST(Cartan, ConnectionLayout) {
  const auto& w = connection();
  ASSERT_EQ(w.forms.size(), 7u);
  EXPECT_EQ(w.forms[0], F("lambdabar"));
  EXPECT_EQ(w.forms[1], F("lambda"));
  EXPECT_EQ(w.forms[6], F("zeta"));
  EXPECT_EQ(w.definitions.size(), 7u);
}

TEST(Cartan, ConditionI) {
  const auto& w = connection();
  EXPECT_TRUE(checkConditionI(w.definitions).pass);
  std::vector<FormExpr> six(w.definitions.begin() + 1, w.definitions.end());
  EXPECT_FALSE(checkConditionI(six).pass);
  std::vector<FormExpr> dup = w.definitions;
  dup[1] = dup[3];
  EXPECT_FALSE(checkConditionI(dup).pass);
}

TEST(Cartan, ConditionII) {
  const auto& w = connection();
  EXPECT_TRUE(checkConditionII(w).pass);
  ConnectionForm doubled = w;
  doubled.definitions[1] = doubled.definitions[1] + FormExpr(F("da"), ScalarExpr::parse("1/a"));
  EXPECT_FALSE(checkConditionII(doubled).pass);
  ConnectionForm withDb = w;
  withDb.definitions[1] = withDb.definitions[1] + FormExpr(F("db"), 1);
  EXPECT_FALSE(checkConditionII(withDb).pass);
}

TEST(Cartan, ConditionIIIBothDirections) {
  for (std::size_t index : {1u, 0u}) {
    ConditionReport rep = checkConditionIII(connection(), g7(), index);
    EXPECT_TRUE(rep.pass) << index;
    EXPECT_EQ(rep.entries.size(), 7u);
    for (const auto& e : rep.entries) EXPECT_TRUE(e.pass) << e.component << ": " << e.lhs << " vs " << e.rhs;
  }
}

TEST(Cartan, ConditionIIIIsConjugationEquivariant) {
  ConditionReport a = checkConditionIII(connection(), g7(), 1);
  ConditionReport b = checkConditionIII(connection(), g7(), 0);
  const auto conj = g7().conjugation();
  for (std::size_t k = 0; k < 7; ++k) {
    FormExpr lhs = interior(F("lambda"), connection().equations.at(connection().forms[k]));
    FormExpr lhsBar = interior(F("lambdabar"), connection().equations.at(connection().forms[conj[k]]));
    EXPECT_EQ(conjugate(lhs), lhsBar) << k;
  }
  EXPECT_EQ(a.pass, b.pass);
}

TEST(Cartan, InteriorProductList) {
  const auto& eq = connection().equations;
  const OneForm lambda = F("lambda");
  EXPECT_EQ(interior(lambda, eq.at(F("sigma"))), 2 * FormExpr(F("sigma")));
  EXPECT_EQ(interior(lambda, eq.at(F("sigmabar"))), FormExpr(F("sigmabar")));
  EXPECT_EQ(interior(lambda, eq.at(F("rho"))), FormExpr(F("rho")));
  EXPECT_EQ(interior(lambda, eq.at(F("zeta"))), FormExpr(F("zeta")));
  EXPECT_TRUE(interior(lambda, eq.at(F("zetabar"))).isZero());
  EXPECT_TRUE(interior(lambda, eq.at(lambda)).isZero());
  EXPECT_TRUE(interior(lambda, eq.at(F("lambdabar"))).isZero());
}

TEST(Cartan, PerturbedAlgebraFailsInTheMatchingDirection) {
  LieAlgebra bad = g7();
  bad.setBracket("e_alpha", "e_sigma", {{"e_sigma", -3}});
  ConditionReport rep = checkConditionIII(connection(), bad, 1);
  EXPECT_FALSE(rep.pass);
  for (const auto& e : rep.entries) EXPECT_EQ(e.pass, e.component != "e_sigma") << e.component;
  ASSERT_FALSE(rep.diagnostics.empty());
  EXPECT_NE(rep.diagnostics.front().find("e_sigma"), std::string::npos);
}

TEST(Cartan, RhoReality) { EXPECT_TRUE(checkRhoReality(connection()).pass); }

TEST(Cartan, FlatCurvatureVanishes) {
  ConnectionForm flat = buildConnection(reduction(), true);
  for (const auto& c : curvature(flat, g7())) EXPECT_TRUE(c.isZero()) << c.str();
  bool anyCurved = false;
  for (const auto& c : curvature(connection(), g7())) anyCurved = anyCurved || !c.isZero();
  EXPECT_TRUE(anyCurved);
}

TEST(Cartan, FlatEquationsMatchTheMaurerCartanEquationsOfG7) {
  ConnectionForm flat = buildConnection(reduction(), true);
  auto names = algebraFormNames();
  EXPECT_EQ(renameToAlgebra(flat.equations, flat, names), mcEquations(g7(), names));
}
