#include "crequiv/exterior.hpp"

#include "printers.hpp"
#include "properties.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace crequiv;

namespace {

ScalarExpr S(std::string_view s) { return ScalarExpr::parse(s); }
OneForm F(std::string_view name) { return OneForm::named(name); }

const SecondaryBrackets& secondary() {
  static const SecondaryBrackets sb = deriveSecondaryBrackets(initialDarboux());
  return sb;
}

}  // namespace

TEST(Exterior, WedgeIsAntisymmetric) {
  FormExpr s0(F("sigma0")), r0(F("rho0")), z0(F("zeta0"));
  EXPECT_TRUE(wedge(s0, s0).isZero());
  EXPECT_EQ(wedge(z0, r0), -wedge(r0, z0));
  EXPECT_EQ(wedge(z0, r0).coefficient({F("rho0"), F("zeta0")}), ScalarExpr(-1));
  EXPECT_EQ(wedge(FormExpr::scalar(S("a")), s0), FormExpr(F("sigma0"), S("a")));
}

TEST(Exterior, MonomialSortingSign) {
  int sign = 0;
  std::vector<OneForm> fs = {F("zeta0"), F("rho0"), F("sigmabar0")};
  FormMonomial m = FormMonomial::sorted(fs, sign);
  EXPECT_EQ(sign, -1);
  EXPECT_EQ(m[0], F("sigmabar0"));
  std::vector<OneForm> twice = {F("rho0"), F("rho0")};
  FormMonomial::sorted(twice, sign);
  EXPECT_EQ(sign, 0);
}

TEST(Exterior, UnknownSymbolThrows) { EXPECT_THROW(OneForm::named("omega42"), ExteriorError); }

TEST(Exterior, ConjugationOfSymbols) {
  EXPECT_EQ(F("sigma0").conj(), F("sigmabar0"));
  EXPECT_EQ(F("rho").conj(), F("rho"));
  EXPECT_EQ(groupDifferential(GroupName::c).conj(), groupDifferential(GroupName::c, true));
  EXPECT_EQ(baseCoframe(Letter::T), F("rho0"));
}

TEST(Exterior, DarbouxStructure) {
  StructureRules rules = initialDarboux();
  EXPECT_EQ(rules.at(F("sigmabar0")).coefficient({F("rho0"), F("zetabar0")}), ScalarExpr(1));
  EXPECT_EQ(rules.at(F("rho0")).coefficient({F("zetabar0"), F("zeta0")}), -ScalarExpr::i());
  EXPECT_TRUE(rules.at(F("zeta0")).isZero());
  EXPECT_TRUE(rules.at(F("zetabar0")).isZero());
  for (const auto& [f, d] : rules) EXPECT_EQ(conjugate(d), rules.at(f.conj())) << f.name();
}

TEST(Exterior, DifferentialOfLiftedSigma) {
  StructureRules rules = initialDarboux();
  FormExpr sigma(F("sigma0"), S("a^2*abar"));
  FormExpr expected = wedge(FormExpr(F("da"), S("2*a*abar")) + FormExpr(F("dabar"), S("a^2")), FormExpr(F("sigma0"))) +
                      S("a^2*abar") * rules.at(F("sigma0"));
  EXPECT_EQ(exteriorD(sigma, rules), expected);
}

TEST(Exterior, GroupDifferentialsAreClosed) {
  EXPECT_TRUE(exteriorD(FormExpr(F("da")), initialDarboux()).isZero());
  EXPECT_TRUE(exteriorD(FormExpr(F("dcbar"), S("2")), initialDarboux()).isZero());
}

TEST(Exterior, DifferentialOfAFunction) {
  FormExpr df = differential(S("a*B"));
  EXPECT_EQ(df.coefficient({F("da")}), S("B"));
  EXPECT_EQ(df.coefficient({F("zeta0")}), S("a*L(B)"));
  EXPECT_EQ(df.coefficient({F("sigmabar0")}), S("a*Sb(B)"));
  EXPECT_TRUE(df.coefficient({F("dabar")}).isZero());
}

TEST(Exterior, MissingRuleThrows) {
  StructureRules empty;
  EXPECT_THROW(exteriorD(FormExpr(F("sigma0")), empty), ExteriorError);
}

TEST(Exterior, ChangeBasis) {
  std::map<OneForm, FormExpr> m{{F("sigma0"), FormExpr(F("sigma"), S("a^-2*abar^-1"))}};
  EXPECT_EQ(changeBasis(FormExpr(F("sigma0"), S("a^2*abar")), m), FormExpr(F("sigma")));
  std::map<OneForm, FormExpr> z{{F("zeta1"), FormExpr(F("sigma"), S("-e*a^-3*abar^-1")) + FormExpr(F("zeta"), S("a^-1"))}};
  FormExpr x = wedge(FormExpr(F("zeta1")), FormExpr(F("rho")));
  EXPECT_EQ(changeBasis(x, z), wedge(z.at(F("zeta1")), FormExpr(F("rho"))));
  EXPECT_EQ(changeBasis(x, {}), x);
}

TEST(Exterior, InteriorProduct) {
  FormExpr x = wedge(FormExpr(F("sigma")), FormExpr(F("rho")));
  EXPECT_EQ(interior(F("sigma"), x), FormExpr(F("rho")));
  EXPECT_EQ(interior(F("rho"), x), -FormExpr(F("sigma")));
  EXPECT_TRUE(interior(F("zeta"), x).isZero());
}

TEST(Exterior, TenBasisTwoFormsAreIndependent) {
  std::set<FormMonomial> seen;
  const OneForm base[] = {F("sigmabar0"), F("sigma0"), F("rho0"), F("zetabar0"), F("zeta0")};
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      FormExpr w = wedge(FormExpr(base[i]), FormExpr(base[j]));
      ASSERT_EQ(w.terms().size(), 1u);
      seen.insert(w.terms().begin()->first);
    }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(Exterior, SecondaryEAndF) {
  const auto& t = secondary().table;
  EXPECT_EQ(t.at(BaseName::F), S("I*(L(B) - Lb(Q) - R*Rbar + B*Bbar + A)"));
  EXPECT_EQ(t.at(BaseName::E), S("I*(L(A) - Lb(P) - A*Q - Pbar*R + B*P + A*Bbar)"));
}

TEST(Exterior, DerivedJIsRealModuloTheDerivedRelations) {
  const ScalarExpr& j = secondary().table.at(BaseName::J);
  EXPECT_TRUE(reduceModRelations(j - conjugate(j), secondary()).isZero());
}

TEST(Exterior, SecondaryTableIsConjugationCompatible) {
  const auto& t = secondary().table;
  for (BaseName n : {BaseName::E, BaseName::F, BaseName::G, BaseName::K})
    EXPECT_FALSE(t.at(n).hasGroup());
}

TEST(Exterior, D2OfClosedFormsVanishes) {
  auto residual = checkD2(initialDarboux(), secondary().table);
  for (const auto& [f, r] : residual) {
    EXPECT_NE(f, F("zeta0"));
    EXPECT_NE(f, F("zetabar0"));
    EXPECT_EQ(f.generation(), Generation::Base);
  }
}

TEST(ExteriorProperties, GradedAnticommutativityAndAssociativity) {
  auto r = proptest::gradedAnticommutativity(21, 200);
  EXPECT_TRUE(r.passed()) << r.firstFailure;
}

TEST(ExteriorProperties, Antiderivation) {
  auto r = proptest::antiderivation(22, 150);
  EXPECT_TRUE(r.passed()) << r.firstFailure;
}

TEST(ExteriorProperties, ChangeBasisCommutesWithWedge) {
  auto r = proptest::changeBasisWedge(23, 150);
  EXPECT_TRUE(r.passed()) << r.firstFailure;
}
