#include "crequiv/reduce.hpp"

#include "printers.hpp"
#include "properties.hpp"

#include <gtest/gtest.h>

using namespace crequiv;

namespace {

ScalarExpr S(std::string_view s) { return ScalarExpr::parse(s); }
OneForm F(std::string_view name) { return OneForm::named(name); }

const ReductionResult& reduction() {
  static const ReductionResult r = runReduction();
  return r;
}

ScalarMatrix diagonalPoint() {
  ScalarMatrix g = buildInitialGStructure();
  std::map<Atom, ScalarExpr> m;
  for (GroupName n : {GroupName::a, GroupName::b, GroupName::c, GroupName::d, GroupName::e})
    for (bool c : {false, true}) m[Atom::group(n, c)] = n == GroupName::a ? ScalarExpr(1) : ScalarExpr(0);
  for (auto& row : g)
    for (auto& x : row) x = substituteGroup(x, m);
  return g;
}

}  // namespace

TEST(Reduce, InitialGroupMatrix) {
  ScalarMatrix g = buildInitialGStructure();
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g[2][2], S("a*abar"));
  EXPECT_TRUE(g[0][1].isZero());
  EXPECT_EQ(g[4][4], S("a"));
  EXPECT_EQ(g[3][3], S("abar"));
  EXPECT_EQ(g[0][0], conjugate(g[1][1]));
  EXPECT_EQ(diagonalPoint(), identityMatrix(5));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j) EXPECT_TRUE(g[i][j].isZero()) << i << "," << j;
}

TEST(Reduce, InverseGroupMatrix) {
  ScalarMatrix g = buildInitialGStructure();
  ScalarMatrix gi = invertGroupMatrix(g);
  EXPECT_EQ(gi[2][0], S("-cbar/(a^2*abar^3)"));
  EXPECT_EQ(gi[2][1], S("-c/(a^3*abar^2)"));
  EXPECT_EQ(gi[3][2], S("-bbar/(a*abar^2)"));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t k = 0; k < 5; ++k) {
      ScalarExpr s;
      for (std::size_t j = 0; j < 5; ++j) s += g[i][j] * gi[j][k];
      EXPECT_EQ(s, ScalarExpr(i == k ? 1 : 0)) << i << "," << k;
    }
  EXPECT_EQ(invertGroupMatrix(identityMatrix(5)), identityMatrix(5));
}

TEST(Reduce, InverseRejectsSingularDiagonal) {
  ScalarMatrix g = identityMatrix(3);
  g[1][1] = S("b");
  EXPECT_THROW(invertGroupMatrix(g), ReduceError);
}

TEST(Reduce, MaurerCartanPattern) {
  MaurerCartanResult mc = maurerCartan(buildInitialGStructure());
  EXPECT_TRUE(mc.violations.empty());
  EXPECT_EQ(mc.alpha1, FormExpr(F("da"), S("1/a")));
  EXPECT_TRUE(mc.dgginv[0][1].isZero());
  EXPECT_EQ(mc.dgginv[4][4], mc.alpha1);
  EXPECT_EQ(mc.dgginv[2][2], mc.alpha1 + conjugate(mc.alpha1));
  FormExpr alpha2 = FormExpr(F("da"), S("-c/(a^3*abar)")) + FormExpr(F("dabar"), S("-c/(a^2*abar^2)")) +
                    FormExpr(F("dc"), S("1/(a^2*abar)"));
  EXPECT_EQ(mc.alpha2, alpha2);
}

TEST(Reduce, Alpha2VanishesOnTheDiagonalSubgroup) {
  MaurerCartanResult mc = maurerCartan(buildInitialGStructure());
  std::map<Atom, ScalarExpr> zero{{Atom::group(GroupName::c), 0}, {Atom::group(GroupName::c, true), 0}};
  FormExpr restricted = mc.alpha2.mapCoefficients([&](const ScalarExpr& x) { return substituteGroup(x, zero); });
  EXPECT_TRUE(restricted.coefficient({F("da")}).isZero());
  EXPECT_TRUE(restricted.coefficient({F("dabar")}).isZero());
  EXPECT_EQ(restricted.terms().size(), 1u);
}

TEST(Reduce, FirstLoopTorsion) {
  const auto& t = reduction().torsion1;
  EXPECT_EQ(t.at("X3"), S("a*Rbar/abar^2"));
  EXPECT_EQ(t.at("X6"), S("B/abar"));
  EXPECT_EQ(t.at("Ybar8"), S("c/(a^2*abar) + I*bbar/(a*abar)"));
  EXPECT_EQ(t.at("X4"), S("B/abar - cbar/(a*abar^2)"));
  EXPECT_EQ(t.at("X7"), S("Q/a - c/(a^2*abar)"));
  EXPECT_EQ(t.at("X2"), S("Gbar/abar^2 - b*B/(a*abar^2) - bbar*Rbar/abar^3 + dbar/(a*abar^2)"));
}

TEST(Reduce, RhoZetaCoefficientIsOne) {
  const auto& loop1 = reduction().loop1;
  EXPECT_EQ(loop1[1].coefficient(F("rho"), F("zeta")), ScalarExpr(1));
  EXPECT_EQ(loop1[2].coefficient(F("zeta"), F("zetabar")), ScalarExpr::i());
}

TEST(Reduce, TorsionReconstructsAtEveryStage) {
  const auto& r = reduction();
  for (const Stage* s : {&r.s0, &r.s1, &r.s2})
    for (const auto& t : computeTorsion(*s)) EXPECT_TRUE(reconstructionResidual(t, *s).isZero()) << s->name << " " << t.form.name();
}

TEST(Reduce, EssentialTorsion) {
  const auto& a = reduction().absorption1;
  const OneForm sb = F("sigmabar"), sg = F("sigma"), rh = F("rho"), zb = F("zetabar"), z = F("zeta");
  for (OneForm y : {rh, zb, z}) EXPECT_TRUE(a.isEssential(a.combination({{{sg, sb, y}, 1}}))) << y.name();
  auto inv = a.combination({{{sb, sb, z}, 1}, {{sg, sg, z}, 1}, {{rh, rh, z}, -3}});
  EXPECT_TRUE(a.isEssential(inv));
  EXPECT_FALSE(a.isEssential(a.combination({{{sb, sb, z}, 1}})));
}

TEST(Reduce, FirstNormalization) {
  const auto& n = reduction().norm1;
  EXPECT_EQ(n.at(GroupName::c), S("a*abar*Bbar"));
  EXPECT_EQ(n.at(GroupName::b), S("a*(I/3*Qbar - I*B)"));
  for (const auto& [name, target] : reduction().targets1) EXPECT_TRUE(applyNormalization(target, n).isZero()) << name;
}

TEST(Reduce, SolveNormalizationsReportsUnsolvableTargets) {
  EXPECT_THROW(solveNormalizations({{"t", S("B + c^2")}}, {GroupName::c}), ReduceError);
  auto n = solveNormalizations({{"t", S("c/a - B")}}, {GroupName::c});
  EXPECT_EQ(n.at(GroupName::c), S("a*B"));
}

TEST(Reduce, SecondLoop) {
  const auto& r = reduction();
  EXPECT_TRUE(expandAbbreviations(r.torsion2.at("X'2"), r).isZero());
  EXPECT_TRUE(expandAbbreviations(r.torsion2.at("X'4"), r).isZero());
  EXPECT_EQ(r.s1.mcDefinitions.at(F("beta1")), FormExpr(F("da"), S("1/a")));
  EXPECT_EQ(r.s1.mcDefinitions.at(F("beta2")),
            FormExpr(F("de"), S("1/(a^2*abar)")) + FormExpr(F("da"), S("-e/(a^3*abar)")));
  EXPECT_EQ(r.torsion2.at("Y'4"), S("1/(a*abar)") * r.tRho1SigmabarZeta + S("I*ebar/(a*abar^2)"));
  ScalarExpr e0 = r.norm2.at(GroupName::e) / S("a");
  EXPECT_FALSE(e0.hasGroup());
  EXPECT_FALSE(e0.isZero());
}

TEST(Reduce, SecondLoopRhoCoefficients) {
  const auto& r = reduction();
  const auto& t = r.torsion2;
  EXPECT_TRUE(expandAbbreviations(t.at("Y'8") - S("1/3") * (t.at("X'6") + t.at("Xbar'7")), r).isZero());
  EXPECT_TRUE(expandAbbreviations(t.at("Ybar'8") - S("1/3") * (t.at("Xbar'6") + t.at("X'7")), r).isZero());
}

TEST(Reduce, FinalEquations) {
  const auto& f = reduction().final;
  const OneForm sb = F("sigmabar"), sg = F("sigma"), rh = F("rho"), zb = F("zetabar"), z = F("zeta");
  const OneForm lambda = F("lambda");
  EXPECT_EQ(f.rules.at(sg).coefficient({sb, zb}), S("a*Rbar/abar^2"));
  EXPECT_EQ(f.rules.at(sg).coefficient({rh, z}), ScalarExpr(1));
  EXPECT_EQ(f.rules.at(sg).coefficient({lambda, sg}), ScalarExpr(2));
  EXPECT_EQ(f.rules.at(sg).coefficient({lambda.conj(), sg}), ScalarExpr(1));
  EXPECT_EQ(f.rules.at(rh).coefficient({z, zb}), ScalarExpr::i());
  EXPECT_EQ(f.rules.at(z).coefficient({lambda, z}), ScalarExpr(1));
  EXPECT_TRUE(f.weightFailures.empty());
  for (const auto& e : f.invariants) EXPECT_FALSE(e.reduced.hasGroup()) << e.name;
}

TEST(Reduce, DLambdaIsSemibasic) {
  const auto& f = reduction().final;
  const OneForm lambda = F("lambda");
  const FormExpr& dl = f.rules.at(lambda);
  EXPECT_FALSE(dl.involves(lambda));
  EXPECT_FALSE(dl.involves(lambda.conj()));
  FormExpr rest = f.lambda - FormExpr(F("da"), S("1/a"));
  EXPECT_FALSE(rest.involves(Generation::GroupDifferential));
}

TEST(Reduce, FlatEquationsAreTheModelEquations) {
  StructureRules flat = flatten(reduction().final.rules);
  const OneForm sg = F("sigma"), rh = F("rho"), z = F("zeta"), lambda = F("lambda");
  auto w = [](OneForm f) { return FormExpr(f); };
  EXPECT_EQ(flat.at(sg), wedge(2 * w(lambda) + w(lambda.conj()), w(sg)) + wedge(w(rh), w(z)));
  EXPECT_EQ(flat.at(rh), wedge(w(lambda) + w(lambda.conj()), w(rh)) + ScalarExpr::i() * wedge(w(z), w(z.conj())));
  EXPECT_EQ(flat.at(z), wedge(w(lambda), w(z)));
  EXPECT_TRUE(flat.at(lambda).isZero());
}

TEST(Reduce, WeightOfAComponent) {
  EXPECT_EQ(aWeight(F("sigma"), F("sigmabar"), F("zetabar")), S("a/abar^2"));
  EXPECT_EQ(aWeight(F("sigma"), F("rho"), F("zeta")), ScalarExpr(1));
}

TEST(ReduceProperties, RoundTripAtEveryStage) {
  using G = GroupName;
  const auto& r = reduction();
  for (const auto& p : {proptest::roundTripReconstruction(r.s0, {G::a, G::b, G::c, G::d, G::e}, 41, 100),
                        proptest::roundTripReconstruction(r.s1, {G::a, G::e}, 42, 100),
                        proptest::roundTripReconstruction(r.s2, {G::a}, 43, 100)})
    EXPECT_TRUE(p.passed()) << p.name << ": " << p.firstFailure;
}
