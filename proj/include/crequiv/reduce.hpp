#ifndef CREQUIV_REDUCE_HPP
#define CREQUIV_REDUCE_HPP

#include "crequiv/exterior.hpp"
#include "crequiv/linear.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crequiv {

struct ReduceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ScalarMatrix = std::vector<std::vector<ScalarExpr>>;
using FormMatrix = std::vector<std::vector<FormExpr>>;
using Coframe = std::array<OneForm, 5>;

/// (sigmabar, sigma, rho, zetabar, zeta).
Coframe liftedCoframe();
/// The coframe of a generation: 0 initial, 1 after the first loop, 2 final.
Coframe stageCoframe(int generation);

ScalarMatrix multiply(const ScalarMatrix& x, const ScalarMatrix& y);
ScalarMatrix identityMatrix(std::size_t n);

/// The lifted-coframe matrix of G_{III_1}: rows are the lifted forms, columns
/// the initial coframe, both in the order (sigmabar, sigma, rho, zetabar, zeta).
ScalarMatrix buildInitialGStructure();

/// Inverse of a lower-triangular matrix with invertible diagonal; throws
/// ReduceError otherwise.
ScalarMatrix invertGroupMatrix(const ScalarMatrix& g);

struct MaurerCartanResult {
  FormMatrix dgginv;
  FormExpr alpha1;
  FormExpr alpha2;
  /// Entries differing from the expected pattern, as "(i,j): ..." lines.
  std::vector<std::string> violations;
};

/// dg g^{-1} for the initial group, checked against the pattern
/// diag(alpha1 + 2 alphabar1, 2 alpha1 + alphabar1, alpha1 + alphabar1,
/// alphabar1, alpha1) with zeros above the diagonal.
MaurerCartanResult maurerCartan(const ScalarMatrix& g);

/// One normalization step of the reduction: a coframe generation defined by
/// a lower-triangular matrix over the initial coframe, and the lifted matrix
/// of the remaining group on top of it.
struct Stage {
  std::string name;
  Coframe base = stageCoframe(0);
  ScalarMatrix fromInitial;  // base = fromInitial * initial coframe
  ScalarMatrix group;        // lifted = group * base
  /// Expected dg g^{-1} written with Maurer-Cartan symbols.
  std::vector<std::vector<FormExpr>> pattern;
  /// Maurer-Cartan symbols in terms of group differentials.
  std::map<OneForm, FormExpr> mcDefinitions;
};

/// Initial lift (group parameters a, b, c, d, e).
Stage stage0();
/// After normalizing b, c, d; B0, C0, D0 stay opaque (group parameters a, e).
Stage stage1();
/// After normalizing e as well; E0 opaque (group parameter a only).
Stage stage2();

/// d of the base coframe of a stage, written in that coframe.
StructureRules stageRules(const Stage& s);

struct TorsionReport {
  OneForm form;
  FormExpr direct;   // d(form) over group differentials and the lifted coframe
  FormExpr mcPart;   // Maurer-Cartan symbols wedge lifted forms
  FormExpr torsion;  // lifted ^ lifted
  ScalarExpr coefficient(OneForm x, OneForm y) const { return torsion.coefficient({x, y}); }
};

/// Torsion of every lifted form; `torsion` is computed as group * d(base)
/// independently of `direct`.
std::vector<TorsionReport> computeTorsion(const Stage& s);

/// direct - (expanded mcPart + torsion); zero when the report is consistent.
FormExpr reconstructionResidual(const TorsionReport& r, const Stage& s);

/// The 10 lifted 2-forms in display order.
std::vector<std::pair<OneForm, OneForm>> orderedPairs();

/// Coefficient names X1..X7 (sigma), Y1..Y8 with conjugate labels (rho),
/// Z1..Z10 (zeta), optionally primed; constant slots are omitted.
std::map<std::string, ScalarExpr> namedTorsion(const std::vector<TorsionReport>& reports, bool primed = false);

struct TorsionComponent {
  OneForm form;
  OneForm x, y;
  std::string str() const;
};

/// t(u) = t0 + M u for modifications mu -> mu - sum_j u_j theta^j of the
/// selected Maurer-Cartan symbols (and their conjugates).
struct AbsorptionSystem {
  std::vector<std::string> unknowns;
  std::vector<TorsionComponent> components;
  GMatrix matrix;
  std::vector<ScalarExpr> t0;
  GMatrix cokernel;

  std::size_t componentIndex(OneForm form, OneForm x, OneForm y) const;
  /// Sparse combination of components as a dense vector.
  std::vector<Gaussian> combination(const std::vector<std::pair<TorsionComponent, Gaussian>>& terms) const;
  /// True if the combination of torsion components is untouched by every
  /// modification (it lies in the span of the cokernel).
  bool isEssential(const std::vector<Gaussian>& combination) const;
  /// A modification-invariant combination evaluated on t0.
  ScalarExpr evaluate(const std::vector<Gaussian>& combination) const;
};

AbsorptionSystem absorb(const Stage& s, const std::vector<TorsionReport>& reports,
                        const std::vector<OneForm>& modified, const std::vector<OneForm>& rows);

/// Assignments of group parameters (unbarred; conjugates follow).
using NormalizationMap = std::map<GroupName, ScalarExpr>;

/// Solves targets = 0 one at a time for a parameter (or its conjugate) that
/// occurs linearly with an invertible coefficient; throws ReduceError naming
/// the targets left unsolved.
NormalizationMap solveNormalizations(const std::vector<std::pair<std::string, ScalarExpr>>& targets,
                                     const std::vector<GroupName>& params);

ScalarExpr applyNormalization(const ScalarExpr& x, const NormalizationMap& n);

/// Weight w(form) / (w(x) w(y)) with w(sigma) = a^2 abar, w(rho) = a abar,
/// w(zeta) = a, conjugates accordingly and w(lambda) = 1.
ScalarExpr aWeight(OneForm form, OneForm x, OneForm y);

struct InvariantEntry {
  std::string name;
  OneForm form;
  OneForm x, y;
  ScalarExpr coefficient;
  ScalarExpr weight;
  ScalarExpr reduced;  // coefficient / weight
  bool groupFree;
};

struct FinalStructure {
  /// lambda = da/a + sum_j v_j theta^j over the lifted coframe.
  std::array<ScalarExpr, 5> v;
  FormExpr lambda;  // over da, dabar and the lifted coframe
  /// d of lambdabar, lambda and the lifted coframe, written in those 7 forms.
  StructureRules rules;
  /// Torsion components used as pivots of the last absorption.
  std::vector<TorsionComponent> pivots;
  std::vector<InvariantEntry> invariants;
  /// Coefficients whose quotient by the weight still contains a or abar.
  std::vector<std::string> weightFailures;
};

/// Runs the last absorption on the torsion of `s` after substituting the
/// given values of the opaque normalization functions.
FinalStructure finalStructureEquations(const Stage& s, const std::map<BaseName, ScalarExpr>& abbreviations = {});

/// Expected form of the final equations when all invariants vanish, for
/// comparison with the Maurer-Cartan equations of the model.
StructureRules flatten(const StructureRules& rules);

/// Everything the reduction produces, stage by stage.
struct ReductionResult {
  ScalarMatrix g, ginv;
  MaurerCartanResult mc;
  Stage s0, s1, s2;
  std::vector<TorsionReport> loop1;
  std::map<std::string, ScalarExpr> torsion1;
  AbsorptionSystem absorption1;
  std::vector<std::pair<std::string, ScalarExpr>> targets1;
  NormalizationMap norm1;  // b, c, d
  std::vector<TorsionReport> loop2;
  std::map<std::string, ScalarExpr> torsion2;
  AbsorptionSystem absorption2;
  ScalarExpr tRho1SigmabarZeta;  // coefficient of sigmabar1 ^ zeta1 in d rho1
  NormalizationMap norm2;        // e
  /// B0, C0, D0, E0 in terms of the primary and secondary symbols.
  std::map<BaseName, ScalarExpr> abbreviations;
  FinalStructure final;
};

ReductionResult runReduction();

/// Substitutes the values of B0, C0, D0, E0 (and their derivatives).
ScalarExpr expandAbbreviations(const ScalarExpr& x, const ReductionResult& r);

}  // namespace crequiv

#endif
