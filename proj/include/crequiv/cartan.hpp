#ifndef CREQUIV_CARTAN_HPP
#define CREQUIV_CARTAN_HPP

#include "crequiv/liealg.hpp"
#include "crequiv/reduce.hpp"

#include <array>
#include <string>
#include <vector>

namespace crequiv {

/// The parallelism (lambdabar, lambda, sigmabar, sigma, rho, zetabar, zeta)
/// on P^7, paired in this order with the basis of the 7-dimensional algebra.
struct ConnectionForm {
  std::vector<OneForm> forms;
  /// Each form over dabar, da and the final base coframe.
  std::vector<FormExpr> definitions;
  /// d of each form, written in the forms themselves.
  StructureRules equations;
};

/// Built from the final structure of a reduction; `flat` zeroes every base
/// symbol in the structure equations.
ConnectionForm buildConnection(const ReductionResult& r, bool flat = false);

/// One compared component: the two sides as canonical strings.
struct CertificateEntry {
  std::string component;
  std::string lhs;
  std::string rhs;
  bool pass = false;
};

struct ConditionReport {
  std::string condition;
  bool pass = false;
  std::vector<CertificateEntry> entries;
  std::vector<std::string> diagnostics;
};

/// Pointwise isomorphism: the coefficient matrix of the given forms over
/// (dabar, da, final base coframe) is reduced with invertible pivots only.
ConditionReport checkConditionI(const std::vector<FormExpr>& definitions);

/// lambda - da/a and lambdabar - dabar/abar carry no group differentials, and
/// the remaining forms carry none at all.
ConditionReport checkConditionII(const ConnectionForm& w);

/// Contraction of the fundamental vector dual to `forms[index]` into every
/// structure equation, compared with -ad(e_index) applied to the form.
ConditionReport checkConditionIII(const ConnectionForm& w, const LieAlgebra& l, std::size_t index);

/// d w^k + sum_{i<j} c^k_{ij} w^i ^ w^j for every k.
std::vector<FormExpr> curvature(const ConnectionForm& w, const LieAlgebra& l);

/// conj(d rho) equals d rho with rho treated as real.
ConditionReport checkRhoReality(const ConnectionForm& w);

/// The structure equations with lambda, lambdabar and the lifted coframe
/// renamed to the Maurer-Cartan forms `formNames` of the algebra.
StructureRules renameToAlgebra(const StructureRules& rules, const ConnectionForm& w,
                               const std::vector<std::string>& formNames);

/// Default dual form names (w_alphabar, w_alpha, ..., w_zeta).
std::vector<std::string> algebraFormNames();

}  // namespace crequiv

#endif
