#ifndef CREQUIV_LIEALG_HPP
#define CREQUIV_LIEALG_HPP

#include "crequiv/exterior.hpp"
#include "crequiv/linear.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crequiv {

/// Coordinates of a Lie algebra element in the basis.
using LieElement = std::vector<Gaussian>;

/// One nonzero cyclic sum [x_i,[x_j,x_k]] + [x_j,[x_k,x_i]] + [x_k,[x_i,x_j]].
struct JacobiViolation {
  std::size_t i, j, k;
  LieElement residual;
};

/// Finite-dimensional Lie algebra by structure constants c^k_{ij}.
class LieAlgebra {
public:
  explicit LieAlgebra(std::vector<std::string> labels);

  /// Loads {dim, labels, brackets: [[i, j, [[k, coeff], ...]], ...]}; the
  /// optional "conjugation" array lists the partner index of each basis vector.
  static LieAlgebra fromJson(const std::string& text);

  std::size_t dim() const { return m_labels.size(); }
  const std::vector<std::string>& labels() const { return m_labels; }
  /// Throws std::out_of_range for an unknown label.
  std::size_t index(const std::string& label) const;

  /// Sets [e_i, e_j] (and [e_j, e_i] by antisymmetry). Throws
  /// std::invalid_argument if i == j and the value is nonzero.
  void setBracket(std::size_t i, std::size_t j, const LieElement& value);
  void setBracket(const std::string& x, const std::string& y,
                  std::initializer_list<std::pair<std::string, Gaussian>> value);
  const Gaussian& constant(std::size_t i, std::size_t j, std::size_t k) const {
    return m_c[(i * dim() + j) * dim() + k];
  }

  /// Optional involution on the basis (e.g. e_zetabar <-> e_zeta).
  void setConjugation(std::vector<std::size_t> partner);
  const std::vector<std::size_t>& conjugation() const { return m_conj; }

  LieElement basis(std::size_t i) const;
  LieElement bracket(const LieElement& x, const LieElement& y) const;
  LieElement bracket(std::size_t i, std::size_t j) const;

  /// Exhaustive over all triples i < j < k.
  std::vector<JacobiViolation> jacobiResidual() const;
  /// Pairs (i, j) where conj(c^k_{ij}) != c^{k'}_{i'j'} for the pairing.
  std::vector<std::pair<std::size_t, std::size_t>> conjugationResidual() const;

  /// Column j holds the coordinates of [e_k, e_j].
  GMatrix adMatrix(std::size_t k) const;
  GMatrix adMatrix(const std::string& label) const { return adMatrix(index(label)); }

  /// True if [members, members] lies in their span.
  bool isSubalgebra(const std::vector<std::size_t>& members) const;
  /// Restriction to a bracket-closed subset; throws std::invalid_argument
  /// otherwise.
  LieAlgebra subalgebra(const std::vector<std::size_t>& members) const;

  std::string elementStr(const LieElement& x) const;

private:
  Gaussian& at(std::size_t i, std::size_t j, std::size_t k) { return m_c[(i * dim() + j) * dim() + k]; }

  std::vector<std::string> m_labels;
  std::vector<Gaussian> m_c;
  std::vector<std::size_t> m_conj;
};

/// Dual Maurer-Cartan rules d w^k = -sum_{i<j} c^k_{ij} w^i ^ w^j. The dual
/// 1-forms are declared (Custom generation) under `formNames`, paired by the
/// algebra's conjugation if present.
StructureRules mcEquations(const LieAlgebra& l, const std::vector<std::string>& formNames);

/// Exterior derivative with constant coefficients, for d^2 audits of
/// mcEquations output.
FormExpr constantD(const FormExpr& x, const StructureRules& rules);

/// Witness of an isomorphism sending target basis x_i to scale[i] * e_{image[i]}.
struct IsoWitness {
  std::vector<std::size_t> image;
  std::vector<Gaussian> scale;
};

/// Searches scaled permutations: target generators (elements outside the
/// derived algebra) get scales from {1, -1, I, -I}, the rest are forced by the
/// brackets. Returns nullopt if no such map preserves all constants.
std::optional<IsoWitness> checkNilpotentIso(const LieAlgebra& source, const LieAlgebra& target);

/// Built-in tables.
LieAlgebra n54();
/// The table read off the Maurer-Cartan equations of the model, basis
/// (e_alphabar, e_alpha, e_sigmabar, e_sigma, e_rho, e_zetabar, e_zeta).
LieAlgebra g7();
/// The bracket list as printed, kept for diffs against g7().
LieAlgebra g7Printed();
/// The 7 infinitesimal automorphisms (S2, S1, T, L2, L1, D, R) with the
/// starred lower entries filled by antisymmetry.
LieAlgebra autTable();

}  // namespace crequiv

#endif
