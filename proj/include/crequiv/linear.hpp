#ifndef CREQUIV_LINEAR_HPP
#define CREQUIV_LINEAR_HPP

#include "crequiv/scalar.hpp"

#include <optional>
#include <vector>

namespace crequiv {

using GMatrix = std::vector<std::vector<Gaussian>>;

/// Result of solving M u = rhs with constant M and symbolic right-hand side.
struct AffineSolution {
  /// One entry per unknown; free unknowns are set to zero and listed in
  /// `freeColumns`.
  std::vector<ScalarExpr> values;
  std::vector<std::size_t> freeColumns;
  /// Nonzero right-hand sides left in rows that reduced to zero.
  std::vector<ScalarExpr> inconsistencies;
};

AffineSolution solveLinear(GMatrix m, std::vector<ScalarExpr> rhs);

std::size_t rank(GMatrix m);

/// Basis of {y : y M = 0}, in reduced echelon form.
GMatrix leftNullSpace(const GMatrix& m);

}  // namespace crequiv

#endif
