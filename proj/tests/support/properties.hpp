#ifndef CREQUIV_TESTS_PROPERTIES_HPP
#define CREQUIV_TESTS_PROPERTIES_HPP

#include "crequiv/exterior.hpp"
#include "crequiv/reduce.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace crequiv::proptest {

/// Seeded generator of small random scalars, words and forms.
class RandomExprs {
public:
  explicit RandomExprs(std::uint64_t seed) : m_rng(seed) {}

  int uniform(int lo, int hi);
  Gaussian gaussian();
  Letter letter();
  Word word(std::size_t maxLength);
  /// Group parameter or base symbol, the latter with a canonical word of
  /// length at most `maxWord`.
  Atom atom(std::size_t maxWord = 1);
  /// Up to `maxTerms` terms, each a product of at most 3 atoms; a and abar
  /// may appear with negative exponents.
  ScalarExpr scalar(std::size_t maxTerms = 3, std::size_t maxWord = 1);
  /// Polynomial in the given group parameters (and their conjugates) with
  /// base-symbol coefficients.
  ScalarExpr groupPolynomial(const std::vector<GroupName>& params, std::size_t maxTerms = 3);
  /// Random form of the given degree over `basis`.
  FormExpr form(int degree, const std::vector<OneForm>& basis, std::size_t maxTerms = 3);

private:
  std::mt19937_64 m_rng;
};

/// Outcome of one property over many instances.
struct PropertyResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::string firstFailure;
  bool passed() const { return failures == 0 && instances > 0; }
};

PropertyResult normalFormIdempotence(std::uint64_t seed, std::size_t n);
/// conj(conj x) = x and conj(xy) = conj(x) conj(y).
PropertyResult conjugationInvolution(std::uint64_t seed, std::size_t n);
/// Associativity and distributivity of the scalar ring.
PropertyResult ringAxioms(std::uint64_t seed, std::size_t n);
PropertyResult leibniz(std::uint64_t seed, std::size_t n);
/// d(x ^ y) = dx ^ y + (-1)^deg(x) x ^ dy with the Darboux rules.
PropertyResult antiderivation(std::uint64_t seed, std::size_t n);
/// x ^ y = (-1)^(pq) y ^ x and (x ^ y) ^ z = x ^ (y ^ z).
PropertyResult gradedAnticommutativity(std::uint64_t seed, std::size_t n);
PropertyResult changeBasisWedge(std::uint64_t seed, std::size_t n);
/// Every word of length 2..4 (exhaustive) plus `n` random words of length 5
/// normal-ordered by both rewriting strategies; the results must agree.
PropertyResult rewritingConfluence(std::uint64_t seed, std::size_t n);
/// d(sum f_i w_i) computed from the base coframe equals
/// sum df_i ^ w_i + f_i (MC part + torsion) from the torsion report.
PropertyResult roundTripReconstruction(const Stage& s, const std::vector<GroupName>& params,
                                       std::uint64_t seed, std::size_t n);

/// Every property above (the reconstruction once per stage).
std::vector<PropertyResult> allProperties(std::uint64_t seed, std::size_t n);

/// Words of length 2..maxLength over the five letters.
std::vector<Word> allWords(std::size_t maxLength);

}  // namespace crequiv::proptest

#endif
