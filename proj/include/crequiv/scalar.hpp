#ifndef CREQUIV_SCALAR_HPP
#define CREQUIV_SCALAR_HPP

#include "crequiv/gaussian.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crequiv {

/// The five frame derivations. Enumerator values give the canonical order
/// Sbar < S < T < Lbar < L used for derivation words.
enum class Letter : std::uint8_t { Sbar = 1, S = 2, T = 3, Lbar = 4, L = 5 };

inline constexpr Letter kLetters[] = {Letter::Sbar, Letter::S, Letter::T, Letter::Lbar,
                                      Letter::L};

Letter conjugate(Letter l);
std::string_view letterName(Letter l);

enum class GroupName : std::uint8_t { a = 0, b, c, d, e };

enum class BaseName : std::uint8_t {
  A = 0, B, P, Q, R,  // first-order bracket functions
  E, F, G, J, K,      // secondary bracket functions
  B0, C0, D0, E0,     // normalization functions (opaque form)
};

inline constexpr BaseName kPrimaryBase[] = {BaseName::A, BaseName::B, BaseName::P, BaseName::Q,
                                            BaseName::R};
inline constexpr BaseName kSecondaryBase[] = {BaseName::E, BaseName::F, BaseName::G, BaseName::J,
                                              BaseName::K};

/// Real-valued base functions are their own conjugates.
bool isReal(BaseName n);

using Word = std::vector<Letter>;

/// True if the word (outermost letter first) is nondecreasing.
bool isCanonical(std::span<const Letter> word);

/// Generator of the coefficient ring: either a group parameter (possibly
/// conjugated) or a base function with a canonical derivation word.
/// Packed into 64 bits so monomials stay small and totally ordered.
class Atom {
public:
  static constexpr std::size_t kMaxWord = 15;

  static Atom group(GroupName n, bool conj = false);
  /// `word` must be canonical; real symbols ignore `conj`.
  static Atom base(BaseName n, bool conj = false, std::span<const Letter> word = {});

  bool isGroup() const { return (m_key >> 60) == 0; }
  bool isBase() const { return !isGroup(); }
  GroupName groupName() const { return static_cast<GroupName>((m_key >> 52) & 0xff); }
  BaseName baseName() const { return static_cast<BaseName>((m_key >> 52) & 0xff); }
  bool conj() const { return (m_key >> 51) & 1; }
  std::size_t wordLength() const { return (m_key >> 47) & 0xf; }
  Word word() const;
  /// Same symbol without derivation word.
  Atom stem() const;
  /// Invertible generators are a and abar.
  bool invertible() const { return isGroup() && groupName() == GroupName::a; }

  std::uint64_t key() const { return m_key; }
  std::string str() const;

  friend auto operator<=>(const Atom&, const Atom&) = default;

private:
  explicit Atom(std::uint64_t k) : m_key(k) {}
  std::uint64_t m_key = 0;
};

struct Factor {
  Atom atom;
  int exp = 0;
  friend auto operator<=>(const Factor&, const Factor&) = default;
};

/// Product of atoms with integer exponents, sorted by atom.
class Monomial {
public:
  Monomial() = default;
  explicit Monomial(Atom a, int e = 1);

  const std::vector<Factor>& factors() const { return m_factors; }
  bool isOne() const { return m_factors.empty(); }
  int degreeIn(Atom a) const;
  bool hasGroup() const;
  bool hasBase() const;
  bool invertible() const;

  Monomial operator*(const Monomial& o) const;
  Monomial inverse() const;
  Monomial without(Atom a) const;

  std::string str() const;
  friend auto operator<=>(const Monomial&, const Monomial&) = default;

private:
  friend class ScalarExpr;
  std::vector<Factor> m_factors;
};

struct Term {
  Monomial mono;
  Gaussian coeff;
  friend bool operator==(const Term&, const Term&) = default;
};

/// Element of Q(i)[a, abar^{+-1}, b, ..., base symbols] in normal form: terms
/// sorted by monomial, like terms collected, zero terms dropped. Equality is
/// structural equality of normal forms.
class ScalarExpr {
public:
  ScalarExpr() = default;
  ScalarExpr(long c) : ScalarExpr(Gaussian(c)) {}
  ScalarExpr(Gaussian c);
  ScalarExpr(Atom a);
  ScalarExpr(Monomial m, Gaussian c = 1);

  static ScalarExpr i() { return ScalarExpr(Gaussian::i()); }
  static ScalarExpr group(GroupName n, bool conj = false) { return Atom::group(n, conj); }
  static ScalarExpr base(BaseName n, bool conj = false) { return Atom::base(n, conj); }
  /// Parse the canonical text format (also accepts '/' by invertible monomials).
  static ScalarExpr parse(std::string_view text);

  const std::vector<Term>& terms() const { return m_terms; }
  std::size_t size() const { return m_terms.size(); }
  bool isZero() const { return m_terms.empty(); }
  bool isConstant() const;
  std::optional<Gaussian> constantValue() const;
  bool hasGroup() const;
  bool hasBase() const;
  bool contains(Atom a) const;
  /// Single term whose monomial only involves a and abar.
  bool invertible() const;

  ScalarExpr& operator+=(const ScalarExpr& o);
  ScalarExpr& operator-=(const ScalarExpr& o);
  ScalarExpr& operator*=(const ScalarExpr& o) { return *this = *this * o; }
  friend ScalarExpr operator+(ScalarExpr x, const ScalarExpr& y) { return x += y; }
  friend ScalarExpr operator-(ScalarExpr x, const ScalarExpr& y) { return x -= y; }
  friend ScalarExpr operator*(const ScalarExpr& x, const ScalarExpr& y);
  /// Division is only defined by invertible expressions.
  friend ScalarExpr operator/(const ScalarExpr& x, const ScalarExpr& y) {
    return x * y.inverse();
  }
  ScalarExpr operator-() const;
  ScalarExpr scaled(const Gaussian& c) const;

  ScalarExpr inverse() const;
  ScalarExpr pow(int n) const;

  /// Partial derivative in a group parameter (conjugates are independent).
  ScalarExpr partial(Atom groupAtom) const;

  /// Splits x = coeff * atom + rest, with rest free of `atom`; nullopt if
  /// x is not affine in `atom`.
  std::optional<std::pair<ScalarExpr, ScalarExpr>> linearIn(Atom atom) const;

  /// Coefficient of the given group/base-free split: groups the expression by
  /// its group-parameter monomial.
  std::map<Monomial, ScalarExpr> byGroupMonomial() const;

  std::string str() const;
  std::string latex() const;

  friend bool operator==(const ScalarExpr&, const ScalarExpr&) = default;

private:
  void normalize();
  std::vector<Term> m_terms;
};

ScalarExpr conjugate(const ScalarExpr& x);

/// Applies the frame derivation `dir` with the Leibniz rule; the result is
/// re-canonicalized through the frame bracket relations.
ScalarExpr derive(const ScalarExpr& x, Letter dir);

/// Applies the word (outermost letter first) to x.
ScalarExpr applyWord(std::span<const Letter> word, const ScalarExpr& x);

/// Rewrites word(sym) into canonical form. `sym` is a base symbol without word.
ScalarExpr reorderDerivations(std::span<const Letter> word, BaseName sym, bool conj = false);

/// Bracket [x, y] of two frame fields as a list of (coefficient, field).
std::vector<std::pair<ScalarExpr, Letter>> frameBracket(Letter x, Letter y);

/// Pairs of letters for which no bracket relation is known (empty for the
/// built-in frame).
std::vector<std::pair<Letter, Letter>> missingFrameRelations();

/// Differential operator sum_i g_i * W_i, keyed by word (outermost first).
using OperatorPoly = std::map<Word, ScalarExpr>;

enum class RewriteStrategy { LeftmostInversion, RightmostInversion };

/// Normal-orders a word as a differential operator, choosing the adjacent
/// inversion to rewrite by `strategy`. Used to audit confluence.
OperatorPoly normalOrder(std::span<const Letter> word, RewriteStrategy strategy);
/// Applies an operator polynomial to a base symbol.
ScalarExpr applyOperator(const OperatorPoly& op, BaseName sym, bool conj = false);

/// Simultaneous substitution of group parameters. Conjugated parameters
/// must be provided explicitly when they occur. Throws if a is replaced by
/// a non-invertible expression.
ScalarExpr substituteGroup(const ScalarExpr& x, const std::map<Atom, ScalarExpr>& map);

/// Replaces base symbols (and all their derivatives) by expressions; keys
/// are stems (no word), and conjugated keys are derived automatically from
/// unconjugated ones when absent. Iterates until no key symbol remains.
ScalarExpr substituteBase(const ScalarExpr& x, const std::map<Atom, ScalarExpr>& map,
                          int maxRounds = 16);

/// Replaces atoms for which `rule` returns a value, repeating until no rule
/// fires. Throws if no fixed point is reached within `maxRounds`.
ScalarExpr rewriteAtoms(const ScalarExpr& x, const std::function<std::optional<ScalarExpr>(Atom)>& rule,
                        int maxRounds = 64);

/// Sends every base symbol to zero.
ScalarExpr flatten(const ScalarExpr& x);

struct ScalarError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace crequiv

#endif
