#ifndef CREQUIV_EXTERIOR_HPP
#define CREQUIV_EXTERIOR_HPP

#include "crequiv/scalar.hpp"

#include <array>
#include <compare>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

namespace crequiv {

enum class Generation : std::uint8_t {
  GroupDifferential,
  MaurerCartan,
  Lifted,
  Base,          // sigma0, ..., the initial coframe
  Intermediate1,  // coframe after the first normalization loop
  Intermediate2,  // coframe after the second normalization loop
  Custom,        // labels declared at runtime (Lie algebra duals, ...)
};

/// Interned 1-form symbol. Ids are assigned in registration order, which is
/// also the wedge order; built-in symbols of one generation are registered in
/// the frame order (sigmabar, sigma, rho, zetabar, zeta).
class OneForm {
public:
  /// Looks up a registered symbol; throws ExteriorError if unknown.
  static OneForm named(std::string_view name);
  /// Registers (or returns the existing) symbol. `conjName` may equal `name`
  /// for real forms; an empty `conjName` also means real.
  static OneForm declare(std::string_view name, Generation gen, std::string_view conjName = {},
                         std::string_view latex = {});

  std::uint16_t id() const { return m_id; }
  const std::string& name() const;
  const std::string& latex() const;
  Generation generation() const;
  OneForm conj() const;

  friend auto operator<=>(const OneForm&, const OneForm&) = default;

private:
  friend class FormMonomial;
  explicit OneForm(std::uint16_t id) : m_id(id) {}
  std::uint16_t m_id = 0;
};

/// Coframe element dual to each frame letter in the base generation.
OneForm baseCoframe(Letter l);
/// Differential of a group parameter.
OneForm groupDifferential(GroupName g, bool conj = false);

/// Strictly increasing list of 1-form ids (degree <= 4).
class FormMonomial {
public:
  static constexpr std::size_t kMaxDegree = 4;

  FormMonomial() = default;
  /// Sorts the factors; `sign` receives the permutation sign, 0 if a factor
  /// repeats.
  static FormMonomial sorted(std::span<const OneForm> factors, int& sign);

  std::size_t degree() const { return m_n; }
  OneForm operator[](std::size_t i) const;
  std::vector<OneForm> factors() const;
  bool contains(OneForm f) const;
  std::string str() const;

  friend auto operator<=>(const FormMonomial&, const FormMonomial&) = default;

private:
  std::uint8_t m_n = 0;
  std::array<std::uint16_t, kMaxDegree> m_ids{};
};

/// Homogeneous exterior form with ScalarExpr coefficients.
class FormExpr {
public:
  using TermMap = std::map<FormMonomial, ScalarExpr>;

  explicit FormExpr(int degree = 0) : m_degree(degree) {}
  FormExpr(OneForm f, ScalarExpr coeff = 1);
  static FormExpr scalar(ScalarExpr f);
  /// coeff * f1 ^ f2 ^ ... in the given order.
  static FormExpr monomial(std::initializer_list<OneForm> factors, ScalarExpr coeff = 1);

  int degree() const { return m_degree; }
  const TermMap& terms() const { return m_terms; }
  bool isZero() const { return m_terms.empty(); }

  /// Coefficient of f1 ^ f2 ^ ... (in the given order, sign included).
  ScalarExpr coefficient(std::initializer_list<OneForm> factors) const;
  ScalarExpr coefficient(const FormMonomial& m) const;
  void add(const FormMonomial& m, const ScalarExpr& c);

  FormExpr& operator+=(const FormExpr& o);
  FormExpr& operator-=(const FormExpr& o);
  friend FormExpr operator+(FormExpr x, const FormExpr& y) { return x += y; }
  friend FormExpr operator-(FormExpr x, const FormExpr& y) { return x -= y; }
  FormExpr operator-() const;
  friend FormExpr operator*(const ScalarExpr& c, const FormExpr& x);

  /// Applies `fn` to every coefficient (dropping zeros).
  template <class Fn>
  FormExpr mapCoefficients(Fn&& fn) const {
    FormExpr out(m_degree);
    for (const auto& [m, c] : m_terms) out.add(m, fn(c));
    return out;
  }

  /// Terms whose monomial contains no symbol of the given generation.
  bool involves(Generation g) const;
  bool involves(OneForm f) const;

  std::string str() const;
  std::string latex() const;

  friend bool operator==(const FormExpr&, const FormExpr&) = default;

private:
  int m_degree = 0;
  TermMap m_terms;
};

FormExpr wedge(const FormExpr& x, const FormExpr& y);
FormExpr conjugate(const FormExpr& x);

/// d of a function: frame derivatives along the base coframe plus partial
/// derivatives along group differentials.
FormExpr differential(const ScalarExpr& f);

/// d of each 1-form symbol; group differentials are closed implicitly.
using StructureRules = std::map<OneForm, FormExpr>;

FormExpr exteriorD(const FormExpr& x, const StructureRules& rules);

/// Contraction with the vector dual to `dual` in a coframe containing it.
FormExpr interior(OneForm dual, const FormExpr& x);

/// Substitutes 1-form symbols by 1-forms.
FormExpr changeBasis(const FormExpr& x, const std::map<OneForm, FormExpr>& map);

/// The structure equations of the initial coframe with E, F, G, J, K opaque.
StructureRules initialDarboux();

/// Secondary bracket functions solved from d^2 = 0.
struct SecondaryBrackets {
  std::map<BaseName, ScalarExpr> table;  // E, F, G, J, K
  /// Relations T(X) = ... on primary symbols found alongside J and K.
  std::map<Atom, ScalarExpr> derivativeRelations;
  /// d^2 components (named "form: monomial") that remain nonzero after
  /// substituting the table and the derivative relations.
  std::vector<std::pair<std::string, ScalarExpr>> residualRelations;
};

/// Solves the d^2 = 0 system of the Darboux structure for E, F, G, J, K.
/// Components are processed by increasing weight (zeta: 1, rho: 2,
/// sigma: 3); throws ExteriorError if some unknown stays undetermined.
SecondaryBrackets deriveSecondaryBrackets(const StructureRules& rules);

/// Substitutes E, F, G, J, K (and their derivatives).
ScalarExpr applySecondary(const ScalarExpr& x, const std::map<BaseName, ScalarExpr>& table);

/// Rewrites E, F, G, J, K and every T(X) atom covered by a derivative
/// relation (also under further derivations).
ScalarExpr reduceModRelations(const ScalarExpr& x, const SecondaryBrackets& sb);

/// d(d theta) for every symbol with a rule, after substituting `table`;
/// only nonzero results are returned.
std::vector<std::pair<OneForm, FormExpr>> checkD2(const StructureRules& rules,
                                                   const std::map<BaseName, ScalarExpr>& table);

struct ExteriorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace crequiv

#endif
