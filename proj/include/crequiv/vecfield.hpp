#ifndef CREQUIV_VECFIELD_HPP
#define CREQUIV_VECFIELD_HPP

#include "crequiv/gaussian.hpp"
#include "crequiv/liealg.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crequiv {

struct VecFieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Polynomial over Q(i) in a fixed number of variables.
class Poly {
public:
  using Exponents = std::vector<unsigned>;

  explicit Poly(std::size_t nvars = 0) : m_n(nvars) {}
  static Poly constant(std::size_t nvars, const Gaussian& c);
  static Poly var(std::size_t nvars, std::size_t i);
  /// Parses + - * ^ ( ), integers, I and the given variable names.
  static Poly parse(std::string_view text, const std::vector<std::string>& vars);

  std::size_t nvars() const { return m_n; }
  const std::map<Exponents, Gaussian>& terms() const { return m_terms; }
  bool isZero() const { return m_terms.empty(); }
  std::size_t totalDegree() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  Poly operator-() const;
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(const Gaussian& c, const Poly& p);
  Poly pow(unsigned k) const;

  Poly derivative(std::size_t i) const;
  Gaussian evaluate(const std::vector<Gaussian>& point) const;
  /// Replaces variable i by images[i]; all images share one ring.
  Poly substitute(const std::vector<Poly>& images) const;
  /// Conjugates the coefficients only.
  Poly conjCoefficients() const;

  std::string str(const std::vector<std::string>& vars) const;

  friend bool operator==(const Poly&, const Poly&) = default;

private:
  void add(const Exponents& e, const Gaussian& c);
  std::size_t m_n = 0;
  std::map<Exponents, Gaussian> m_terms;
};

/// Named coordinate system.
struct Chart {
  std::string name;
  std::vector<std::string> vars;

  /// (z, zb, u1, u2, u3) on the model surface.
  static Chart real();
  /// (z, w1, w2, w3) on C^4.
  static Chart holomorphic();
  std::size_t index(const std::string& var) const;
  friend bool operator==(const Chart&, const Chart&) = default;
};

class PolyVectorField {
public:
  PolyVectorField(Chart chart, std::vector<Poly> components);
  /// Components given as polynomial strings keyed by coordinate name;
  /// missing coordinates are zero.
  static PolyVectorField parse(const Chart& chart, const std::map<std::string, std::string>& components);

  const Chart& chart() const { return m_chart; }
  const std::vector<Poly>& components() const { return m_comp; }
  const Poly& component(const std::string& var) const { return m_comp.at(m_chart.index(var)); }

  Poly apply(const Poly& f) const;
  PolyVectorField scaled(const Gaussian& c) const;
  PolyVectorField operator+(const PolyVectorField& o) const;
  PolyVectorField operator-(const PolyVectorField& o) const;
  bool isZero() const;
  std::vector<Gaussian> at(const std::vector<Gaussian>& point) const;
  /// On the real chart: conjugate coefficients and swap z <-> zb.
  PolyVectorField conjugateReal() const;

  std::string str() const;
  friend bool operator==(const PolyVectorField&, const PolyVectorField&) = default;

private:
  Chart m_chart;
  std::vector<Poly> m_comp;
};

/// Componentwise X(Y^i) - Y(X^i); throws VecFieldError on chart mismatch.
PolyVectorField lieBracketVF(const PolyVectorField& x, const PolyVectorField& y);

/// Rank of the evaluated coefficient matrix.
std::size_t rankAtPoint(const std::vector<PolyVectorField>& fields, const std::vector<Gaussian>& point);

/// Expands every pairwise bracket in the span of the labelled fields with
/// constant coefficients; throws VecFieldError naming the pair and the
/// remainder if a bracket leaves the span.
LieAlgebra commutatorTable(const std::vector<std::pair<std::string, PolyVectorField>>& fields);

/// Graph v_j = phi_j(z, zb), j = 1..3.
struct ModelSurface {
  std::vector<Poly> phi;  // in the variables (z, zb)

  static ModelSurface beloshapka();
  /// {"vars": ["z", "zb"], "equations": ["z*zb", ...]}.
  static ModelSurface fromJson(const std::string& text);
  /// phi_j is fixed by conjugating coefficients and swapping z <-> zb.
  bool isReal() const;
};

/// Applies X + conj(X) (twice the real part of a holomorphic field) to each
/// v_j - phi_j and reduces with w_j = u_j + I*phi_j; true iff every residue
/// vanishes. Fields on the real chart are intrinsic to M and return true.
bool checkTangency(const PolyVectorField& x, const ModelSurface& m);
/// The residues behind checkTangency, in the variables (z, zb, u1, u2, u3).
std::vector<Poly> tangencyResidues(const PolyVectorField& x, const ModelSurface& m);

/// The frame generator L_c on the real chart.
PolyVectorField modelL();
/// Adapted frame (L, Lb, T, S, Sb) built from modelL by brackets.
std::vector<std::pair<std::string, PolyVectorField>> adaptedFrame();
/// The printed frame (L, Lb, T, S, Sb).
std::vector<std::pair<std::string, PolyVectorField>> printedFrame();
/// The 7 automorphism fields (S2, S1, T, L2, L1, D, R) on the holomorphic
/// chart.
std::vector<std::pair<std::string, PolyVectorField>> automorphismFields();

}  // namespace crequiv

#endif
