#ifndef CREQUIV_GAUSSIAN_HPP
#define CREQUIV_GAUSSIAN_HPP

#include <gmpxx.h>

#include <compare>
#include <string>

namespace crequiv {

/// Exact element of the Gaussian rationals Q(i), stored as re + i*im.
class Gaussian {
public:
  Gaussian() = default;
  Gaussian(long v) : m_re(v), m_im(0) {}
  Gaussian(mpq_class re, mpq_class im = 0) : m_re(std::move(re)), m_im(std::move(im)) {
    m_re.canonicalize();
    m_im.canonicalize();
  }

  static Gaussian i() { return Gaussian(0, 1); }
  static Gaussian rational(long num, long den) { return Gaussian(mpq_class(num, den)); }

  const mpq_class& re() const { return m_re; }
  const mpq_class& im() const { return m_im; }

  bool isZero() const { return sgn(m_re) == 0 && sgn(m_im) == 0; }
  bool isOne() const { return m_re == 1 && sgn(m_im) == 0; }
  bool isReal() const { return sgn(m_im) == 0; }

  Gaussian conj() const { return Gaussian(m_re, -m_im); }
  Gaussian inverse() const;

  Gaussian& operator+=(const Gaussian& o) {
    m_re += o.m_re;
    m_im += o.m_im;
    return *this;
  }
  Gaussian& operator-=(const Gaussian& o) {
    m_re -= o.m_re;
    m_im -= o.m_im;
    return *this;
  }
  Gaussian& operator*=(const Gaussian& o);
  Gaussian& operator/=(const Gaussian& o) { return *this *= o.inverse(); }

  friend Gaussian operator+(Gaussian a, const Gaussian& b) { return a += b; }
  friend Gaussian operator-(Gaussian a, const Gaussian& b) { return a -= b; }
  friend Gaussian operator*(Gaussian a, const Gaussian& b) { return a *= b; }
  friend Gaussian operator/(Gaussian a, const Gaussian& b) { return a /= b; }
  Gaussian operator-() const { return Gaussian(-m_re, -m_im); }

  friend bool operator==(const Gaussian& a, const Gaussian& b) {
    return a.m_re == b.m_re && a.m_im == b.m_im;
  }
  /// Lexicographic on (re, im); only used to make containers deterministic.
  friend std::strong_ordering operator<=>(const Gaussian& a, const Gaussian& b) {
    int c = cmp(a.m_re, b.m_re);
    if (c == 0) c = cmp(a.m_im, b.m_im);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  /// Canonical text: "3/2", "-I", "(1/3+2*I)".
  std::string str() const;

private:
  mpq_class m_re{0};
  mpq_class m_im{0};
};

}  // namespace crequiv

#endif
