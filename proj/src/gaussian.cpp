#include "crequiv/gaussian.hpp"

#include <stdexcept>

namespace crequiv {

Gaussian Gaussian::inverse() const {
  if (isZero()) throw std::domain_error("division by zero in Q(i)");
  mpq_class n = m_re * m_re + m_im * m_im;
  return Gaussian(m_re / n, -m_im / n);
}

Gaussian& Gaussian::operator*=(const Gaussian& o) {
  mpq_class re = m_re * o.m_re - m_im * o.m_im;
  mpq_class im = m_re * o.m_im + m_im * o.m_re;
  m_re = std::move(re);
  m_im = std::move(im);
  return *this;
}

std::string Gaussian::str() const {
  if (sgn(m_im) == 0) return m_re.get_str();
  std::string imag;
  if (m_im == 1)
    imag = "I";
  else if (m_im == -1)
    imag = "-I";
  else
    imag = m_im.get_str() + "*I";
  if (sgn(m_re) == 0) return imag;
  std::string out = "(" + m_re.get_str();
  if (sgn(m_im) > 0) out += "+";
  return out + imag + ")";
}

}  // namespace crequiv
