#ifndef CREQUIV_TESTS_PRINTERS_HPP
#define CREQUIV_TESTS_PRINTERS_HPP

#include "crequiv/exterior.hpp"

#include <ostream>

namespace crequiv {

inline void PrintTo(const Gaussian& x, std::ostream* os) { *os << x.str(); }
inline void PrintTo(const ScalarExpr& x, std::ostream* os) { *os << x.str(); }
inline void PrintTo(const FormExpr& x, std::ostream* os) { *os << x.str(); }

}  // namespace crequiv

#endif
