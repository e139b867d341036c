#pragma once

#include <cmath>
#include <cstdint>
#include <ios>
#include <string>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace tce {

namespace mp = boost::multiprecision;

using BigInt = mp::mpz_int;
using BigRational = mp::mpq_rational;
using Real = mp::mpfr_float;

inline constexpr unsigned kDefaultPrecisionBits = 256;

inline unsigned digits10_for_bits(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

// Sets the working precision of newly created Real values for the lifetime of
// the guard. Boost.Multiprecision keeps this setting in a global, so nested
// scopes restore in LIFO order.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits) : saved_(Real::default_precision()) {
    Real::default_precision(digits10_for_bits(bits));
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

inline Real pow2(int e) { return mp::ldexp(Real(1), e); }

// Width of the band around a boundary inside which classification is
// considered unreliable: 2^(8 - bits).
inline Real guard_tolerance(unsigned bits) { return pow2(8 - static_cast<int>(bits)); }

// Agreement threshold between independently computed quantities: 2^(16 - bits).
inline Real agreement_tolerance(unsigned bits) { return pow2(16 - static_cast<int>(bits)); }

inline Real to_real(const BigRational& q) { return Real(q); }
inline Real to_real(const BigInt& z) { return Real(z); }

inline int sign_of(const Real& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

inline unsigned output_digits(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.3));
}

// Locale-independent decimal rendering with ceil(0.3 * bits) significant digits.
inline std::string format_real(const Real& x, unsigned bits) {
  if (x == 0) return "0";
  return x.str(static_cast<std::streamsize>(output_digits(bits)), std::ios_base::scientific);
}

inline std::string to_string(const BigRational& q) {
  if (mp::denominator(q) == 1) return mp::numerator(q).str();
  return mp::numerator(q).str() + "/" + mp::denominator(q).str();
}

}  // namespace tce
