#pragma once

#include <string>
#include <utility>

#include "continued_fraction.hpp"
#include "errors.hpp"
#include "numeric.hpp"

namespace tce {

namespace detail {

// sign(lambda - num/den) for 0 < num/den < 1 by comparing continued fraction
// expansions. A larger quotient at an odd position makes the number smaller;
// at an even position it makes it larger. A terminating rational behaves as
// if its next quotient were infinite.
template <class Int>
int compare_lambda_with_fraction(const ContinuedFraction& cf, Int num, Int den) {
  for (std::size_t k = 1;; ++k) {
    const Int r = den / num;
    const Int rem = den % num;
    const Quotient lk = cf.quotient(k);
    if (r != Int(lk)) {
      const bool fraction_bigger_quotient = r > Int(lk);
      const bool fraction_smaller = (k % 2 == 1) == fraction_bigger_quotient;
      return fraction_smaller ? 1 : -1;
    }
    if (rem == 0) return ((k + 1) % 2 == 1) ? 1 : -1;
    den = num;
    num = rem;
  }
}

}  // namespace detail

// sign(lambda - num/den) for den > 0.
inline int compare_lambda(const ContinuedFraction& cf, const BigInt& num, const BigInt& den) {
  if (num <= 0) return 1;
  if (num >= den) return -1;
  if (den <= BigInt(std::numeric_limits<std::uint64_t>::max() / 2))
    return detail::compare_lambda_with_fraction<std::uint64_t>(cf, num.convert_to<std::uint64_t>(),
                                                               den.convert_to<std::uint64_t>());
  return detail::compare_lambda_with_fraction<BigInt>(cf, num, den);
}

inline int compare_lambda(const ContinuedFraction& cf, const BigRational& r) {
  return compare_lambda(cf, mp::numerator(r), mp::denominator(r));
}

// An element a + b*lambda of Q + Q*lambda.
class ZLambda {
 public:
  explicit ZLambda(ContinuedFraction lambda, BigRational a = 0, BigRational b = 0)
      : lambda_(std::move(lambda)), a_(std::move(a)), b_(std::move(b)) {}

  static ZLambda constant(const ContinuedFraction& cf, const BigRational& a) { return ZLambda(cf, a, 0); }
  static ZLambda lambda(const ContinuedFraction& cf) { return ZLambda(cf, 0, 1); }

  const BigRational& a() const { return a_; }
  const BigRational& b() const { return b_; }
  const ContinuedFraction& field() const { return lambda_; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  ZLambda operator-() const { return ZLambda(lambda_, -a_, -b_); }

  friend ZLambda operator+(const ZLambda& x, const ZLambda& y) {
    check_same(x, y);
    return ZLambda(x.lambda_, x.a_ + y.a_, x.b_ + y.b_);
  }
  friend ZLambda operator-(const ZLambda& x, const ZLambda& y) {
    check_same(x, y);
    return ZLambda(x.lambda_, x.a_ - y.a_, x.b_ - y.b_);
  }
  friend ZLambda operator+(const ZLambda& x, const BigRational& c) { return ZLambda(x.lambda_, x.a_ + c, x.b_); }
  friend ZLambda operator-(const ZLambda& x, const BigRational& c) { return ZLambda(x.lambda_, x.a_ - c, x.b_); }
  friend ZLambda operator*(const BigRational& c, const ZLambda& x) { return ZLambda(x.lambda_, c * x.a_, c * x.b_); }
  friend ZLambda operator/(const ZLambda& x, const BigRational& c) {
    if (c == 0) throw std::domain_error("division of ZLambda by zero");
    return ZLambda(x.lambda_, x.a_ / c, x.b_ / c);
  }

  ZLambda& operator+=(const ZLambda& y) { return *this = *this + y; }
  ZLambda& operator-=(const ZLambda& y) { return *this = *this - y; }

  // Coefficient equality; lambda is irrational so this is value equality.
  friend bool operator==(const ZLambda& x, const ZLambda& y) {
    return x.lambda_ == y.lambda_ && x.a_ == y.a_ && x.b_ == y.b_;
  }

  // Exact sign of a + b*lambda.
  int sign() const {
    if (b_ == 0) return a_ > 0 ? 1 : (a_ < 0 ? -1 : 0);
    // a + b*lambda = b * (lambda - r) with r = -a/b.
    const BigRational r = -a_ / b_;
    const int s = compare_lambda(lambda_, r);
    return b_ > 0 ? s : -s;
  }

  // Value within 2^(1-bits) * (|a| + |b|). The result carries `bits` bits.
  Real to_float(unsigned bits) const {
    if (bits < 32) throw std::invalid_argument("to_float needs at least 32 bits");
    if (b_ == 0) {
      PrecisionScope scope(bits);
      return Real(a_);
    }
    // Extra working bits cover cancellation between a and b*lambda.
    const BigInt mag = mp::abs(mp::numerator(b_)) / mp::denominator(b_) + 1;
    const unsigned extra = 32 + static_cast<unsigned>(mp::msb(mag)) + 1;
    const unsigned work = (bits + extra + 31) / 32 * 32;
    const Real lam = lambda_.to_float(work);
    Real exact_ish;
    {
      PrecisionScope scope(work);
      exact_ish = Real(a_) + Real(b_) * lam;
    }
    PrecisionScope scope(bits);
    return Real(exact_ish);
  }

  std::string str() const { return to_string(a_) + " + " + to_string(b_) + "*lambda"; }

 private:
  static void check_same(const ZLambda& x, const ZLambda& y) {
    if (!(x.lambda_ == y.lambda_))
      throw MixedLambda("ZLambda operands over " + x.lambda_.describe() + " and " + y.lambda_.describe());
  }

  ContinuedFraction lambda_;
  BigRational a_;
  BigRational b_;
};

inline int sign(const ZLambda& x) { return x.sign(); }
inline int compare(const ZLambda& x, const ZLambda& y) { return (x - y).sign(); }
inline ZLambda abs(const ZLambda& x) { return x.sign() < 0 ? -x : x; }
inline Real to_float(const ZLambda& x, unsigned bits) { return x.to_float(bits); }

// Delta_{m,n} = Q_{m,n} lambda - P_{m,n}; the sentinel (-1, 0) gives -1.
inline ZLambda delta(const ContinuedFraction& cf, const SemiIndex& idx) {
  if (idx.m == -1 && idx.n == 0) return ZLambda::constant(cf, -1);
  const ConvergentPair pq = semiconvergent(cf, idx);
  return ZLambda(cf, BigRational(-pq.p), BigRational(pq.q));
}

struct CheckResult {
  bool pass = false;
  Real max_deviation;
  explicit operator bool() const { return pass; }
};

// Compares Delta_{j,n}(g^m lambda) with -Delta_{m+j,n}(lambda) / Delta_{m-1,0}(lambda)
// numerically at `bits` bits; the two sides live over different lambdas.
inline CheckResult scaled_delta_identity_check(const ContinuedFraction& cf, int m, int j, std::uint64_t n,
                                               unsigned bits = kDefaultPrecisionBits) {
  if (m < 1 || j < 0) throw std::invalid_argument("scaled_delta_identity_check needs m >= 1, j >= 0");
  require_index(cf, {m + j, n});
  const ContinuedFraction shifted = gauss_shift(cf, static_cast<std::size_t>(m));
  const Real lhs = delta(shifted, {j, n}).to_float(bits + 16);
  const Real num = delta(cf, {m + j, n}).to_float(bits + 16);
  const Real den = delta(cf, {m - 1, 0}).to_float(bits + 16);
  PrecisionScope scope(bits);
  const Real rhs = -num / den;
  CheckResult res;
  res.max_deviation = mp::abs(lhs - rhs);
  res.pass = res.max_deviation <= agreement_tolerance(bits);
  return res;
}

}  // namespace tce
