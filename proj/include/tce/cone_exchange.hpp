#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "continued_fraction.hpp"
#include "errors.hpp"
#include "expression.hpp"
#include "numeric.hpp"
#include "zlambda.hpp"

namespace tce {

struct Point {
  Real re;
  Real im;
};

inline Point operator+(const Point& z, const Point& w) { return {z.re + w.re, z.im + w.im}; }
inline Point operator-(const Point& z, const Point& w) { return {z.re - w.re, z.im - w.im}; }
inline Point operator+(const Point& z, const Real& x) { return {z.re + x, z.im}; }
inline Point operator-(const Point& z, const Real& x) { return {z.re - x, z.im}; }
inline Point operator*(const Real& a, const Point& z) { return {a * z.re, a * z.im}; }
inline Real abs(const Point& z) { return mp::sqrt(z.re * z.re + z.im * z.im); }
inline Real distance(const Point& z, const Point& w) {
  const Real dx = z.re - w.re;
  const Real dy = z.im - w.im;
  return mp::sqrt(dx * dx + dy * dy);
}

enum class BoundaryMode { Lenient, Strict };

// C_0 (right of the alpha_0 ray), the middle cone C_1 u ... u C_d, and
// C_{d+1} (left of the pi - alpha_{d+1} ray).
enum class MacroCone { Right, Middle, Left };

// Itinerary symbol: -1 for C_{d+1}, 0 for the middle cone, +1 for C_0.
inline int itinerary_symbol(MacroCone c) {
  switch (c) {
    case MacroCone::Right: return 1;
    case MacroCone::Left: return -1;
    default: return 0;
  }
}

// Floating-point description of the cone partition and of the rotation
// exchange E for angles alpha_0..alpha_{d+1} and a permutation tau of 1..d.
class ConeGeometry {
 public:
  ConeGeometry(std::vector<Real> alpha, std::vector<int> tau, unsigned bits)
      : bits_(bits), alpha_(std::move(alpha)), tau_(std::move(tau)) {
    PrecisionScope scope(bits_);
    if (alpha_.size() < 3) throw InvalidParameters("need at least three angles (d >= 1)");
    const std::size_t d = alpha_.size() - 2;
    if (tau_.size() != d)
      throw InvalidParameters("permutation has " + std::to_string(tau_.size()) + " entries, expected " +
                              std::to_string(d));
    std::vector<bool> seen(d + 1, false);
    for (int t : tau_) {
      if (t < 1 || static_cast<std::size_t>(t) > d || seen[static_cast<std::size_t>(t)])
        throw InvalidParameters("tau is not a permutation of 1..d");
      seen[static_cast<std::size_t>(t)] = true;
    }
    Real pi;
    mpfr_const_pi(pi.backend().data(), MPFR_RNDN);
    Real sum = 0;
    for (const Real& a : alpha_) {
      if (!(a > 0 && a < pi)) throw InvalidParameters("every angle must lie in (0, pi)");
      sum += a;
    }
    if (mp::abs(sum - pi) > pow2(4 - static_cast<int>(bits_)))
      throw InvalidParameters("angles sum to " + format_real(sum, 64) + ", not pi");

    guard_ = guard_tolerance(bits_);
    Real b = 0;
    for (std::size_t j = 0; j <= d; ++j) {
      b += alpha_[j];
      boundary_cos_.push_back(mp::cos(b));
      boundary_sin_.push_back(mp::sin(b));
    }
    // theta_j = sum_{tau(k) < tau(j)} alpha_k - sum_{k < j} alpha_k, both over 1..d.
    std::vector<std::size_t> slot_owner(d + 1);
    for (std::size_t j = 1; j <= d; ++j) slot_owner[static_cast<std::size_t>(tau_[j - 1])] = j;
    theta_.assign(d + 1, Real(0));
    for (std::size_t j = 1; j <= d; ++j) {
      Real before_image = 0;
      Real before_source = 0;
      for (std::size_t k = 1; k <= d; ++k) {
        if (tau_[k - 1] < tau_[j - 1]) before_image += alpha_[k];
        if (k < j) before_source += alpha_[k];
      }
      theta_[j] = before_image - before_source;
    }
    rot_cos_.assign(d + 1, Real(1));
    rot_sin_.assign(d + 1, Real(0));
    for (std::size_t j = 1; j <= d; ++j) {
      rot_cos_[j] = mp::cos(theta_[j]);
      rot_sin_[j] = mp::sin(theta_[j]);
    }
    // Image sectors of E, in slot order tau = 1..d.
    image_owner_ = slot_owner;
    Real ib = alpha_[0];
    image_cos_.push_back(mp::cos(ib));
    image_sin_.push_back(mp::sin(ib));
    for (std::size_t s = 1; s <= d; ++s) {
      ib += alpha_[slot_owner[s]];
      image_cos_.push_back(mp::cos(ib));
      image_sin_.push_back(mp::sin(ib));
    }
    cot_first_ = mp::cos(alpha_[0]) / mp::sin(alpha_[0]);
    cot_last_ = mp::cos(alpha_[d + 1]) / mp::sin(alpha_[d + 1]);
    cot_sum_ = cot_first_ + cot_last_;
    sin_first_ = mp::sin(alpha_[0]);
    sin_last_ = mp::sin(alpha_[d + 1]);
    sin_outer_ = mp::sin(alpha_[0] + alpha_[d + 1]);
  }

  std::size_t d() const { return alpha_.size() - 2; }
  unsigned precision_bits() const { return bits_; }
  const std::vector<Real>& alpha() const { return alpha_; }
  const std::vector<int>& tau() const { return tau_; }
  const Real& theta(std::size_t j) const { return theta_.at(j); }
  const Real& cot_first() const { return cot_first_; }
  const Real& cot_last() const { return cot_last_; }
  const Real& cot_sum() const { return cot_sum_; }
  const Real& sin_first() const { return sin_first_; }
  const Real& sin_last() const { return sin_last_; }
  const Real& sin_outer() const { return sin_outer_; }
  const Real& guard() const { return guard_; }

  // Oblique coordinates: u = x - y cot(alpha_0) is constant along the alpha_0
  // ray direction, v = x + y cot(alpha_{d+1}) along the pi - alpha_{d+1}
  // direction. A translate of C_0 with vertex c is {u > c}, of C_{d+1} is
  // {v < c}, of the middle cone is {u <= c, v >= c}.
  Real u_coord(const Point& z) const { return z.re - z.im * cot_first_; }
  Real v_coord(const Point& z) const { return z.re + z.im * cot_last_; }
  Point from_uv(const Real& u, const Real& v) const {
    return {(cot_last_ * u + cot_first_ * v) / cot_sum_, (v - u) / cot_sum_};
  }

  // Index j with Arg z in W_j (W_0 = [0, alpha_0), W_1 closed, later ones
  // half-open on the left); 0 belongs to C_1.
  std::size_t cone_index(const Point& z, BoundaryMode mode = BoundaryMode::Lenient) const {
    const std::size_t dd = d();
    if (z.im < 0) throw NotInDomain("point below the real axis");
    if (z.im == 0) {
      if (z.re > 0) return 0;
      if (z.re < 0) return dd + 1;
      return 1;
    }
    const Real scale = mp::max(mp::abs(z.re), z.im) * guard_;
    for (std::size_t j = 0; j <= dd; ++j) {
      const Real c = boundary_cos_[j] * z.im - boundary_sin_[j] * z.re;  // > 0 iff Arg z > B_j
      if (mode == BoundaryMode::Strict && mp::abs(c) <= scale)
        throw PrecisionAmbiguous("point within guard tolerance of cone boundary " + std::to_string(j));
      if (j == 0 ? c < 0 : c <= 0) return j;
    }
    return dd + 1;
  }

  MacroCone macro_of(std::size_t j) const {
    if (j == 0) return MacroCone::Right;
    if (j == d() + 1) return MacroCone::Left;
    return MacroCone::Middle;
  }

  MacroCone macro_cone(const Point& z, BoundaryMode mode = BoundaryMode::Lenient) const {
    return macro_of(cone_index(z, mode));
  }

  Point rotate(const Point& z, std::size_t j) const {
    if (j == 0 || j > d() || (z.re == 0 && z.im == 0)) return z;
    return {z.re * rot_cos_[j] - z.im * rot_sin_[j], z.re * rot_sin_[j] + z.im * rot_cos_[j]};
  }

  Point rotate_back(const Point& z, std::size_t j) const {
    if (j == 0 || j > d() || (z.re == 0 && z.im == 0)) return z;
    return {z.re * rot_cos_[j] + z.im * rot_sin_[j], z.im * rot_cos_[j] - z.re * rot_sin_[j]};
  }

  Point exchange(const Point& z, BoundaryMode mode = BoundaryMode::Lenient) const {
    return rotate(z, cone_index(z, mode));
  }

  // Cone j whose E-image contains w; requires w in the middle cone.
  std::size_t image_cone(const Point& w, BoundaryMode mode = BoundaryMode::Lenient) const {
    if (w.im == 0 && w.re == 0) return 1;
    if (macro_cone(w, mode) != MacroCone::Middle) throw NotInDomain("E^{-1} is only needed on the middle cone");
    const Real scale = mp::max(mp::abs(w.re), w.im) * guard_;
    for (std::size_t s = 1; s <= d(); ++s) {
      const Real c = image_cos_[s] * w.im - image_sin_[s] * w.re;
      if (s < d() && mode == BoundaryMode::Strict && mp::abs(c) <= scale)
        throw PrecisionAmbiguous("point within guard tolerance of an image sector boundary");
      if (c <= 0) return image_owner_[s];
    }
    return image_owner_[d()];
  }

  Point exchange_inverse(const Point& w, BoundaryMode mode = BoundaryMode::Lenient) const {
    if (macro_cone(w, mode) != MacroCone::Middle) return w;
    return rotate_back(w, image_cone(w, mode));
  }

  // Rays bounding the E-image of C_j, as angles' (cos, sin) pairs.
  std::pair<std::pair<Real, Real>, std::pair<Real, Real>> image_sector(std::size_t j) const {
    for (std::size_t s = 1; s <= d(); ++s)
      if (image_owner_[s] == j)
        return {{image_cos_[s - 1], image_sin_[s - 1]}, {image_cos_[s], image_sin_[s]}};
    throw std::out_of_range("image_sector: no such cone");
  }

 private:
  unsigned bits_;
  std::vector<Real> alpha_;
  std::vector<int> tau_;
  Real guard_;
  std::vector<Real> boundary_cos_, boundary_sin_;
  std::vector<Real> theta_, rot_cos_, rot_sin_;
  std::vector<std::size_t> image_owner_;
  std::vector<Real> image_cos_, image_sin_;
  Real cot_first_, cot_last_, cot_sum_, sin_first_, sin_last_, sin_outer_;
};

// Translation data with real-valued lambda, eta and rho. Used directly for
// rescaled maps, whose eta no longer has the form p - q*lambda.
struct RelaxedParams {
  std::shared_ptr<const ConeGeometry> geometry;
  Real lambda;
  Real eta;
  Real rho;

  Point translate(const Point& z, MacroCone c) const {
    switch (c) {
      case MacroCone::Left: return z + lambda;
      case MacroCone::Right: return z - rho;
      default: return z - eta;
    }
  }
};

inline Point translate_G(const RelaxedParams& k, const Point& z, BoundaryMode mode = BoundaryMode::Lenient) {
  return k.translate(z, k.geometry->macro_cone(z, mode));
}

// F = G o E. E preserves the three macro cones, so G's branch is read off z.
inline Point step_F(const RelaxedParams& k, const Point& z, BoundaryMode mode = BoundaryMode::Lenient) {
  const std::size_t j = k.geometry->cone_index(z, mode);
  return k.translate(k.geometry->rotate(z, j), k.geometry->macro_of(j));
}

namespace detail {
struct CacheSlot {
  std::mutex mu;
  std::shared_ptr<void> value;
};
}  // namespace detail

// kappa = (alpha, tau, lambda, eta = p - q*lambda, rho = 1).
class TceParams {
 public:
  TceParams(std::vector<std::string> alpha_text, std::vector<int> tau, ContinuedFraction lambda, BigInt p, BigInt q,
            unsigned bits = kDefaultPrecisionBits)
      : alpha_text_(std::move(alpha_text)), lambda_(std::move(lambda)), p_(std::move(p)), q_(std::move(q)) {
    if (bits < 64) throw InvalidParameters("precision must be at least 64 bits");
    std::vector<Real> alpha;
    for (const auto& t : alpha_text_) alpha.push_back(evaluate_expression(t, bits + 32));
    geometry_ = std::make_shared<const ConeGeometry>(std::move(alpha), std::move(tau), bits);
    init();
  }

  const std::vector<std::string>& alpha_text() const { return alpha_text_; }
  const std::vector<int>& tau() const { return geometry_->tau(); }
  std::size_t d() const { return geometry_->d(); }
  const ContinuedFraction& lambda() const { return lambda_; }
  const BigInt& p() const { return p_; }
  const BigInt& q() const { return q_; }
  ZLambda eta() const { return ZLambda(lambda_, BigRational(p_), BigRational(-q_)); }
  unsigned precision_bits() const { return geometry_->precision_bits(); }
  const ConeGeometry& geometry() const { return *geometry_; }
  const std::shared_ptr<const ConeGeometry>& geometry_ptr() const { return geometry_; }
  const RelaxedParams& relaxed() const { return relaxed_; }
  const Real& lambda_float() const { return relaxed_.lambda; }
  const Real& eta_float() const { return relaxed_.eta; }

  // Same angles and permutation with a new lambda and eta.
  TceParams with_translations(ContinuedFraction lambda, BigInt p, BigInt q) const {
    TceParams out(*this);
    out.lambda_ = std::move(lambda);
    out.p_ = std::move(p);
    out.q_ = std::move(q);
    out.cache_ = std::make_shared<detail::CacheSlot>();
    out.init();
    return out;
  }

  detail::CacheSlot& cache_slot() const { return *cache_; }

  friend bool same_translations(const TceParams& x, const TceParams& y) {
    return x.lambda_ == y.lambda_ && x.p_ == y.p_ && x.q_ == y.q_;
  }

 private:
  void init() {
    if (p_ < 1 || q_ < 1) throw InvalidParameters("eta = p - q*lambda needs p, q >= 1");
    const ZLambda e = eta();
    if ((e + ZLambda::lambda(lambda_)).sign() <= 0 || (ZLambda::constant(lambda_, 1) - e).sign() <= 0)
      throw InvalidParameters("eta = " + p_.str() + " - " + q_.str() + "*lambda is outside (-lambda, 1)");
    const unsigned bits = precision_bits();
    relaxed_.geometry = geometry_;
    relaxed_.lambda = ZLambda::lambda(lambda_).to_float(bits);
    relaxed_.eta = e.to_float(bits);
    PrecisionScope scope(bits);
    relaxed_.rho = Real(1);
  }

  std::vector<std::string> alpha_text_;
  std::shared_ptr<const ConeGeometry> geometry_;
  ContinuedFraction lambda_;
  BigInt p_, q_;
  RelaxedParams relaxed_;
  std::shared_ptr<detail::CacheSlot> cache_ = std::make_shared<detail::CacheSlot>();
};

// Fixture with lambda = Phi, eta = Phi^2 and alpha = (1, 0.5, pi - 2.5, 1), tau swapping 1 and 2.
inline TceParams golden_example(unsigned bits = kDefaultPrecisionBits) {
  return TceParams({"1", "0.5", "pi-2.5", "1"}, {2, 1}, ContinuedFraction::golden(), 1, 1, bits);
}

inline bool is_golden(const TceParams& k) {
  return k.lambda() == ContinuedFraction::golden() && k.p() == 1 && k.q() == 1;
}

inline std::size_t cone_index(const TceParams& k, const Point& z, BoundaryMode mode = BoundaryMode::Lenient) {
  return k.geometry().cone_index(z, mode);
}

inline Point exchange_E(const TceParams& k, const Point& z, BoundaryMode mode = BoundaryMode::Lenient) {
  return k.geometry().exchange(z, mode);
}

inline Point exchange_E_inverse(const TceParams& k, const Point& w, BoundaryMode mode = BoundaryMode::Lenient) {
  return k.geometry().exchange_inverse(w, mode);
}

inline Point translate_G(const TceParams& k, const Point& z, BoundaryMode mode = BoundaryMode::Lenient) {
  return translate_G(k.relaxed(), z, mode);
}

inline Point step_F(const TceParams& k, const Point& z, BoundaryMode mode = BoundaryMode::Lenient) {
  return step_F(k.relaxed(), z, mode);
}

// Parameters (alpha, tau, lambda/a, eta/a, 1/a), conjugate to kappa via z -> a z.
inline RelaxedParams scale_conjugate(const TceParams& k, const BigRational& a) {
  if (a <= 0) throw std::invalid_argument("scale_conjugate needs a > 0");
  PrecisionScope scope(k.precision_bits());
  const Real ar(a);
  return {k.geometry_ptr(), k.lambda_float() / ar, k.eta_float() / ar, Real(1) / ar};
}

inline std::vector<int> itinerary(const TceParams& k, Point z, std::size_t steps,
                                  BoundaryMode mode = BoundaryMode::Lenient) {
  if (steps < 1) throw std::invalid_argument("itinerary needs at least one step");
  std::vector<int> word;
  word.reserve(steps);
  for (std::size_t n = 0; n < steps; ++n) {
    word.push_back(itinerary_symbol(k.geometry().macro_cone(z, mode)));
    if (n + 1 < steps) z = step_F(k, z, mode);
  }
  return word;
}

}  // namespace tce
