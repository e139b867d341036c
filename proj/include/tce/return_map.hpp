#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "cone_exchange.hpp"
#include "continued_fraction.hpp"
#include "regions.hpp"
#include "sampling.hpp"
#include "zlambda.hpp"

namespace tce {

struct BaselineState {
  std::uint64_t t;
  BigInt a;
  BigInt b;
  ZLambda value;  // -eta + b*lambda - a
};

// Exact orbit of 0 on the real line: F^t(0) = -eta + b_t lambda - a_t with
// a_1 = b_1 = 0, b incremented after a negative value and a after a positive
// one. Grown on demand; safe to share between threads.
class BaselineOrbit {
 public:
  BaselineOrbit(ContinuedFraction lambda, BigInt p, BigInt q, unsigned bits)
      : lambda_(std::move(lambda)), p_(std::move(p)), q_(std::move(q)), bits_(bits) {
    lambda_hi_ = lambda_.to_float(bits + 64);
  }

  std::pair<std::uint64_t, std::uint64_t> counts(std::uint64_t t) const {
    std::lock_guard<std::mutex> lock(mu_);
    extend(t);
    return {a_[t - 1], b_[t - 1]};
  }

  int sign(std::uint64_t t) const {
    std::lock_guard<std::mutex> lock(mu_);
    extend(t);
    return sign_[t - 1];
  }

  ZLambda value(std::uint64_t t) const {
    const auto [a, b] = counts(t);
    return ZLambda(lambda_, BigRational(-(BigInt(a) + p_)), BigRational(BigInt(b) + q_));
  }

  BaselineState state(std::uint64_t t) const {
    const auto [a, b] = counts(t);
    return {t, BigInt(a), BigInt(b), value(t)};
  }

  // F^t(0) in floating point; the error is far below the guard tolerance.
  Real value_float(std::uint64_t t) const {
    const auto [a, b] = counts(t);
    PrecisionScope scope(bits_ + 64);
    return Real(BigInt(b) + q_) * lambda_hi_ - Real(BigInt(a) + p_);
  }

 private:
  // Requires the lock.
  void extend(std::uint64_t t) const {
    if (t < 1) throw std::invalid_argument("baseline orbit starts at t = 1");
    if (a_.empty()) push(0, 0);
    while (a_.size() < t) {
      const std::uint64_t a = a_.back();
      const std::uint64_t b = b_.back();
      if (sign_.back() < 0)
        push(a, b + 1);
      else
        push(a + 1, b);
    }
  }

  void push(std::uint64_t a, std::uint64_t b) const {
    const int s = compare_lambda(lambda_, BigInt(a) + p_, BigInt(b) + q_);
    a_.push_back(a);
    b_.push_back(b);
    sign_.push_back(static_cast<std::int8_t>(s));
  }

  ContinuedFraction lambda_;
  BigInt p_, q_;
  unsigned bits_;
  Real lambda_hi_;
  mutable std::mutex mu_;
  mutable std::vector<std::uint64_t> a_, b_;
  mutable std::vector<std::int8_t> sign_;
};

inline std::vector<BaselineState> baseline_orbit(const BaselineOrbit& orbit, std::uint64_t t_max) {
  if (t_max < 1) throw std::invalid_argument("baseline_orbit needs t_max >= 1");
  std::vector<BaselineState> out;
  out.reserve(t_max);
  for (std::uint64_t t = 1; t <= t_max; ++t) out.push_back(orbit.state(t));
  return out;
}

// m0n0: the w-largest strict index with P_{m,n} < p or Q_{m,n} < q.
inline SemiIndex m0n0(const ContinuedFraction& cf, const BigInt& p, const BigInt& q) {
  if (p < 1 || q < 1) throw std::invalid_argument("m0n0 needs p, q >= 1");
  SemiIndex best{0, 0};
  for (SemiIndex idx{0, 0};; idx = next_index(cf, idx)) {
    const ConvergentPair pq = semiconvergent(cf, idx);
    if (pq.p < p || pq.q < q)
      best = idx;
    else
      return best;  // P and Q are nondecreasing along w
  }
}

namespace detail {

struct TceCache {
  TceCache(const TceParams& k)
      : orbit(k.lambda(), k.p(), k.q(), k.precision_bits()), anchor(m0n0(k.lambda(), k.p(), k.q())) {}

  BaselineOrbit orbit;
  SemiIndex anchor;
  std::mutex mu;
  std::map<SemiIndex, std::shared_ptr<const Parallelogram>> atoms;
  std::map<SemiIndex, std::shared_ptr<const URegion>> uregions;
  std::shared_ptr<const Region> x, y;
};

inline TceCache& cache_of(const TceParams& k) {
  CacheSlot& slot = k.cache_slot();
  std::lock_guard<std::mutex> lock(slot.mu);
  if (!slot.value) slot.value = std::make_shared<TceCache>(k);
  return *static_cast<TceCache*>(slot.value.get());
}

}  // namespace detail

inline const BaselineOrbit& baseline(const TceParams& k) { return detail::cache_of(k).orbit; }

inline std::vector<BaselineState> baseline_orbit(const TceParams& k, std::uint64_t t_max) {
  return baseline_orbit(baseline(k), t_max);
}

inline SemiIndex m0n0(const TceParams& k) { return detail::cache_of(k).anchor; }

// Memoized S_{m,n}(lambda) for kappa.
inline std::shared_ptr<const Parallelogram> atom(const TceParams& k, const SemiIndex& idx) {
  auto& c = detail::cache_of(k);
  {
    std::lock_guard<std::mutex> lock(c.mu);
    auto it = c.atoms.find(idx);
    if (it != c.atoms.end()) return it->second;
  }
  auto made = std::make_shared<const Parallelogram>(smn_region(k, idx));
  std::lock_guard<std::mutex> lock(c.mu);
  return c.atoms.emplace(idx, made).first->second;
}

inline std::shared_ptr<const URegion> u_region_cached(const TceParams& k, const SemiIndex& anchor) {
  auto& c = detail::cache_of(k);
  {
    std::lock_guard<std::mutex> lock(c.mu);
    auto it = c.uregions.find(anchor);
    if (it != c.uregions.end()) return it->second;
  }
  auto made = std::make_shared<const URegion>(u_region(k, anchor));
  std::lock_guard<std::mutex> lock(c.mu);
  return c.uregions.emplace(anchor, made).first->second;
}

// (Q_{m,n} - q) + (P_{m,n} - p) + 1, without the threshold check.
inline BigInt return_time_formula(const TceParams& k, const SemiIndex& idx) {
  const ConvergentPair pq = semiconvergent(k.lambda(), idx);
  return (pq.q - k.q()) + (pq.p - k.p()) + 1;
}

// h_{m,n} for w(m,n) > w(m0,n0).
inline BigInt closed_return_time(const TceParams& k, const SemiIndex& idx) {
  require_index(k.lambda(), idx);
  const SemiIndex anchor = m0n0(k);
  if (w_index(k.lambda(), idx) <= w_index(k.lambda(), anchor))
    throw IndexBelowThreshold("h" + to_string(idx) + " requested at or below the threshold " + to_string(anchor));
  return return_time_formula(k, idx);
}

struct Location {
  enum class Kind { Atom, X, Y, Outside };
  Kind kind = Kind::Outside;
  SemiIndex index;

  friend bool operator==(const Location&, const Location&) = default;
};

namespace detail {

inline bool region_test(const Region& r, const Real& u, const Real& v, BoundaryMode mode) {
  switch (r.classify_uv(u, v)) {
    case Membership::Inside: return true;
    case Membership::Outside: return false;
    default:
      if (mode == BoundaryMode::Strict) throw PrecisionAmbiguous("E(z) within guard tolerance of an atom edge");
      return r.resolve_uv(u, v);
  }
}

inline const Region& golden_region(const TceParams& k, bool want_x) {
  auto& c = cache_of(k);
  std::lock_guard<std::mutex> lock(c.mu);
  auto& slot = want_x ? c.x : c.y;
  if (!slot) slot = std::make_shared<const Region>(want_x ? golden_x_region(k) : golden_y_region(k));
  return *slot;
}

inline constexpr std::uint64_t kLocateIndexCap = 1u << 16;

}  // namespace detail

// Finds the atom containing E(z). Atoms are scanned in w-order starting from
// (m0,n0) (or from (2,0) after X and Y in the golden case); the scan stops as
// soon as E(z) leaves U_{k,l}, which contains every later atom.
inline Location locate(const TceParams& k, const Point& z, BoundaryMode mode = BoundaryMode::Lenient) {
  const ConeGeometry& g = k.geometry();
  if (g.macro_cone(z, mode) != MacroCone::Middle) throw NotInDomain("locate needs z in the middle cone");
  if (z.re == 0 && z.im == 0) throw NotInDomain("0 lies in no atom");
  const Point w = g.exchange(z, mode);
  const Real u = g.u_coord(w);
  const Real v = g.v_coord(w);
  SemiIndex idx = m0n0(k);
  if (is_golden(k)) {
    if (detail::region_test(detail::golden_region(k, false), u, v, mode)) return {Location::Kind::Y, {}};
    if (detail::region_test(detail::golden_region(k, true), u, v, mode)) return {Location::Kind::X, {}};
    idx = {2, 0};
  }
  for (std::uint64_t steps = 0; steps < detail::kLocateIndexCap; ++steps, idx = next_index(k.lambda(), idx)) {
    if (!detail::region_test(u_region_cached(k, idx)->region, u, v, mode)) return {Location::Kind::Outside, {}};
    if (detail::region_test(atom(k, idx)->region, u, v, mode)) return {Location::Kind::Atom, idx};
  }
  throw PrecisionAmbiguous("E(z) too close to 0 to resolve its atom");
}

struct ReturnResult {
  BigInt h;
  Point w;
};

struct IterOptions {
  std::uint64_t cap = 10'000'000;
  BoundaryMode mode = BoundaryMode::Strict;
};

// Brute-force first return to the middle cone. By the splitting property
// F^t(z) = E(z) + F^t(0) while the orbit of z shadows that of 0, so only the
// exact baseline orbit is marched; E(z) is computed once.
inline ReturnResult first_return_iter(const TceParams& k, const Point& z, IterOptions opt = {}) {
  const ConeGeometry& g = k.geometry();
  if (g.macro_cone(z, opt.mode) != MacroCone::Middle) throw NotInDomain("first return needs z in the middle cone");
  if (z.re == 0 && z.im == 0) throw NotInDomain("the orbit of 0 stays on the real line and never returns");
  const Point w = g.exchange(z, opt.mode);
  const Real u0 = g.u_coord(w);
  const Real v0 = g.v_coord(w);
  const Real gu = g.guard() * mp::max(Real(1), mp::abs(u0));
  const Real gv = g.guard() * mp::max(Real(1), mp::abs(v0));
  const BaselineOrbit& orbit = baseline(k);
  for (std::uint64_t t = 1; t <= opt.cap; ++t) {
    const Real val = orbit.value_float(t);
    const Real u = u0 + val;
    const Real v = v0 + val;
    const bool inside = u <= 0 && v >= 0;
    const bool clear = (u < -gu && v > gv) || u > gu || v < -gv;
    if (!clear && opt.mode == BoundaryMode::Strict)
      throw PrecisionAmbiguous("orbit passes within guard tolerance of the middle cone at t = " + std::to_string(t));
    if (inside) return {BigInt(t), w + val};
  }
  throw IterationBudgetExceeded("no return within " + std::to_string(opt.cap) + " steps");
}

// Independent cross-check that iterates the planar map itself.
inline ReturnResult first_return_2d(const TceParams& k, Point z, IterOptions opt = {}) {
  const ConeGeometry& g = k.geometry();
  if (g.macro_cone(z, opt.mode) != MacroCone::Middle) throw NotInDomain("first return needs z in the middle cone");
  for (std::uint64_t t = 1; t <= opt.cap; ++t) {
    z = step_F(k, z, opt.mode);
    if (g.macro_cone(z, opt.mode) == MacroCone::Middle) return {BigInt(t), z};
  }
  throw IterationBudgetExceeded("no return within " + std::to_string(opt.cap) + " steps");
}

// Closed-form first return: on E^{-1}(S_{m,n}) with w(m,n) >= w(m0,n0) the
// return time is h_{m,n+1} and R(z) = E(z) + Delta_{m,n+1}. In the golden
// case the complements X and Y return after 2 and 1 steps, translated by
// lambda - eta and -eta.
inline ReturnResult return_map_closed(const TceParams& k, const Point& z, BoundaryMode mode = BoundaryMode::Lenient) {
  const Location loc = locate(k, z, mode);
  const Point w = exchange_E(k, z, mode);
  const unsigned bits = k.precision_bits();
  switch (loc.kind) {
    case Location::Kind::Y:
      return {BigInt(1), w - k.eta_float()};
    case Location::Kind::X:
      return {BigInt(2), w + (ZLambda::lambda(k.lambda()) - k.eta()).to_float(bits)};
    case Location::Kind::Atom: {
      const SemiIndex next{loc.index.m, loc.index.n + 1};
      return {return_time_formula(k, next), w + delta(k.lambda(), next).to_float(bits)};
    }
    default:
      throw NotInDomain("E(z) lies outside U(kappa)");
  }
}

// |F^t(0)| >= |Delta_{m,0}| for 1 <= t < h_{m+1,0}, decided exactly.
inline bool lower_bound_check(const TceParams& k, int m, std::uint64_t t) {
  const auto& cf = k.lambda();
  if (w_index(cf, {m, 0}) <= w_index(cf, m0n0(k)))
    throw IndexBelowThreshold("lower bound needs w(m,0) > w(m0,n0)");
  const BigInt limit = return_time_formula(k, {m + 1, 0});
  if (t < 1 || BigInt(t) >= limit) throw std::invalid_argument("lower bound needs 1 <= t < h_{m+1,0}");
  return compare(abs(baseline(k).value(t)), abs(delta(cf, {m, 0}))) >= 0;
}

// Two-sided exclusion for 1 <= t < h_{m,n+1}: for even m, F^t(0) >= Delta_{m,0}
// or F^t(0) <= n Delta_{m,0} + Delta_{m-1,0}; mirrored for odd m.
inline bool ineqs_check(const TceParams& k, const SemiIndex& idx, std::uint64_t t) {
  const auto& cf = k.lambda();
  if (!in_strict_index_set(cf, idx)) throw IndexOutOfRange("ineqs_check needs a strict index");
  const BigInt limit = return_time_formula(k, {idx.m, idx.n + 1});
  if (t < 1 || BigInt(t) >= limit) throw std::invalid_argument("ineqs_check needs 1 <= t < h_{m,n+1}");
  const ZLambda val = baseline(k).value(t);
  const ZLambda dm0 = delta(cf, {idx.m, 0});
  const ZLambda mixed = detail::delta_combination(cf, idx.m, idx.n);
  if (idx.m % 2 == 0) return compare(val, dm0) >= 0 || compare(val, mixed) <= 0;
  return compare(val, dm0) <= 0 || compare(val, mixed) >= 0;
}

// Vertices of S_{m+j,n}(lambda) / |Delta_{m-1,0}(lambda)| against those of
// S_{j,n}(g^m lambda) over the same angles.
inline CheckResult smn_scaling_check(const TceParams& k, int m, int j, std::uint64_t n) {
  if (m < 2 || m % 2 != 0 || j < 0) throw std::invalid_argument("smn_scaling_check needs even m >= 2 and j >= 0");
  const auto& cf = k.lambda();
  const unsigned bits = k.precision_bits();
  const Parallelogram big = smn_region(k.geometry_ptr(), cf, {m + j, n});
  const Parallelogram small = smn_region(k.geometry_ptr(), gauss_shift(cf, static_cast<std::size_t>(m)), {j, n});
  const Real factor = abs(delta(cf, {m - 1, 0})).to_float(bits + 32);
  PrecisionScope scope(bits);
  CheckResult res;
  res.max_deviation = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point scaled{big.vertices[i].re / factor, big.vertices[i].im / factor};
    res.max_deviation = mp::max(res.max_deviation, distance(scaled, small.vertices[i]));
  }
  res.pass = res.max_deviation <= agreement_tolerance(bits);
  return res;
}

// Interior sample of a bounded region in E-space, pulled back by E^{-1}.
inline Point sample_preimage(const TceParams& k, const Region& r, Rng& rng) {
  PrecisionScope scope(k.precision_bits());
  const Real s = rng.interior();
  const Real t = rng.interior();
  return exchange_E_inverse(k, r.at(s, t));
}

}  // namespace tce
