#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cone_exchange.hpp"
#include "regions.hpp"
#include "return_map.hpp"
#include "sampling.hpp"

namespace tce {

struct RenormStep {
  TceParams kappa_in;
  TceParams kappa_out;
  ZLambda scale;  // 1 - lambda_1 lambda = -Delta_{1,0}, over kappa_in's lambda
  URegion domain;  // U_{m0,0}(kappa_out), in E-space
  SemiIndex anchor_in;
  SemiIndex anchor_out;
};

// kappa -> kappa' with lambda' = g^2(lambda). The new eta' = p' - q' lambda'
// takes (p', q') from the semiconvergent of lambda' that follows (m0, 0) in
// w-order, which makes (m0', n0') = (m0, 0) and keeps -lambda' < eta' < 1.
// On U_{m0,0}(kappa') the return map satisfies
//   R_{kappa'}(z) = R_kappa(s z) / s,  s = 1 - lambda_1 lambda.
inline RenormStep renormalize(const TceParams& k) {
  const ContinuedFraction& cf = k.lambda();
  if (!cf.provides(3))
    throw DepthExhausted("renormalization consumes two partial quotients; only " +
                         std::to_string(cf.depth().value_or(0)) + " available");
  const ContinuedFraction shifted = gauss_shift(cf, 2);
  const SemiIndex anchor = m0n0(k);
  const ConvergentPair pq = semiconvergent(shifted, {anchor.m, 1});
  TceParams out = k.with_translations(shifted, pq.p, pq.q);
  ZLambda scale = -delta(cf, {1, 0});
  if (scale.sign() <= 0 || (ZLambda::constant(cf, 1) - scale).sign() <= 0)
    throw std::logic_error("renormalization scale outside (0,1)");
  URegion domain = u_region(out, {anchor.m, 0});
  const SemiIndex anchor_out = m0n0(out);
  return {k, std::move(out), std::move(scale), std::move(domain), anchor, anchor_out};
}

struct ConjugacyReport {
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  Real max_dev;
  bool pass = false;
  std::uint64_t time_mismatches = 0;  // closed vs iterated return time on either side
  std::uint64_t failures = 0;         // samples that raised an error
  std::string first_error;
};

// Samples z in U_{m0,0}(kappa') (interior, seeded) and compares
// R_{kappa'}(z) with R_kappa(s z)/s, each side evaluated by the closed form
// and by brute-force iteration.
inline ConjugacyReport verify_conjugacy(const RenormStep& step, std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("verify_conjugacy needs at least one sample");
  const TceParams& kin = step.kappa_in;
  const TceParams& kout = step.kappa_out;
  const unsigned bits = kin.precision_bits();
  PrecisionScope scope(bits);
  const Real s = step.scale.to_float(bits);
  ConjugacyReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.max_dev = 0;
  Rng rng(seed);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Point z = sample_preimage(kout, step.domain.region, rng);
    try {
      const ReturnResult lc = return_map_closed(kout, z);
      const ReturnResult li = first_return_iter(kout, z);
      const Point sz = s * z;
      const ReturnResult rc = return_map_closed(kin, sz);
      const ReturnResult ri = first_return_iter(kin, sz);
      const Real inv = Real(1) / s;
      const Point rcw = inv * rc.w;
      const Point riw = inv * ri.w;
      rep.max_dev = mp::max(rep.max_dev, distance(lc.w, li.w));
      rep.max_dev = mp::max(rep.max_dev, distance(lc.w, rcw));
      rep.max_dev = mp::max(rep.max_dev, distance(lc.w, riw));
      if (lc.h != li.h || rc.h != ri.h) ++rep.time_mismatches;
    } catch (const Error& e) {
      if (rep.failures++ == 0) rep.first_error = e.what();
    }
  }
  rep.pass = rep.failures == 0 && rep.time_mismatches == 0 && rep.max_dev <= agreement_tolerance(bits);
  return rep;
}

struct RenormTower {
  std::vector<RenormStep> steps;
  std::size_t requested = 0;
  bool exhausted = false;  // stopped early for lack of partial quotients
  std::optional<std::size_t> remaining_quotients;  // nullopt: unbounded (periodic tail)
};

// Iterated renormalization. With allow_partial the tower stops at the last
// certified step instead of throwing DepthExhausted.
inline RenormTower renorm_tower(const TceParams& k, std::size_t depth, bool allow_partial = false) {
  RenormTower tower;
  tower.requested = depth;
  TceParams current = k;
  for (std::size_t i = 0; i < depth; ++i) {
    try {
      tower.steps.push_back(renormalize(current));
    } catch (const DepthExhausted&) {
      if (!allow_partial) throw;
      tower.exhausted = true;
      break;
    }
    current = tower.steps.back().kappa_out;
  }
  tower.remaining_quotients = current.lambda().depth();
  return tower;
}

inline Real cumulative_scale(const RenormTower& tower, unsigned bits) {
  PrecisionScope scope(bits);
  Real prod = 1;
  for (const auto& step : tower.steps) prod *= step.scale.to_float(bits);
  return prod;
}

// Fixed point of z -> E(z) + shift inside cone j: z = shift / (1 - e^{i theta_j}).
inline std::optional<Point> rotation_fixed_point(const ConeGeometry& g, std::size_t j, const Real& shift) {
  const Real c = mp::cos(g.theta(j));
  const Real sn = mp::sin(g.theta(j));
  const Real den = 2 - 2 * c;
  if (den == 0) return std::nullopt;
  Point z{shift * (1 - c) / den, shift * sn / den};
  if (z.im <= 0 || g.cone_index(z) != j) return std::nullopt;
  return z;
}

// A fixed point of the closed-form return map inside E^{-1}(S_{m,n}), if one exists.
inline std::optional<Point> return_fixed_point(const TceParams& k, const SemiIndex& idx) {
  PrecisionScope scope(k.precision_bits());
  const Real shift = delta(k.lambda(), {idx.m, idx.n + 1}).to_float(k.precision_bits());
  const auto region = atom(k, idx);
  for (std::size_t j = 1; j <= k.d(); ++j) {
    auto z = rotation_fixed_point(k.geometry(), j, shift);
    if (z && region->region.contains(exchange_E(k, *z))) return z;
  }
  return std::nullopt;
}

struct CascadeEntry {
  std::uint64_t n;
  Point z;
  SemiIndex atom;
  BigInt h;
  bool in_atom;  // E(z_n) verified to lie in S_{2n + m mod 2}
};

struct Cascade {
  std::uint64_t period;
  std::vector<CascadeEntry> entries;
};

struct CascadeOptions {
  std::uint64_t max_returns = 10'000;
};

// Golden case: from a point z in E^{-1}(S_m) that is periodic under R, the
// points z_n = Phi^{2n-m} z lie in E^{-1}(S_{2n + m mod 2}) and are periodic
// as well, accumulating at 0.
inline Cascade periodic_cascade(const TceParams& k, const Point& z, int m, std::uint64_t count,
                                CascadeOptions opt = {}) {
  if (!is_golden(k)) throw std::invalid_argument("periodic_cascade needs the golden parameters");
  if (m < 0) throw std::invalid_argument("periodic_cascade needs m >= 0");
  const unsigned bits = k.precision_bits();
  PrecisionScope scope(bits);
  if (!atom(k, {m, 0})->region.contains(exchange_E(k, z)))
    throw NotPeriodic("starting point does not lie in E^{-1}(S_m)");
  const Real tol = agreement_tolerance(bits) * mp::max(Real(1), abs(z));
  std::uint64_t period = 0;
  Point w = z;
  for (std::uint64_t i = 1; i <= opt.max_returns; ++i) {
    w = first_return_iter(k, w, {10'000'000, BoundaryMode::Lenient}).w;
    if (distance(w, z) <= tol) {
      period = i;
      break;
    }
  }
  if (period == 0) throw NotPeriodic("no return to z within " + std::to_string(opt.max_returns) + " returns");
  Cascade out;
  out.period = period;
  const Real phi = k.lambda_float();
  const int parity = m % 2;
  for (std::uint64_t n = 0; n < count; ++n) {
    const long e = 2 * static_cast<long>(n) - m;
    const Real factor = mp::pow(phi, Real(e));
    const Point zn = factor * z;
    const SemiIndex idx{static_cast<int>(2 * n) + parity, 0};
    const bool inside = atom(k, idx)->region.contains(exchange_E(k, zn));
    out.entries.push_back({n, zn, idx, return_time_formula(k, {idx.m, 1}), inside});
  }
  return out;
}

struct ShadowStats {
  Real max_shadow_error;    // max_j | |F^j(z) - F^j(0)| - |z| | over 1 <= j <= min(H, h(z))
  Real max_outside_segment; // max horizontal distance of F^j(z) from [-1, lambda], j <= H
  Real max_height;          // max Im F^j(z), j <= H
};

// Orbit statistics illustrating that orbits of small periodic points stay
// close to the baseline segment [-1, lambda].
inline ShadowStats shadow_stats(const TceParams& k, const Point& z, std::uint64_t H) {
  PrecisionScope scope(k.precision_bits());
  const std::uint64_t h = first_return_iter(k, z, {10'000'000, BoundaryMode::Lenient}).h.convert_to<std::uint64_t>();
  const Real r = abs(z);
  ShadowStats st{Real(0), Real(0), Real(0)};
  Point a = z;
  Point b{Real(0), Real(0)};
  const Real lam = k.lambda_float();
  for (std::uint64_t j = 1; j <= H; ++j) {
    a = step_F(k, a);
    b = step_F(k, b);
    if (j <= h) st.max_shadow_error = mp::max(st.max_shadow_error, mp::abs(distance(a, b) - r));
    const Real outside = mp::max(Real(0), mp::max(Real(-1) - a.re, a.re - lam));
    st.max_outside_segment = mp::max(st.max_outside_segment, outside);
    st.max_height = mp::max(st.max_height, a.im);
  }
  return st;
}

}  // namespace tce
