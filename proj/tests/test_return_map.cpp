#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tce/return_map.hpp"
#include "tce/sampling.hpp"

using namespace tce;

namespace {

Real tol() { return pow2(-200); }

const std::vector<std::string> kAngles4{"0.9", "0.6", "pi-2.4", "0.9"};

std::vector<TceParams> param_grid() {
  std::vector<TceParams> out;
  for (const auto& cf : {ContinuedFraction::golden(), ContinuedFraction::sqrt2_minus_1(), ContinuedFraction::periodic({1, 2})})
    for (const auto& [p, q] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 3}}) {
      try {
        out.emplace_back(kAngles4, std::vector<int>{2, 1}, cf, p, q);
      } catch (const InvalidParameters&) {
        // eta outside (-lambda, 1) for this lambda
      }
    }
  return out;
}

TceParams asym_params() {
  return TceParams({"pi/2+0.1", "pi/8", "0.2", "pi/5-0.1", "7*pi/40-0.2"}, {3, 2, 1},
                   ContinuedFraction::sqrt2_minus_1(), 2, 3);
}

// Brute-force m0n0: scan indices in w-order and keep the last one with P < p or Q < q.
SemiIndex brute_m0n0(const ContinuedFraction& cf, const BigInt& p, const BigInt& q, std::uint64_t max_w) {
  SemiIndex best{0, 0};
  for (std::uint64_t w = 0; w <= max_w; ++w) {
    const SemiIndex idx = index_at(cf, w);
    const auto pq = semiconvergent(cf, idx);
    if (pq.p < p || pq.q < q) best = idx;
  }
  return best;
}

}  // namespace

TEST(ParamGrid, HasAllValidCombinations) {
  // Every (p, q) in the grid gives -lambda < p - q*lambda < 1 for all three lambdas.
  EXPECT_EQ(param_grid().size(), 9u);
}

TEST(Baseline, FirstStateAndCounting) {
  for (const auto& k : param_grid()) {
    const auto states = baseline_orbit(k, 10000);
    EXPECT_EQ(states[0].value, -k.eta());
    EXPECT_EQ(states[0].a, 0);
    EXPECT_EQ(states[0].b, 0);
    for (const auto& s : states) ASSERT_EQ(s.a + s.b + 1, BigInt(s.t));
  }
  EXPECT_THROW(baseline_orbit(golden_example(), 0), std::invalid_argument);
}

TEST(Baseline, GoldenSecondIterateIsDelta2) {
  const TceParams k = golden_example();
  EXPECT_EQ(baseline(k).value(2), delta(k.lambda(), {2, 0}));
  EXPECT_EQ(baseline(k).value(2), ZLambda(k.lambda(), -1, 2));
}

TEST(Baseline, MatchesFloatIteration) {
  PrecisionScope scope(512);
  for (const auto& k : param_grid()) {
    const Real lam = k.lambda().to_float(512);
    const Real eta = k.eta().to_float(512);
    const auto ref = oracle::float_baseline(lam, eta, 3000);
    const auto& orbit = baseline(k);
    for (std::size_t t = 1; t <= ref.size(); ++t) {
      ASSERT_LT(mp::abs(orbit.value(t).to_float(512) - ref[t - 1]), pow2(-400)) << t;
      ASSERT_EQ(orbit.sign(t), ref[t - 1] > 0 ? 1 : -1) << t;
    }
  }
}

TEST(Baseline, OrbitHitsDeltaAtReturnTimes) {
  for (const auto& k : param_grid()) {
    const auto& cf = k.lambda();
    const std::uint64_t w0 = w_index(cf, m0n0(k));
    for (std::uint64_t w = w0 + 1; w <= w0 + 18; ++w) {
      const SemiIndex idx = index_at(cf, w);
      const BigInt h = closed_return_time(k, idx);
      ASSERT_GT(h, 0);
      EXPECT_EQ(baseline(k).value(h.convert_to<std::uint64_t>()), delta(cf, idx)) << to_string(idx);
    }
  }
}

TEST(ClosedReturnTime, GoldenFibonacci) {
  const TceParams k = golden_example();
  for (int m = 1; m <= 40; ++m) EXPECT_EQ(closed_return_time(k, {m, 0}), oracle::fib(m + 2) - 1);
  EXPECT_EQ(closed_return_time(k, {1, 0}), 1);
  EXPECT_EQ(closed_return_time(k, {2, 0}), 2);
  EXPECT_EQ(closed_return_time(k, {3, 0}), 4);
  for (int m = 3; m <= 40; ++m)
    EXPECT_EQ(closed_return_time(k, {m, 0}), closed_return_time(k, {m - 1, 0}) + closed_return_time(k, {m - 2, 0}) + 1);
  EXPECT_THROW(closed_return_time(k, {0, 0}), IndexBelowThreshold);
  EXPECT_EQ(return_time_formula(k, {0, 0}), 0);
}

TEST(ClosedReturnTime, Recurrence) {
  for (const auto& k : param_grid()) {
    const auto& cf = k.lambda();
    const BigInt pq1 = k.p() + k.q() - 1;
    for (int m = 1; m <= 10; ++m)
      for (std::uint64_t n = 0; n < cf.quotient(static_cast<std::size_t>(m) + 1); ++n) {
        const BigInt lhs = return_time_formula(k, {m, n + 1});
        const BigInt rhs = BigInt(n + 1) * return_time_formula(k, {m, 0}) + return_time_formula(k, {m - 1, 0}) +
                           BigInt(n + 1) * pq1;
        EXPECT_EQ(lhs, rhs);
      }
  }
}

TEST(ClosedReturnTime, MatchesFirstHitOfDelta) {
  const TceParams k(kAngles4, {2, 1}, ContinuedFraction::sqrt2_minus_1(), 1, 1);
  const ZLambda target = delta(k.lambda(), {1, 1});
  std::uint64_t t = 1;
  while (!(baseline(k).value(t) == target)) ++t;
  EXPECT_EQ(closed_return_time(k, {1, 1}), t);
}

TEST(M0n0, Examples) {
  EXPECT_EQ(m0n0(golden_example()), (SemiIndex{0, 0}));
  for (const auto& cf : {ContinuedFraction::golden(), ContinuedFraction::sqrt2_minus_1(), ContinuedFraction::periodic({3, 1})})
    EXPECT_EQ(m0n0(cf, 1, 1), (SemiIndex{0, 0}));
  const auto s2 = ContinuedFraction::sqrt2_minus_1();
  EXPECT_EQ(m0n0(s2, 3, 2), brute_m0n0(s2, 3, 2, 40));
  for (const auto& cf : {ContinuedFraction::golden(), s2, ContinuedFraction({1, 5, 2}, {1, 3})})
    for (int p = 1; p <= 12; ++p)
      for (int q = 1; q <= 12; ++q) EXPECT_EQ(m0n0(cf, p, q), brute_m0n0(cf, p, q, 60)) << p << "," << q;
}

TEST(Locate, GoldenAtomsAndComplement) {
  const TceParams k = golden_example();
  Rng rng(1);
  for (int m = 2; m <= 14; ++m) {
    const auto s = atom(k, {m, 0});
    for (int i = 0; i < 10; ++i) {
      const Point z = sample_preimage(k, s->region, rng);
      EXPECT_EQ(locate(k, z), (Location{Location::Kind::Atom, {m, 0}})) << m;
    }
  }
  // A point whose image lies inside S_4: a convex mix of its vertices.
  const auto s4 = atom(k, {4, 0});
  Point mid{0, 0};
  for (const auto& v : s4->vertices) mid = mid + v;
  mid = Real(0.25) * mid;
  EXPECT_EQ(locate(k, exchange_E_inverse(k, mid)).index, (SemiIndex{4, 0}));
  const Region y = golden_y_region(k);
  const Region x = golden_x_region(k);
  const Real phi = oracle::phi();
  // Y is unbounded above; X is bounded by v <= Phi^2 and u <= -Phi^3.
  const Point wy = k.geometry().from_uv(Real(-0.1), phi * phi + Real(0.5));
  const Point wx = k.geometry().from_uv(-mp::pow(phi, 3) - Real(0.3), Real(0.1));
  ASSERT_EQ(y.classify(wy), Membership::Inside);
  ASSERT_EQ(x.classify(wx), Membership::Inside);
  EXPECT_EQ(locate(k, exchange_E_inverse(k, wy)).kind, Location::Kind::Y);
  EXPECT_EQ(locate(k, exchange_E_inverse(k, wx)).kind, Location::Kind::X);
}

TEST(Locate, GeneralAndErrors) {
  const TceParams k = asym_params();
  const auto& cf = k.lambda();
  Rng rng(2);
  const SemiIndex anchor = m0n0(k);
  for (SemiIndex idx = anchor; w_index(cf, idx) <= w_index(cf, anchor) + 10; idx = next_index(cf, idx)) {
    const Point z = sample_preimage(k, atom(k, idx)->region, rng);
    EXPECT_EQ(locate(k, z), (Location{Location::Kind::Atom, idx}));
  }
  EXPECT_THROW(locate(k, {0, 0}), NotInDomain);
  EXPECT_THROW(locate(k, {1, Real("0.001")}), NotInDomain);
  // Far above U: outside.
  const Point high = exchange_E_inverse(k, k.geometry().from_uv(Real(-0.01), Real(5)));
  EXPECT_EQ(locate(k, high).kind, Location::Kind::Outside);
}

TEST(Locate, UnionPointsLandInLaterAtoms) {
  Rng rng(17);
  for (const auto& k : param_grid()) {
    const auto& cf = k.lambda();
    const SemiIndex anchor = m0n0(k);
    const auto u = u_region_cached(k, anchor);
    int ok = 0;
    for (int i = 0; i < 200; ++i) {
      const Point z = sample_preimage(k, u->region, rng);
      try {
        const Location loc = locate(k, z, BoundaryMode::Strict);
        if (is_golden(k) && loc.kind != Location::Kind::Atom) {
          ++ok;
          continue;
        }
        ASSERT_EQ(loc.kind, Location::Kind::Atom);
        EXPECT_GE(w_index(cf, loc.index), w_index(cf, anchor));
        ++ok;
      } catch (const PrecisionAmbiguous&) {
      }
    }
    EXPECT_GE(ok, 198);
  }
}

TEST(FirstReturn, GoldenTimesAreFibonacci) {
  const TceParams k = golden_example();
  Rng rng(5);
  for (int m = 2; m <= 14; ++m) {
    const auto s = atom(k, {m, 0});
    for (int i = 0; i < 5; ++i) {
      const Point z = sample_preimage(k, s->region, rng);
      const ReturnResult it = first_return_iter(k, z);
      EXPECT_EQ(it.h, oracle::fib(m + 3) - 1) << m;
      const ReturnResult cl = return_map_closed(k, z);
      EXPECT_EQ(cl.h, it.h);
      EXPECT_LT(distance(cl.w, it.w), tol());
      // R(z) = E(z) - (-Phi)^{m+2}
      const Point expect = exchange_E(k, z) - mp::pow(-oracle::phi(), m + 2);
      EXPECT_LT(distance(cl.w, expect), tol());
    }
  }
}

TEST(FirstReturn, GoldenComplementTimes) {
  const TceParams k = golden_example();
  Rng rng(6);
  const Real phi = oracle::phi();
  for (int i = 0; i < 20; ++i) {
    const Point wx = k.geometry().from_uv(-mp::pow(phi, 3) - Real(0.05) - rng.uniform(Real(0), Real(1)),
                                          Real(0.05) + rng.uniform(Real(0), phi * phi - Real(0.1)));
    const Point zx = exchange_E_inverse(k, wx);
    const ReturnResult a = first_return_iter(k, zx);
    const ReturnResult b = first_return_2d(k, zx);
    EXPECT_EQ(a.h, 2);
    EXPECT_EQ(b.h, 2);
    EXPECT_LT(distance(a.w, b.w), tol());
    EXPECT_LT(distance(return_map_closed(k, zx).w, a.w), tol());
    const Point wy = k.geometry().from_uv(-rng.uniform(Real(0.01), Real(1)), phi * phi + rng.uniform(Real(0.01), Real(1)));
    const Point zy = exchange_E_inverse(k, wy);
    EXPECT_EQ(first_return_iter(k, zy).h, 1);
    EXPECT_LT(distance(return_map_closed(k, zy).w, first_return_2d(k, zy).w), tol());
  }
}

TEST(FirstReturn, OracleEquivalenceAcrossGrid) {
  Rng rng(8);
  std::vector<TceParams> ks = param_grid();
  ks.push_back(asym_params());
  for (const auto& k : ks) {
    const auto& cf = k.lambda();
    const SemiIndex anchor = m0n0(k);
    for (SemiIndex idx = anchor; w_index(cf, idx) <= w_index(cf, anchor) + 6; idx = next_index(cf, idx)) {
      for (int i = 0; i < 5; ++i) {
        const Point z = sample_preimage(k, atom(k, idx)->region, rng);
        const ReturnResult it = first_return_iter(k, z);
        EXPECT_EQ(it.h, return_time_formula(k, {idx.m, idx.n + 1})) << to_string(idx);
        const ReturnResult cl = return_map_closed(k, z);
        EXPECT_EQ(cl.h, it.h);
        EXPECT_LT(distance(cl.w, it.w), tol());
      }
    }
  }
}

TEST(FirstReturn, PlanarCrossCheck) {
  Rng rng(9);
  const TceParams k = asym_params();
  const auto& cf = k.lambda();
  const SemiIndex anchor = m0n0(k);
  for (SemiIndex idx = anchor; w_index(cf, idx) <= w_index(cf, anchor) + 4; idx = next_index(cf, idx)) {
    const Point z = sample_preimage(k, atom(k, idx)->region, rng);
    const ReturnResult a = first_return_iter(k, z);
    const ReturnResult b = first_return_2d(k, z);
    EXPECT_EQ(a.h, b.h);
    EXPECT_LT(distance(a.w, b.w), pow2(-180));
  }
}

TEST(FirstReturn, BudgetAndDomainErrors) {
  const TceParams k = golden_example();
  Rng rng(3);
  const Point z = sample_preimage(k, atom(k, {10, 0})->region, rng);
  EXPECT_THROW(first_return_iter(k, z, {10, BoundaryMode::Strict}), IterationBudgetExceeded);
  EXPECT_THROW(first_return_iter(k, {1, Real("0.01")}), NotInDomain);
  EXPECT_THROW(first_return_iter(k, {0, 0}), NotInDomain);
  EXPECT_THROW(return_map_closed(k, {-1, Real("0.01")}), NotInDomain);
}

TEST(LowerBound, GoldenAndSqrt2) {
  const TceParams g = golden_example();
  for (std::uint64_t t = 1; BigInt(t) < closed_return_time(g, {4, 0}); ++t) EXPECT_TRUE(lower_bound_check(g, 3, t));
  const TceParams s(kAngles4, {2, 1}, ContinuedFraction::sqrt2_minus_1(), 1, 1);
  for (std::uint64_t t = 1; BigInt(t) < closed_return_time(s, {3, 0}); ++t) EXPECT_TRUE(lower_bound_check(s, 2, t));
  EXPECT_THROW(lower_bound_check(g, 3, 0), std::invalid_argument);
  EXPECT_THROW(lower_bound_check(g, 0, 1), IndexBelowThreshold);
}

TEST(LowerBound, TwoSidedExclusionAcrossGrid) {
  for (const auto& k : param_grid()) {
    const auto& cf = k.lambda();
    const std::uint64_t w0 = w_index(cf, m0n0(k));
    for (std::uint64_t w = w0 + 1; w <= w0 + 10; ++w) {
      const SemiIndex idx = index_at(cf, w);
      if (idx.m < 1) continue;
      const auto limit = return_time_formula(k, {idx.m, idx.n + 1}).convert_to<std::uint64_t>();
      for (std::uint64_t t = 1; t < limit; ++t) ASSERT_TRUE(ineqs_check(k, idx, t)) << to_string(idx) << " t=" << t;
    }
  }
}

TEST(SmnScaling, Examples) {
  const TceParams g = golden_example();
  for (int j = 0; j <= 6; ++j) EXPECT_TRUE(smn_scaling_check(g, 2, j, 0)) << j;
  // S_{m+2} = Phi^2 S_m directly from the vertices.
  const Real phi2 = oracle::phi() * oracle::phi();
  for (int m = 0; m <= 8; ++m) {
    const auto a = smn_region(g, {m + 2, 0}).vertices;
    const auto b = smn_region(g, {m, 0}).vertices;
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(distance(a[i], phi2 * b[i]), tol());
  }
  const TceParams s(kAngles4, {2, 1}, ContinuedFraction::sqrt2_minus_1(), 1, 1);
  const CheckResult r = smn_scaling_check(s, 2, 1, 0);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_deviation, tol());
  EXPECT_THROW(smn_scaling_check(s, 3, 0, 0), std::invalid_argument);
}

TEST(SmnScaling, Sweep) {
  for (const auto& cf : {ContinuedFraction::sqrt2_minus_1(), ContinuedFraction::periodic({1, 2})}) {
    const TceParams k(kAngles4, {2, 1}, cf, 1, 1);
    for (int m : {2, 4})
      for (SemiIndex idx{0, 0}; w_index(cf, idx) <= 8; idx = next_index(cf, idx))
        EXPECT_TRUE(smn_scaling_check(k, m, idx.m, idx.n)) << m << " " << to_string(idx);
  }
}

TEST(Partition, GoldenCoverage) {
  const TceParams k = golden_example();
  Rng rng(12);
  const Real phi = oracle::phi();
  int ambiguous = 0, located = 0, total = 0;
  while (total < 1000) {
    const Point z{rng.uniform(Real(-1), phi), rng.uniform(Real(0), Real(1))};
    if (z.im == 0 || k.geometry().macro_cone(z) != MacroCone::Middle) continue;
    ++total;
    try {
      const Location loc = locate(k, z, BoundaryMode::Strict);
      EXPECT_NE(loc.kind, Location::Kind::Outside);
      ++located;
    } catch (const PrecisionAmbiguous&) {
      ++ambiguous;
    }
  }
  EXPECT_EQ(located + ambiguous, total);
  EXPECT_LT(ambiguous, 5);
}
