// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tce/tce.hpp"

using namespace tce;

namespace {

constexpr unsigned kBits = 256;
constexpr int kTolExp = -200;

Real tol() { return pow2(kTolExp); }

const std::vector<std::string> kAngles4{"0.9", "0.6", "pi-2.4", "0.9"};

std::vector<TceParams> param_grid() {
  std::vector<TceParams> out;
  for (const auto& cf : {ContinuedFraction::golden(), ContinuedFraction::sqrt2_minus_1(), ContinuedFraction::periodic({1, 2})})
    for (const auto& [p, q] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 3}}) {
      try {
        out.emplace_back(kAngles4, std::vector<int>{2, 1}, cf, p, q, kBits);
      } catch (const InvalidParameters&) {
      }
    }
  return out;
}

// A criterion body returns an empty string on success, otherwise a short
// description of the first failure.
struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // 0: no limit
  std::function<std::string()> body;
};

std::string fail(const std::ostringstream& os) { return os.str(); }

std::string golden_return_times() {
  const TceParams k = golden_example(kBits);
  std::ostringstream err;
  // (0,0) is the golden threshold index, where closed_return_time refuses by
  // contract; the raw formula covers m = 0.
  if (return_time_formula(k, {0, 0}) != oracle::fib(2) - 1) return "return_time_formula(0,0) != Fib_2 - 1";
  for (int m = 1; m <= 20; ++m)
    if (closed_return_time(k, {m, 0}) != oracle::fib(m + 2) - 1) {
      err << "closed_return_time(" << m << ",0) = " << closed_return_time(k, {m, 0});
      return fail(err);
    }
  Rng rng(101);
  for (int m = 0; m <= 12; ++m) {
    const auto s = atom(k, {m, 0});
    for (int i = 0; i < 20; ++i) {
      const Point z = sample_preimage(k, s->region, rng);
      const BigInt h = first_return_iter(k, z).h;
      if (h != oracle::fib(m + 3) - 1) {
        err << "first_return_iter on S_" << m << " gave " << h;
        return fail(err);
      }
    }
  }
  return {};
}

std::string golden_delta_identity() {
  const ContinuedFraction cf = ContinuedFraction::golden();
  // (a, b) stands for a + b*Phi, with Phi^2 = 1 - Phi.
  BigInt a = 0, b = -1;  // -Phi
  std::ostringstream err;
  for (int m = 0; m <= 40; ++m) {
    // -(-Phi)^{m+1} = -(a + b Phi)
    const ZLambda d = delta(cf, {m, 0});
    if (d.a() != BigRational(-oracle::fib(m)) || d.b() != BigRational(oracle::fib(m + 1))) {
      err << "coefficients of Delta_" << m << " are (" << to_string(d.a()) << ", " << to_string(d.b()) << ")";
      return fail(err);
    }
    if (d != ZLambda(cf, BigRational(-a), BigRational(-b))) {
      err << "Delta_" << m << " differs from -(-Phi)^" << m + 1;
      return fail(err);
    }
    const BigInt na = -b, nb = b - a;  // multiply by -Phi
    a = na;
    b = nb;
  }
  return {};
}

std::string orbit_of_zero() {
  std::ostringstream err;
  for (const auto& k : param_grid()) {
    const auto& cf = k.lambda();
    const std::uint64_t w0 = w_index(cf, m0n0(k));
    for (std::uint64_t w = w0 + 1; w <= w0 + 18; ++w) {
      const SemiIndex idx = index_at(cf, w);
      const BigInt h = closed_return_time(k, idx);
      if (h <= 0 || baseline(k).value(h.convert_to<std::uint64_t>()) != delta(cf, idx)) {
        err << cf.describe() << " eta=(" << k.p() << "," << k.q() << ") index " << to_string(idx);
        return fail(err);
      }
    }
  }
  return {};
}

std::string oracle_equivalence() {
  std::ostringstream err;
  Rng rng(104);
  for (const auto& k : param_grid()) {
    const auto& cf = k.lambda();
    const std::uint64_t w0 = w_index(cf, m0n0(k));
    for (std::uint64_t w = w0; w <= w0 + 10; ++w) {
      const SemiIndex idx = index_at(cf, w);
      const auto s = atom(k, idx);
      for (int i = 0; i < 50; ++i) {
        const Point z = sample_preimage(k, s->region, rng);
        const ReturnResult it = first_return_iter(k, z);
        const ReturnResult cl = return_map_closed(k, z);
        if (it.h != cl.h || !(distance(it.w, cl.w) < tol())) {
          err << cf.describe() << " atom " << to_string(idx) << " h_iter=" << it.h << " h_closed=" << cl.h;
          return fail(err);
        }
      }
    }
  }
  return {};
}

std::string atom_scaling() {
  std::ostringstream err;
  for (const auto& cf : {ContinuedFraction::sqrt2_minus_1(), ContinuedFraction::periodic({1, 2})}) {
    const TceParams k(kAngles4, {2, 1}, cf, 1, 1, kBits);
    for (int m : {2, 4})
      for (SemiIndex idx{0, 0}; w_index(cf, idx) <= 8; idx = next_index(cf, idx)) {
        const CheckResult r = smn_scaling_check(k, m, idx.m, idx.n);
        if (!r.pass || !(r.max_deviation < tol())) {
          err << cf.describe() << " m=" << m << " (j,n)=" << to_string(idx);
          return fail(err);
        }
      }
  }
  return {};
}

std::string renorm_conjugacy() {
  std::ostringstream err;
  std::uint64_t seed = 106;
  std::vector<TceParams> sets = param_grid();
  sets.emplace_back(std::vector<std::string>{"pi/2+0.1", "pi/8", "0.2", "pi/5-0.1", "7*pi/40-0.2"},
                    std::vector<int>{3, 2, 1}, ContinuedFraction::sqrt2_minus_1(), 2, 3, kBits);
  for (const auto& k : sets) {
    const ConjugacyReport rep = verify_conjugacy(renormalize(k), 100, seed++);
    if (!rep.pass || !(rep.max_dev < tol())) {
      err << k.lambda().describe() << " eta=(" << k.p() << "," << k.q() << "): " << rep.failures << " failures, "
          << rep.time_mismatches << " time mismatches " << rep.first_error;
      return fail(err);
    }
  }
  const TceParams g = golden_example(kBits);
  const auto u = u_region(g, {0, 0});
  const Real phi2 = oracle::phi() * oracle::phi();
  Rng rng(seed);
  for (int i = 0; i < 100; ++i) {
    const Point z = sample_preimage(g, u.region, rng);
    const Point lhs = return_map_closed(g, z).w;
    const Point rhs = (1 / phi2) * return_map_closed(g, phi2 * z).w;
    if (!(distance(lhs, rhs) < tol())) return "golden self-similarity R(z) = R(Phi^2 z)/Phi^2 fails";
  }
  return {};
}

// Every fraction r/s with s < Q_{m,n+1} on the same side of lambda as
// P_{m,n}/Q_{m,n} has a strictly larger error |s lambda - r|. Decided in
// double precision when the margin is wide, exactly otherwise.
std::string best_approximation() {
  std::ostringstream err;
  const std::vector<ContinuedFraction> cfs{ContinuedFraction::golden(), ContinuedFraction::sqrt2_minus_1(),
                                           ContinuedFraction::periodic({1, 2}), ContinuedFraction({1, 2, 3, 4}, {5}),
                                           ContinuedFraction({3, 1, 7}, {2, 1, 1})};
  constexpr double kMargin = 1e-9;
  for (const auto& cf : cfs) {
    const double lam = cf.to_float(kBits).convert_to<double>();
    for (SemiIndex idx{0, 0}; idx.m <= 8; idx = next_index(cf, idx)) {
      const ConvergentPair pq = semiconvergent(cf, idx);
      const ZLambda d = delta(cf, idx);
      const ZLambda err_abs = abs(d);
      const int side = d.sign();
      const double e = err_abs.to_float(kBits).convert_to<double>();
      const std::int64_t bound = semiconvergent(cf, {idx.m, idx.n + 1}).q.convert_to<std::int64_t>();
      const auto q0 = pq.q.convert_to<std::int64_t>();
      const auto p0 = pq.p.convert_to<std::int64_t>();
      for (std::int64_t s = 1; s < bound; ++s) {
        // Numerators outside this window miss s*lambda by more than e + 1.
        const double c = static_cast<double>(s) * lam;
        const std::int64_t r_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(c - e)) - 1);
        const std::int64_t r_hi = std::min<std::int64_t>(s, static_cast<std::int64_t>(std::ceil(c + e)) + 1);
        for (std::int64_t r = r_lo; r <= r_hi; ++r) {
          if (s == q0 && r == p0) continue;
          const double x = static_cast<double>(s) * lam - static_cast<double>(r);
          const bool clear_side = std::abs(x) > kMargin;
          if (clear_side && (x > 0 ? 1 : -1) != side) continue;
          if (clear_side && std::abs(x) > e + kMargin) continue;
          const ZLambda other(cf, BigRational(-r), BigRational(s));
          if (other.sign() != side) continue;
          if (compare(err_abs, abs(other)) >= 0) {
            err << cf.describe() << " index " << to_string(idx) << " beaten by " << r << "/" << s;
            return fail(err);
          }
        }
      }
    }
  }
  return {};
}

std::string partition_coverage() {
  const TceParams k = golden_example(kBits);
  const ConeGeometry& g = k.geometry();
  const Real phi = oracle::phi();
  const Region x = golden_x_region(k), y = golden_y_region(k);
  std::vector<std::shared_ptr<const Parallelogram>> atoms;
  for (int m = 2; m <= 80; ++m) atoms.push_back(atom(k, {m, 0}));
  Rng rng(108);
  std::uint64_t total = 0, ambiguous = 0;
  std::ostringstream err;
  while (total < 10000) {
    const Point z{rng.uniform(Real(-1), phi), rng.uniform(Real(0), Real(1))};
    if (z.im == 0 || g.macro_cone(z) != MacroCone::Middle) continue;
    ++total;
    const Point w = g.exchange(z, BoundaryMode::Lenient);
    const Real u = g.u_coord(w), v = g.v_coord(w);
    int inside = 0;
    bool unclear = false;
    auto tally = [&](const Region& r) {
      switch (r.classify_uv(u, v)) {
        case Membership::Inside: ++inside; break;
        case Membership::Ambiguous: unclear = true; break;
        case Membership::Outside: break;
      }
    };
    tally(x);
    tally(y);
    for (const auto& a : atoms) tally(a->region);
    if (unclear) {
      ++ambiguous;
      continue;
    }
    if (inside != 1) {
      err << "sample (" << z.re.convert_to<double>() << ", " << z.im.convert_to<double>() << ") lies in " << inside
          << " regions";
      return fail(err);
    }
  }
  if (ambiguous * 200 >= total) {
    err << "ambiguous rate " << ambiguous << "/" << total;
    return fail(err);
  }
  return {};
}

std::string scaling_conjugacy() {
  std::ostringstream err;
  const std::vector<TceParams> sets{
      golden_example(kBits),
      TceParams({"0.5", "pi/7", "pi/4", "17*pi/28-0.5"}, {2, 1}, ContinuedFraction({1}, {2}), 1, 1, kBits)};
  Rng rng(109);
  for (const auto& k : sets)
    for (const BigRational& a : {BigRational(1, 2), BigRational(2), BigRational(3)}) {
      const RelaxedParams kp = scale_conjugate(k, a);
      const Real ar(a);
      for (int i = 0; i < 200; ++i) {
        const Point z{rng.uniform(Real(-1), Real(1)), rng.uniform(Real(0), Real(1))};
        const Point lhs = (1 / ar) * step_F(k, ar * z);
        if (!(distance(lhs, step_F(kp, z)) < tol())) {
          err << k.lambda().describe() << " a=" << a << " sample " << i;
          return fail(err);
        }
      }
    }
  return {};
}

std::string verify_determinism() {
  const RunConfig cfg = config_from_json(Json{{"seed", 110}});
  bool ok1 = false, ok2 = false;
  const std::string a = cmd_verify(cfg, ok1).dump(2);
  const std::string b = cmd_verify(cfg, ok2).dump(2);
  if (a != b) return "reports differ";
  if (!ok1 || !ok2) return "verify reported failures";
  return {};
}

}  // namespace

int main() {
  PrecisionScope scope(kBits);
  const std::vector<Criterion> criteria{
      {1, "golden return times are Fibonacci", 30, golden_return_times},
      {2, "golden Delta coefficients", 0, golden_delta_identity},
      {3, "orbit of 0 hits Delta at return times", 60, orbit_of_zero},
      {4, "closed-form and brute-force return maps agree", 0, oracle_equivalence},
      {5, "atom scaling under the Gauss shift", 0, atom_scaling},
      {6, "renormalization conjugacy and golden self-similarity", 0, renorm_conjugacy},
      {7, "one-sided best approximation", 0, best_approximation},
      {8, "golden partition coverage", 0, partition_coverage},
      {9, "scaling conjugacy", 0, scaling_conjugacy},
      {10, "verify report determinism", 0, verify_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string why;
    try {
      why = c.body();
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (why.empty() && c.time_limit_s > 0 && secs >= c.time_limit_s) why = "exceeded time limit";
    std::printf("%s criterion %d: %s (%.2f s)%s%s\n", why.empty() ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                why.empty() ? "" : " -- ", why.c_str());
    std::fflush(stdout);
    if (!why.empty()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
