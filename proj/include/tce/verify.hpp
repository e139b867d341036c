#pragma once

#include <functional>
#include <string>
#include <vector>

#include "commands.hpp"

namespace tce {

namespace verify_detail {

struct Case {
  std::string name;
  bool pass;
  std::string message;
};

struct Suite {
  std::string name;
  std::vector<Case> cases;
};

class Runner {
 public:
  void run(const std::string& suite, const std::string& name, const std::function<std::string()>& body) {
    Case c{name, true, ""};
    try {
      c.message = body();
      c.pass = c.message.empty();
    } catch (const std::exception& e) {
      c.pass = false;
      c.message = std::string("exception: ") + e.what();
    }
    if (suites_.empty() || suites_.back().name != suite) suites_.push_back({suite, {}});
    suites_.back().cases.push_back(std::move(c));
  }

  Json report(std::uint64_t seed, const std::string& scale) const {
    Json out{{"seed", seed}, {"scale", scale}};
    std::size_t tests = 0, failures = 0;
    Json suites = Json::array();
    for (const auto& s : suites_) {
      std::size_t f = 0;
      Json cases = Json::array();
      for (const auto& c : s.cases) {
        if (!c.pass) ++f;
        Json jc{{"name", c.name}, {"status", c.pass ? "pass" : "fail"}};
        if (!c.message.empty()) jc["message"] = c.message;
        cases.push_back(jc);
      }
      tests += s.cases.size();
      failures += f;
      suites.push_back({{"name", s.name}, {"tests", s.cases.size()}, {"failures", f}, {"cases", cases}});
    }
    out["tests"] = tests;
    out["failures"] = failures;
    out["suites"] = suites;
    return out;
  }

  bool ok() const {
    for (const auto& s : suites_)
      for (const auto& c : s.cases)
        if (!c.pass) return false;
    return true;
  }

 private:
  std::vector<Suite> suites_;
};

inline std::string label(const TceParams& k) {
  return k.lambda().describe() + " p=" + k.p().str() + " q=" + k.q().str();
}

// Random point of the middle cone with modulus below `radius`.
inline Point random_middle_point(const TceParams& k, Rng& rng, const Real& radius) {
  const ConeGeometry& g = k.geometry();
  for (;;) {
    const Real x = rng.uniform(-radius, radius);
    const Real y = rng.uniform(Real(0), radius);
    const Point z{x, y};
    if (g.macro_cone(z) == MacroCone::Middle && y > 0) return z;
  }
}

}  // namespace verify_detail

// Runs the invariant suites of every module. "golden" restricts parameter
// sets to the golden example; "default" adds three more.
inline Json cmd_verify(const RunConfig& cfg, bool& ok) {
  using namespace verify_detail;
  const unsigned bits = cfg.precision_bits;
  PrecisionScope scope(bits);
  const Real tol = agreement_tolerance(bits);
  std::vector<TceParams> sets{golden_example(bits)};
  if (cfg.verify_scale == "default") {
    const std::vector<std::string> a4{"1", "0.5", "pi-2.5", "1"};
    const std::vector<std::string> a5{"pi/2+0.1", "pi/8", "0.2", "pi/5-0.1", "7pi/40-0.2"};
    sets.emplace_back(a4, std::vector<int>{2, 1}, ContinuedFraction::sqrt2_minus_1(), 1, 1, bits);
    sets.emplace_back(a5, std::vector<int>{3, 2, 1}, ContinuedFraction::sqrt2_minus_1(), 2, 3, bits);
    sets.emplace_back(a4, std::vector<int>{2, 1}, ContinuedFraction::periodic({1, 2}), 1, 2, bits);
  }
  Runner r;
  std::uint64_t salt = 0;
  auto rng_for = [&]() { return Rng(cfg.seed * 0x9E3779B97F4A7C15ULL + (++salt)); };

  // ---- cf_engine
  for (const auto& k : sets) {
    const auto& cf = k.lambda();
    r.run("cf_engine", "delta_recurrence " + label(k), [&]() -> std::string {
      for (int m = 1; m <= 30; ++m) {
        const ZLambda lhs = delta(cf, {m, 0});
        const ZLambda rhs = BigRational(cf.quotient(static_cast<std::size_t>(m))) * delta(cf, {m - 1, 0}) + delta(cf, {m - 2, 0});
        if (m >= 1 && !(lhs == rhs)) return "recurrence fails at m=" + std::to_string(m);
      }
      return "";
    });
    r.run("cf_engine", "delta_n_identity_and_sign " + label(k), [&]() -> std::string {
      for (std::uint64_t w = 0; w <= 40; ++w) {
        const SemiIndex idx = index_at(cf, w);
        if (delta(cf, idx).sign() != delta_sign(idx)) return "sign mismatch at " + to_string(idx);
        if (idx.m >= 1)
          for (std::uint64_t n = 1; n <= cf.quotient(static_cast<std::size_t>(idx.m) + 1); ++n)
            if (!(delta(cf, {idx.m, n}) == BigRational(n) * delta(cf, {idx.m, 0}) + delta(cf, {idx.m - 1, 0})))
              return "identity fails at (" + std::to_string(idx.m) + "," + std::to_string(n) + ")";
      }
      return "";
    });
    r.run("cf_engine", "w_bijection " + label(k), [&]() -> std::string {
      SemiIndex idx{0, 0};
      for (std::uint64_t w = 0; w <= 300; ++w, idx = next_index(cf, idx)) {
        if (!in_strict_index_set(cf, idx) || w_index(cf, idx) != w || !(index_at(cf, w) == idx))
          return "w-order broken at w=" + std::to_string(w);
      }
      return "";
    });
    r.run("cf_engine", "best_approximation " + label(k), [&]() -> std::string {
      for (SemiIndex idx{0, 0}; idx.m <= 5; idx = next_index(cf, idx)) {
        const ConvergentPair pq = semiconvergent(cf, idx);
        const ZLambda err = abs(delta(cf, idx));
        const int side = delta(cf, idx).sign();
        const BigInt bound = semiconvergent(cf, {idx.m, idx.n + 1}).q;
        for (BigInt s = 1; s < bound; ++s) {
          const BigInt r0 = BigInt(mp::floor(Real(s) * k.lambda_float()).convert_to<BigInt>());
          for (BigInt rr = r0 - 1; rr <= r0 + 2; ++rr) {
            if (rr * pq.q == s * pq.p) continue;
            const ZLambda other(cf, BigRational(-rr), BigRational(s));
            if (other.sign() != side) continue;
            if (compare(err, abs(other)) >= 0) return "beaten at " + to_string(idx) + " by " + rr.str() + "/" + s.str();
          }
        }
      }
      return "";
    });
  }

  // ---- exact_field
  r.run("exact_field", "sign_matches_512bit_float", [&]() -> std::string {
    Rng rng = rng_for();
    const auto cf = ContinuedFraction::sqrt2_minus_1();
    PrecisionScope wide(512);
    const Real lam = mp::sqrt(Real(2)) - 1;
    for (int i = 0; i < 300; ++i) {
      const std::int64_t a = static_cast<std::int64_t>(rng.next() % 2000001) - 1000000;
      const std::int64_t b = static_cast<std::int64_t>(rng.next() % 2000001) - 1000000;
      const ZLambda x(cf, BigRational(a), BigRational(b));
      const int s = sign_of(Real(a) + Real(b) * lam);
      if (x.sign() != s || (-x).sign() != -s) return "sign mismatch for a=" + std::to_string(a) + " b=" + std::to_string(b);
    }
    return "";
  });

  // ---- tce_core
  for (const auto& k : sets) {
    r.run("tce_core", "isometry_and_height " + label(k), [&]() -> std::string {
      Rng rng = rng_for();
      const ConeGeometry& g = k.geometry();
      for (int i = 0; i < 100; ++i) {
        const Point z1{rng.uniform(Real(-2), Real(2)), rng.uniform(Real(0), Real(2))};
        const Point z2{rng.uniform(Real(-2), Real(2)), rng.uniform(Real(0), Real(2))};
        const Point f1 = step_F(k, z1);
        if (mp::abs(f1.im - exchange_E(k, z1).im) > tol) return "height changed by G";
        if (g.cone_index(z1) != g.cone_index(z2)) continue;
        if (mp::abs(distance(f1, step_F(k, z2)) - distance(z1, z2)) > tol) return "not an isometry on a cone";
      }
      Point x{Real("0.123"), Real(0)};
      for (int t = 0; t < 200; ++t) {
        x = step_F(k, x);
        if (x.im != 0) return "real axis not invariant";
      }
      return "";
    });
    r.run("tce_core", "scale_conjugacy " + label(k), [&]() -> std::string {
      Rng rng = rng_for();
      for (const BigRational& a : {BigRational(1, 2), BigRational(2), BigRational(3)}) {
        const RelaxedParams kp = scale_conjugate(k, a);
        const Real ar(a);
        for (int i = 0; i < 20; ++i) {
          const Point z{rng.uniform(Real(-1), Real(1)), rng.uniform(Real(0), Real(1))};
          const Point lhs = (Real(1) / ar) * step_F(k, ar * z);
          if (distance(lhs, step_F(kp, z)) > tol) return "conjugacy fails for a=" + to_string(a);
        }
      }
      return "";
    });
    r.run("tce_core", "splitting_along_baseline " + label(k), [&]() -> std::string {
      Rng rng = rng_for();
      for (int i = 0; i < 10; ++i) {
        const Point z = random_middle_point(k, rng, Real("0.3"));
        const ReturnResult ret = first_return_iter(k, z, {100000, BoundaryMode::Lenient});
        const std::uint64_t h = ret.h.convert_to<std::uint64_t>();
        const Point ez = exchange_E(k, z);
        Point w = z;
        for (std::uint64_t j = 1; j <= h && j <= 2000; ++j) {
          w = step_F(k, w);
          if (distance(w, ez + baseline(k).value_float(j)) > tol) return "splitting fails at j=" + std::to_string(j);
        }
      }
      return "";
    });
  }

  // ---- return_map
  for (const auto& k : sets) {
    const auto& cf = k.lambda();
    const SemiIndex anchor = m0n0(k);
    const std::uint64_t w0 = w_index(cf, anchor);
    r.run("return_map", "orbit_zero " + label(k), [&]() -> std::string {
      for (std::uint64_t w = w0 + 1; w <= w0 + 14; ++w) {
        const SemiIndex idx = index_at(cf, w);
        const BigInt h = closed_return_time(k, idx);
        if (!(baseline(k).value(h.convert_to<std::uint64_t>()) == delta(cf, idx))) return "F^h(0) != Delta at " + to_string(idx);
      }
      return "";
    });
    r.run("return_map", "oracle_equivalence " + label(k), [&]() -> std::string {
      Rng rng = rng_for();
      for (std::uint64_t w = w0; w <= w0 + 6; ++w) {
        const SemiIndex idx = index_at(cf, w);
        const auto s = atom(k, idx);
        for (int i = 0; i < 5; ++i) {
          const Point z = sample_preimage(k, s->region, rng);
          const ReturnResult c = return_map_closed(k, z);
          const ReturnResult it = first_return_iter(k, z);
          if (c.h != it.h) return "return time mismatch in " + to_string(idx);
          if (distance(c.w, it.w) > tol) return "return point mismatch in " + to_string(idx);
        }
      }
      return "";
    });
    r.run("return_map", "side_lengths " + label(k), [&]() -> std::string {
      for (std::uint64_t w = 0; w <= 10; ++w) {
        const SemiIndex idx = index_at(cf, w);
        const auto s = atom(k, idx);
        const auto [l1, l2] = side_lengths_formula(k.geometry(), delta(cf, {idx.m, 0}).to_float(bits));
        const auto& v = s->vertices;
        if (mp::abs(distance(v[0], v[1]) - l1) > tol || mp::abs(distance(v[1], v[2]) - l2) > tol ||
            mp::abs(distance(v[2], v[3]) - l1) > tol || mp::abs(distance(v[3], v[0]) - l2) > tol)
          return "side lengths off for " + to_string(idx);
      }
      return "";
    });
    r.run("return_map", "u_region_union " + label(k), [&]() -> std::string {
      Rng rng = rng_for();
      const auto u = u_region_cached(k, anchor);
      for (int i = 0; i < 200; ++i) {
        const Point z = sample_preimage(k, u->region, rng);
        const Location loc = locate(k, z);
        if (is_golden(k)) {
          if (loc.kind == Location::Kind::Outside) return "U point not located";
        } else if (loc.kind != Location::Kind::Atom || w_index(cf, loc.index) < w0) {
          return "U point not in an atom above the anchor";
        }
      }
      return "";
    });
    r.run("return_map", "planar_crosscheck " + label(k), [&]() -> std::string {
      Rng rng = rng_for();
      const auto s = atom(k, index_at(cf, w0 + 2));
      for (int i = 0; i < 5; ++i) {
        const Point z = sample_preimage(k, s->region, rng);
        const ReturnResult a = first_return_iter(k, z);
        const ReturnResult b = first_return_2d(k, z, {100000, BoundaryMode::Lenient});
        if (a.h != b.h || distance(a.w, b.w) > tol) return "planar iteration disagrees";
      }
      return "";
    });
  }
  {
    const TceParams& g = sets.front();
    r.run("return_map", "lower_bound golden m=3", [&]() -> std::string {
      const std::uint64_t limit = return_time_formula(g, {4, 0}).convert_to<std::uint64_t>();
      for (std::uint64_t t = 1; t < limit; ++t)
        if (!lower_bound_check(g, 3, t)) return "bound fails at t=" + std::to_string(t);
      return "";
    });
    r.run("return_map", "golden_partition_coverage", [&]() -> std::string {
      Rng rng = rng_for();
      int ambiguous = 0;
      const int n = 1000;
      for (int i = 0; i < n;) {
        const Point z{rng.uniform(Real(-1), g.lambda_float()), Real(1) - Real(rng.uniform())};
        if (g.geometry().macro_cone(z) != MacroCone::Middle) continue;
        ++i;
        try {
          if (locate(g, z, BoundaryMode::Strict).kind == Location::Kind::Outside) return "point outside the partition";
        } catch (const PrecisionAmbiguous&) {
          ++ambiguous;
        }
      }
      if (ambiguous * 200 >= n) return "too many ambiguous samples";
      return "";
    });
  }

  // ---- renorm
  for (const auto& k : sets) {
    r.run("renorm", "conjugacy " + label(k), [&]() -> std::string {
      const RenormStep st = renormalize(k);
      if (!(st.anchor_out == SemiIndex{st.anchor_in.m, 0})) return "anchor of kappa' is " + to_string(st.anchor_out);
      if (!(st.scale == -delta(k.lambda(), {1, 0}))) return "scale is not -Delta_{1,0}";
      const ConjugacyReport rep = verify_conjugacy(st, 20, cfg.seed + (++salt));
      if (!rep.pass) return "conjugacy fails: max_dev " + format_real(rep.max_dev, 64) + " " + rep.first_error;
      return "";
    });
    r.run("renorm", "domain_scaling " + label(k), [&]() -> std::string {
      const RenormStep st = renormalize(k);
      const URegion big = u_region(k, {st.anchor_in.m + 2, 0});
      const Real s = st.scale.to_float(bits + 32);
      for (std::size_t i = 0; i < 4; ++i)
        if (distance((Real(1) / s) * big.vertices[i], st.domain.vertices[i]) > tol) return "U regions do not match";
      return "";
    });
  }
  r.run("renorm", "golden_tower_fixed", [&]() -> std::string {
    const TceParams& g = sets.front();
    const RenormTower t = renorm_tower(g, 3);
    for (const auto& st : t.steps)
      if (!same_translations(st.kappa_out, g) || !(st.scale == ZLambda(g.lambda(), 1, -1))) return "golden step differs";
    return "";
  });

  ok = r.ok();
  return r.report(cfg.seed, cfg.verify_scale);
}

}  // namespace tce
