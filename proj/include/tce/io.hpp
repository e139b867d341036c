#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cone_exchange.hpp"
#include "continued_fraction.hpp"
#include "expression.hpp"
#include "regions.hpp"
#include "zlambda.hpp"

namespace tce {

using Json = nlohmann::json;

// Partial quotients of a real number given as an expression (e.g. "pi/4").
// The expansion is carried out at two precisions and only the common,
// trustworthy part is kept; the result is a truncated continued fraction.
inline ContinuedFraction continued_fraction_from_expression(const std::string& text, std::size_t max_terms = 400) {
  auto expand = [&](unsigned bits) {
    PrecisionScope scope(bits);
    Real x = evaluate_expression(text, bits);
    if (!(x > 0 && x < 1)) throw InvalidParameters("lambda = " + text + " is not in (0,1)");
    std::vector<Quotient> out;
    const Real tiny = pow2(-static_cast<int>(bits) / 2);
    while (out.size() < max_terms && x > tiny) {
      x = 1 / x;
      const Real a = mp::floor(x);
      if (a > Real(1e18)) break;
      out.push_back(a.convert_to<Quotient>());
      x -= a;
    }
    return out;
  };
  const auto lo = expand(3072);
  const auto hi = expand(4096);
  std::size_t common = 0;
  while (common < lo.size() && common < hi.size() && lo[common] == hi[common]) ++common;
  if (common < 4) throw InvalidParameters("lambda = " + text + " looks rational or is too close to a rational");
  return ContinuedFraction::truncated({lo.begin(), lo.begin() + static_cast<std::ptrdiff_t>(common - 2)});
}

inline Json to_json(const ContinuedFraction& cf) {
  Json j;
  j["prefix"] = cf.prefix();
  if (cf.has_tail()) j["tail"] = cf.tail();
  return j;
}

inline ContinuedFraction continued_fraction_from_json(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "phi") return ContinuedFraction::golden();
    if (s == "sqrt2m1") return ContinuedFraction::sqrt2_minus_1();
    return continued_fraction_from_expression(s);
  }
  if (!j.is_object()) throw InvalidParameters("lambda must be an object {prefix, tail} or a string");
  std::vector<Quotient> prefix, tail;
  if (j.contains("prefix")) prefix = j.at("prefix").get<std::vector<Quotient>>();
  if (j.contains("tail")) tail = j.at("tail").get<std::vector<Quotient>>();
  return ContinuedFraction(std::move(prefix), std::move(tail));
}

inline Json to_json(const ZLambda& x) { return {{"a", to_string(x.a())}, {"b", to_string(x.b())}}; }

inline ZLambda zlambda_from_json(const Json& j, const ContinuedFraction& cf) {
  return ZLambda(cf, BigRational(j.at("a").get<std::string>()), BigRational(j.at("b").get<std::string>()));
}

inline Json to_json(const SemiIndex& idx) { return Json::array({idx.m, idx.n}); }

inline std::string json_number_text(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw InvalidParameters("expected a number or numeric expression, got " + j.dump());
}

inline Json to_json(const TceParams& k) {
  Json j;
  j["alpha"] = k.alpha_text();
  j["tau"] = k.tau();
  j["lambda"] = to_json(k.lambda());
  j["eta"] = {{"p", k.p().str()}, {"q", k.q().str()}};
  return j;
}

inline BigInt big_int_from_json(const Json& j) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) return BigInt(j.get<std::string>());
  throw InvalidParameters("expected an integer, got " + j.dump());
}

inline TceParams params_from_json(const Json& j, unsigned bits) {
  std::vector<std::string> alpha;
  for (const auto& a : j.at("alpha")) alpha.push_back(json_number_text(a));
  const auto tau = j.at("tau").get<std::vector<int>>();
  const ContinuedFraction cf = continued_fraction_from_json(j.at("lambda"));
  const Json& eta = j.at("eta");
  return TceParams(std::move(alpha), tau, cf, big_int_from_json(eta.at("p")), big_int_from_json(eta.at("q")), bits);
}

inline Json point_json(const Point& z, unsigned bits) {
  return Json::array({format_real(z.re, bits), format_real(z.im, bits)});
}

inline Json polygon_json(const std::vector<Point>& poly, unsigned bits) {
  Json arr = Json::array();
  for (const auto& p : poly) arr.push_back(point_json(p, bits));
  return arr;
}

inline Json to_json(const Parallelogram& s, unsigned bits) {
  return {{"index", to_json(s.index)},
          {"vertices", polygon_json({s.vertices.begin(), s.vertices.end()}, bits)}};
}

inline Json to_json(const URegion& u, unsigned bits) {
  return {{"index", to_json(u.anchor)}, {"vertices", polygon_json({u.vertices.begin(), u.vertices.end()}, bits)}};
}

struct OrbitOptions {
  std::uint64_t count = 1000;
  std::uint64_t steps = 3000;
  std::uint64_t skip = 1500;
  std::vector<Point> starts;  // explicit start points; sampled from the box when empty
};

struct ReturnOptions {
  std::vector<Point> points;
  std::optional<SemiIndex> atom;
  std::uint64_t samples = 20;
};

struct RunConfig {
  TceParams params = golden_example();
  unsigned precision_bits = kDefaultPrecisionBits;
  std::uint64_t seed = 0;
  std::optional<Rect> box;  // defaults to [-1, lambda] x [0, 1]
  OrbitOptions orbit;
  std::uint64_t max_w = 6;
  ReturnOptions ret;
  std::uint64_t depth = 3;
  std::uint64_t samples = 100;
  bool strict = false;
  std::string verify_scale = "default";

  Rect sampling_box() const {
    if (box) return *box;
    PrecisionScope scope(precision_bits);
    return {Real(-1), params.lambda_float(), Real(0), Real(1)};
  }
};

struct ConfigOverrides {
  std::optional<unsigned> precision_bits;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_w;
  std::optional<std::uint64_t> depth;
  std::optional<std::uint64_t> samples;
  bool strict = false;
};

inline Point point_from_json(const Json& j, unsigned bits) {
  if (!j.is_array() || j.size() != 2) throw InvalidParameters("a point is [re, im], got " + j.dump());
  Point z{evaluate_expression(json_number_text(j[0]), bits), evaluate_expression(json_number_text(j[1]), bits)};
  if (z.im < 0) throw InvalidParameters("points must have im >= 0");
  return z;
}

// Reads a run configuration. Unknown keys are rejected so that typos do not
// silently fall back to defaults.
inline RunConfig config_from_json(const Json& j, const ConfigOverrides& ov = {}) {
  static const std::vector<std::string> known{"params", "precision_bits", "seed", "box", "orbit", "max_w",
                                              "return", "depth", "samples", "strict_boundaries", "verify_scale"};
  if (!j.is_object()) throw InvalidParameters("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw InvalidParameters("unknown config key '" + key + "'");
  RunConfig cfg;
  cfg.precision_bits = ov.precision_bits.value_or(j.value("precision_bits", kDefaultPrecisionBits));
  if (cfg.precision_bits < 64) throw InvalidParameters("precision_bits must be at least 64");
  const unsigned bits = cfg.precision_bits;
  cfg.params = j.contains("params") ? params_from_json(j.at("params"), bits) : golden_example(bits);
  cfg.seed = ov.seed.value_or(j.value("seed", std::uint64_t{0}));
  if (j.contains("box")) {
    const Json& b = j.at("box");
    if (!b.is_array() || b.size() != 4) throw InvalidParameters("box is [xmin, xmax, ymin, ymax]");
    Rect r{evaluate_expression(json_number_text(b[0]), bits), evaluate_expression(json_number_text(b[1]), bits),
           evaluate_expression(json_number_text(b[2]), bits), evaluate_expression(json_number_text(b[3]), bits)};
    if (!(r.xmax > r.xmin && r.ymax > r.ymin) || r.ymin < 0)
      throw InvalidParameters("box must have positive area and lie in the upper half-plane");
    cfg.box = r;
  }
  if (j.contains("orbit")) {
    const Json& o = j.at("orbit");
    cfg.orbit.count = o.value("count", cfg.orbit.count);
    cfg.orbit.steps = o.value("steps", cfg.orbit.steps);
    cfg.orbit.skip = o.value("skip", cfg.orbit.skip);
    if (o.contains("starts"))
      for (const auto& p : o.at("starts")) cfg.orbit.starts.push_back(point_from_json(p, bits));
    if (cfg.orbit.count < 1 || cfg.orbit.steps < 1) throw InvalidParameters("orbit counts must be >= 1");
    if (cfg.orbit.skip >= cfg.orbit.steps) throw InvalidParameters("orbit skip must be smaller than steps");
  }
  cfg.max_w = ov.max_w.value_or(j.value("max_w", cfg.max_w));
  if (j.contains("return")) {
    const Json& r = j.at("return");
    if (r.contains("points"))
      for (const auto& p : r.at("points")) cfg.ret.points.push_back(point_from_json(p, bits));
    if (r.contains("atom")) {
      const auto a = r.at("atom").get<std::vector<std::int64_t>>();
      if (a.size() != 2 || a[0] < 0 || a[1] < 0) throw InvalidParameters("atom is [m, n]");
      cfg.ret.atom = SemiIndex{static_cast<int>(a[0]), static_cast<std::uint64_t>(a[1])};
    }
    cfg.ret.samples = r.value("samples", cfg.ret.samples);
  }
  cfg.depth = ov.depth.value_or(j.value("depth", cfg.depth));
  cfg.samples = ov.samples.value_or(j.value("samples", cfg.samples));
  if (ov.samples) cfg.ret.samples = *ov.samples;
  if (cfg.samples < 1 || cfg.ret.samples < 1) throw InvalidParameters("sample counts must be >= 1");
  cfg.strict = ov.strict || j.value("strict_boundaries", false);
  cfg.verify_scale = j.value("verify_scale", cfg.verify_scale);
  if (cfg.verify_scale != "default" && cfg.verify_scale != "golden")
    throw InvalidParameters("verify_scale must be 'default' or 'golden'");
  return cfg;
}

inline RunConfig load_config(const std::string& path, const ConfigOverrides& ov = {}) {
  std::ifstream in(path);
  if (!in) throw InvalidParameters("cannot open config file " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw InvalidParameters(std::string("malformed config JSON: ") + e.what());
  }
  try {
    return config_from_json(j, ov);
  } catch (const Json::exception& e) {
    throw InvalidParameters(std::string("bad config value: ") + e.what());
  }
}

}  // namespace tce
