#pragma once

#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cone_exchange.hpp"
#include "io.hpp"
#include "regions.hpp"
#include "renorm.hpp"
#include "return_map.hpp"
#include "sampling.hpp"

namespace tce {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct OrbitSummary {
  std::uint64_t points = 0;
  std::uint64_t skipped = 0;
  std::uint64_t rows = 0;
};

// Forward orbits as CSV rows point_id,t,re,im for t = skip+1 .. steps.
inline OrbitSummary cmd_orbit(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const TceParams& k = cfg.params;
  const unsigned bits = cfg.precision_bits;
  PrecisionScope scope(bits);
  const BoundaryMode mode = cfg.strict ? BoundaryMode::Strict : BoundaryMode::Lenient;
  std::vector<Point> starts = cfg.orbit.starts;
  if (starts.empty()) {
    const Rect box = cfg.sampling_box();
    Rng rng(cfg.seed);
    for (std::uint64_t i = 0; i < cfg.orbit.count; ++i) {
      Real x = rng.uniform(box.xmin, box.xmax);
      Real y = rng.uniform(box.ymin, box.ymax);
      starts.push_back({x, y});
    }
  }
  OrbitSummary sum;
  out << "point_id,t,re,im\n";
  for (std::size_t id = 0; id < starts.size(); ++id) {
    std::ostringstream rows;
    try {
      Point z = starts[id];
      for (std::uint64_t t = 1; t <= cfg.orbit.steps; ++t) {
        z = step_F(k, z, mode);
        if (t > cfg.orbit.skip) rows << id << ',' << t << ',' << format_real(z.re, bits) << ',' << format_real(z.im, bits) << '\n';
      }
    } catch (const PrecisionAmbiguous& e) {
      log << "skipping point " << id << ": " << e.what() << '\n';
      ++sum.skipped;
      continue;
    }
    out << rows.str();
    ++sum.points;
    sum.rows += cfg.orbit.steps - cfg.orbit.skip;
  }
  return sum;
}

// Atoms S_{m,n} with w(m0,n0) <= w <= w(m0,n0) + max_w, their E-preimage
// pieces, and in the golden case the complementary regions X and Y clipped to
// the configured box.
inline Json cmd_partition(const RunConfig& cfg) {
  const TceParams& k = cfg.params;
  const unsigned bits = cfg.precision_bits;
  PrecisionScope scope(bits);
  const auto& cf = k.lambda();
  const SemiIndex anchor = m0n0(k);
  const std::uint64_t w0 = w_index(cf, anchor);
  Json doc;
  doc["params"] = to_json(k);
  doc["anchor"] = to_json(anchor);
  doc["max_w"] = cfg.max_w;
  doc["golden"] = is_golden(k);
  Json atoms = Json::array();
  for (std::uint64_t w = w0; w <= w0 + cfg.max_w; ++w) {
    const SemiIndex idx = index_at(cf, w);
    const auto s = atom(k, idx);
    Json a = to_json(*s, bits);
    a["w"] = w;
    a["return_time"] = return_time_formula(k, {idx.m, idx.n + 1}).str();
    a["translation"] = to_json(delta(cf, {idx.m, idx.n + 1}));
    Json pieces = Json::array();
    for (const auto& piece : preimage_pieces(k.geometry(), {s->vertices.begin(), s->vertices.end()}))
      pieces.push_back({{"cone", piece.cone}, {"vertices", polygon_json(piece.vertices, bits)}});
    a["preimage"] = pieces;
    atoms.push_back(a);
  }
  doc["atoms"] = atoms;
  if (is_golden(k)) {
    const Rect clip = cfg.sampling_box();
    Json extra = Json::array();
    for (const auto& [name, region] : {std::pair<std::string, Region>{"X", golden_x_region(k)}, {"Y", golden_y_region(k)}}) {
      const auto poly = region_polygon(region, clip);
      Json pieces = Json::array();
      for (const auto& piece : preimage_pieces(k.geometry(), poly))
        pieces.push_back({{"cone", piece.cone}, {"vertices", polygon_json(piece.vertices, bits)}});
      extra.push_back({{"name", name}, {"vertices", polygon_json(poly, bits)}, {"preimage", pieces}});
    }
    doc["complement"] = extra;
  }
  return doc;
}

struct ReturnSummary {
  std::uint64_t rows = 0;
  std::uint64_t agree = 0;
  std::uint64_t flagged = 0;
};

// One CSV row per point comparing the closed-form return map with the
// brute-force one.
inline ReturnSummary cmd_return(const RunConfig& cfg, std::ostream& out) {
  const TceParams& k = cfg.params;
  const unsigned bits = cfg.precision_bits;
  PrecisionScope scope(bits);
  const BoundaryMode mode = cfg.strict ? BoundaryMode::Strict : BoundaryMode::Lenient;
  std::vector<Point> points = cfg.ret.points;
  if (points.empty()) {
    const SemiIndex idx = cfg.ret.atom.value_or(m0n0(k));
    const auto s = atom(k, idx);
    Rng rng(cfg.seed);
    for (std::uint64_t i = 0; i < cfg.ret.samples; ++i) points.push_back(sample_preimage(k, s->region, rng));
  }
  const Real tol = agreement_tolerance(bits);
  ReturnSummary sum;
  out << "re,im,h_closed,h_iter,re_closed,im_closed,re_iter,im_iter,agree,status\n";
  for (const Point& z : points) {
    ++sum.rows;
    out << format_real(z.re, bits) << ',' << format_real(z.im, bits) << ',';
    std::string status = "ok";
    std::optional<ReturnResult> closed, iter;
    try {
      closed = return_map_closed(k, z, mode);
    } catch (const NotInDomain&) {
      status = "not-in-domain";
    } catch (const PrecisionAmbiguous&) {
      status = "ambiguous";
    }
    try {
      iter = first_return_iter(k, z, {10'000'000, mode});
    } catch (const NotInDomain&) {
      status = "not-in-domain";
    } catch (const PrecisionAmbiguous&) {
      status = "ambiguous";
    } catch (const IterationBudgetExceeded&) {
      status = "budget-exceeded";
    }
    const bool agree = closed && iter && closed->h == iter->h && distance(closed->w, iter->w) <= tol;
    out << (closed ? closed->h.str() : "") << ',' << (iter ? iter->h.str() : "") << ',';
    out << (closed ? format_real(closed->w.re, bits) : "") << ',' << (closed ? format_real(closed->w.im, bits) : "") << ',';
    out << (iter ? format_real(iter->w.re, bits) : "") << ',' << (iter ? format_real(iter->w.im, bits) : "") << ',';
    out << (agree ? "true" : "false") << ',' << status << '\n';
    if (agree) ++sum.agree;
    if (status != "ok") ++sum.flagged;
  }
  return sum;
}

inline Json to_json(const ConjugacyReport& r) {
  Json j{{"samples", r.samples},
         {"max_dev", r.max_dev.convert_to<double>()},
         {"pass", r.pass},
         {"seed", r.seed},
         {"time_mismatches", r.time_mismatches},
         {"failures", r.failures}};
  if (!r.first_error.empty()) j["first_error"] = r.first_error;
  return j;
}

struct RenormOutcome {
  Json report;
  int exit_code = kExitOk;
};

inline RenormOutcome cmd_renorm(const RunConfig& cfg) {
  const TceParams& k = cfg.params;
  const unsigned bits = cfg.precision_bits;
  PrecisionScope scope(bits);
  const RenormTower tower = renorm_tower(k, cfg.depth, true);
  Json steps = Json::array();
  bool all_pass = true;
  for (std::size_t i = 0; i < tower.steps.size(); ++i) {
    const RenormStep& st = tower.steps[i];
    const ConjugacyReport rep = verify_conjugacy(st, cfg.samples, cfg.seed + i);
    all_pass = all_pass && rep.pass;
    steps.push_back({{"step", i + 1},
                     {"lambda_in", to_json(st.kappa_in.lambda())},
                     {"eta_in", {{"p", st.kappa_in.p().str()}, {"q", st.kappa_in.q().str()}}},
                     {"anchor_in", to_json(st.anchor_in)},
                     {"lambda_out", to_json(st.kappa_out.lambda())},
                     {"eta_out", {{"p", st.kappa_out.p().str()}, {"q", st.kappa_out.q().str()}}},
                     {"anchor_out", to_json(st.anchor_out)},
                     {"scale", to_json(st.scale)},
                     {"scale_float", format_real(st.scale.to_float(bits), bits)},
                     {"domain", to_json(st.domain, bits)},
                     {"conjugacy", to_json(rep)}});
  }
  Json doc{{"requested_depth", tower.requested},
           {"certified_depth", tower.steps.size()},
           {"exhausted", tower.exhausted},
           {"cumulative_scale", format_real(cumulative_scale(tower, bits), bits)},
           {"steps", steps},
           {"pass", all_pass}};
  doc["remaining_quotients"] = tower.remaining_quotients ? Json(*tower.remaining_quotients) : Json(nullptr);
  int code = all_pass ? kExitOk : kExitFailure;
  if (tower.exhausted && code == kExitOk) code = kExitRuntime;
  return {doc, code};
}

}  // namespace tce
