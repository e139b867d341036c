#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "cone_exchange.hpp"
#include "continued_fraction.hpp"
#include "zlambda.hpp"

namespace tce {

// A translate of C_0, the middle cone, or C_{d+1} with the given vertex on the
// real axis (C - x has vertex -x).
struct ConeTranslate {
  MacroCone cone;
  ZLambda vertex;
};

// Which family of parallel lines a half-plane is bounded by: lines at angle
// alpha_0 (u = const) or at angle pi - alpha_{d+1} (v = const).
enum class EdgeLine { First, Last };
enum class Side { Above, Below };

// {coord > anchor} / {coord >= anchor} (Side::Above) or the reverse, where
// coord is u for EdgeLine::First and v for EdgeLine::Last. The anchor is the
// point where the boundary line meets the real axis.
struct HalfPlane {
  EdgeLine line;
  ZLambda anchor;
  Side side;
  bool closed;
};

struct Bound {
  ZLambda value;
  bool closed;
};

// Intersection of translated cones: an axis-parallel box in (u, v), with
// exact bounds in Q + Q*lambda.
struct ConeBox {
  std::optional<Bound> u_lo, u_hi, v_lo, v_hi;

  bool bounded() const { return u_lo && u_hi && v_lo && v_hi; }

  std::vector<HalfPlane> half_planes() const {
    std::vector<HalfPlane> out;
    if (u_lo) out.push_back({EdgeLine::First, u_lo->value, Side::Above, u_lo->closed});
    if (u_hi) out.push_back({EdgeLine::First, u_hi->value, Side::Below, u_hi->closed});
    if (v_lo) out.push_back({EdgeLine::Last, v_lo->value, Side::Above, v_lo->closed});
    if (v_hi) out.push_back({EdgeLine::Last, v_hi->value, Side::Below, v_hi->closed});
    return out;
  }
};

namespace detail {
// Tighter of two bounds; on equal values the open one wins.
inline void tighten(std::optional<Bound>& slot, const Bound& b, bool lower) {
  if (!slot) {
    slot = b;
    return;
  }
  const int c = compare(b.value, slot->value);
  if ((lower && c > 0) || (!lower && c < 0))
    slot = b;
  else if (c == 0)
    slot->closed = slot->closed && b.closed;
}
}  // namespace detail

inline ConeBox intersect_cones(const std::vector<ConeTranslate>& pieces) {
  ConeBox box;
  for (const auto& piece : pieces) {
    switch (piece.cone) {
      case MacroCone::Right:
        detail::tighten(box.u_lo, {piece.vertex, false}, true);
        break;
      case MacroCone::Middle:
        detail::tighten(box.u_hi, {piece.vertex, true}, false);
        detail::tighten(box.v_lo, {piece.vertex, true}, true);
        break;
      case MacroCone::Left:
        detail::tighten(box.v_hi, {piece.vertex, false}, false);
        break;
    }
  }
  return box;
}

enum class Membership { Inside, Outside, Ambiguous };

// A ConeBox together with floating-point copies of its bounds, for fast
// point classification in E-space.
class Region {
 public:
  Region() = default;
  Region(ConeBox box, std::shared_ptr<const ConeGeometry> geometry, unsigned bits)
      : box_(std::move(box)), geometry_(std::move(geometry)) {
    auto f = [bits](const std::optional<Bound>& b) -> std::optional<Real> {
      if (!b) return std::nullopt;
      return b->value.to_float(bits);
    };
    u_lo_ = f(box_.u_lo);
    u_hi_ = f(box_.u_hi);
    v_lo_ = f(box_.v_lo);
    v_hi_ = f(box_.v_hi);
    guard_ = guard_tolerance(bits);
  }

  const ConeBox& box() const { return box_; }
  const ConeGeometry& geometry() const { return *geometry_; }
  const std::optional<Real>& u_lo() const { return u_lo_; }
  const std::optional<Real>& u_hi() const { return u_hi_; }
  const std::optional<Real>& v_lo() const { return v_lo_; }
  const std::optional<Real>& v_hi() const { return v_hi_; }

  Membership classify_uv(const Real& u, const Real& v) const {
    bool near = false;
    bool out = false;
    auto check = [&](const std::optional<Real>& b, const Real& c, bool lower) {
      if (!b) return;
      const Real diff = lower ? c - *b : *b - c;  // positive means inside this bound
      const Real g = guard_ * mp::max(Real(1), mp::abs(c));
      if (mp::abs(diff) <= g)
        near = true;
      else if (diff < 0)
        out = true;
    };
    check(u_lo_, u, true);
    check(u_hi_, u, false);
    check(v_lo_, v, true);
    check(v_hi_, v, false);
    if (out) return Membership::Outside;
    return near ? Membership::Ambiguous : Membership::Inside;
  }

  // Plain floating comparison honoring open and closed sides.
  bool resolve_uv(const Real& u, const Real& v) const {
    auto ok = [](const std::optional<Real>& b, const std::optional<Bound>& exact, const Real& c, bool lower) {
      if (!b) return true;
      if (lower) return exact->closed ? c >= *b : c > *b;
      return exact->closed ? c <= *b : c < *b;
    };
    return ok(u_lo_, box_.u_lo, u, true) && ok(u_hi_, box_.u_hi, u, false) && ok(v_lo_, box_.v_lo, v, true) &&
           ok(v_hi_, box_.v_hi, v, false);
  }

  Membership classify(const Point& w) const {
    return classify_uv(geometry_->u_coord(w), geometry_->v_coord(w));
  }

  bool contains(const Point& w, BoundaryMode mode = BoundaryMode::Lenient) const {
    const Real u = geometry_->u_coord(w);
    const Real v = geometry_->v_coord(w);
    switch (classify_uv(u, v)) {
      case Membership::Inside: return true;
      case Membership::Outside: return false;
      default:
        if (mode == BoundaryMode::Strict) throw PrecisionAmbiguous("point within guard tolerance of a region edge");
        return resolve_uv(u, v);
    }
  }

  // Corners (u_lo,v_lo), (u_hi,v_lo), (u_hi,v_hi), (u_lo,v_hi), counterclockwise.
  std::array<Point, 4> vertices() const {
    if (!box_.bounded()) throw std::logic_error("vertices of an unbounded region");
    return {geometry_->from_uv(*u_lo_, *v_lo_), geometry_->from_uv(*u_hi_, *v_lo_),
            geometry_->from_uv(*u_hi_, *v_hi_), geometry_->from_uv(*u_lo_, *v_hi_)};
  }

  // Point with box coordinates s, t in [0,1] along u and v.
  Point at(const Real& s, const Real& t) const {
    if (!box_.bounded()) throw std::logic_error("parametrizing an unbounded region");
    return geometry_->from_uv(*u_lo_ + s * (*u_hi_ - *u_lo_), *v_lo_ + t * (*v_hi_ - *v_lo_));
  }

 private:
  ConeBox box_;
  std::shared_ptr<const ConeGeometry> geometry_;
  std::optional<Real> u_lo_, u_hi_, v_lo_, v_hi_;
  Real guard_;
};

// The atom S_{m,n}.
struct Parallelogram {
  SemiIndex index;
  bool odd = false;
  std::vector<ConeTranslate> pieces;
  Region region;
  std::array<Point, 4> vertices;

  std::vector<HalfPlane> constraints() const { return region.box().half_planes(); }
};

struct URegion {
  SemiIndex anchor;
  std::vector<ConeTranslate> pieces;
  Region region;
  std::array<Point, 4> vertices;

  std::vector<HalfPlane> constraints() const { return region.box().half_planes(); }
};

namespace detail {
// n*Delta_{m,0} + Delta_{m-1,0}.
inline ZLambda delta_combination(const ContinuedFraction& cf, int m, std::uint64_t n) {
  return BigRational(n) * delta(cf, {m, 0}) + delta(cf, {m - 1, 0});
}
}  // namespace detail

// S_{m,n} for (m, n) in the strict index set, built over any geometry.
inline Parallelogram smn_region(const std::shared_ptr<const ConeGeometry>& geometry, const ContinuedFraction& cf,
                                const SemiIndex& idx) {
  if (!in_strict_index_set(cf, idx))
    throw IndexOutOfRange("S_{m,n} needs n < lambda_{m+1}, got " + to_string(idx));
  const ZLambda zero = ZLambda::constant(cf, 0);
  const ZLambda dm0 = delta(cf, {idx.m, 0});
  const ZLambda next = delta(cf, {idx.m, idx.n + 1});
  const ZLambda mixed = detail::delta_combination(cf, idx.m, idx.n);
  Parallelogram out;
  out.index = idx;
  out.odd = idx.m % 2 != 0;
  if (!out.odd)
    out.pieces = {{MacroCone::Right, -dm0}, {MacroCone::Middle, zero}, {MacroCone::Middle, -next}, {MacroCone::Left, -mixed}};
  else
    out.pieces = {{MacroCone::Right, -mixed}, {MacroCone::Middle, zero}, {MacroCone::Middle, -next}, {MacroCone::Left, -dm0}};
  out.region = Region(intersect_cones(out.pieces), geometry, geometry->precision_bits());
  out.vertices = out.region.vertices();
  return out;
}

inline Parallelogram smn_region(const TceParams& k, const SemiIndex& idx) {
  return smn_region(k.geometry_ptr(), k.lambda(), idx);
}

// U_{k,l}: the convex union of S_{m,n} with w(m,n) >= w(k,l), together with 0.
inline URegion u_region(const std::shared_ptr<const ConeGeometry>& geometry, const ContinuedFraction& cf,
                        const SemiIndex& anchor) {
  require_index(cf, anchor);
  const ZLambda zero = ZLambda::constant(cf, 0);
  const ZLambda dk0 = delta(cf, {anchor.m, 0});
  const ZLambda mixed = detail::delta_combination(cf, anchor.m, anchor.n);
  URegion out;
  out.anchor = anchor;
  if (anchor.m % 2 == 0)
    out.pieces = {{MacroCone::Right, -dk0}, {MacroCone::Middle, zero}, {MacroCone::Left, -mixed}};
  else
    out.pieces = {{MacroCone::Right, -mixed}, {MacroCone::Middle, zero}, {MacroCone::Left, -dk0}};
  out.region = Region(intersect_cones(out.pieces), geometry, geometry->precision_bits());
  out.vertices = out.region.vertices();
  return out;
}

inline URegion u_region(const TceParams& k, const SemiIndex& anchor) {
  return u_region(k.geometry_ptr(), k.lambda(), anchor);
}

// X = C_c n (C_c - (lambda - eta)) n (C_{d+1} + eta); in the golden case
// lambda - eta = Phi^3 and eta = Phi^2.
inline Region golden_x_region(const TceParams& k) {
  const auto& cf = k.lambda();
  const ZLambda lam = ZLambda::lambda(cf);
  std::vector<ConeTranslate> pieces{{MacroCone::Middle, ZLambda::constant(cf, 0)},
                                    {MacroCone::Middle, k.eta() - lam},
                                    {MacroCone::Left, k.eta()}};
  return Region(intersect_cones(pieces), k.geometry_ptr(), k.precision_bits());
}

// Y = C_c n (C_c + eta).
inline Region golden_y_region(const TceParams& k) {
  std::vector<ConeTranslate> pieces{{MacroCone::Middle, ZLambda::constant(k.lambda(), 0)},
                                    {MacroCone::Middle, k.eta()}};
  return Region(intersect_cones(pieces), k.geometry_ptr(), k.precision_bits());
}

// Edge lengths |Delta_{m,0}| sin(alpha_0)/sin(alpha_0+alpha_{d+1}) (edges
// along the pi - alpha_{d+1} direction) and the alpha_{d+1} analogue.
inline std::pair<Real, Real> side_lengths_formula(const ConeGeometry& g, const Real& width) {
  const Real w = mp::abs(width);
  return {w * g.sin_first() / g.sin_outer(), w * g.sin_last() / g.sin_outer()};
}

// ---- polygons -------------------------------------------------------------

// Keeps the part of a convex polygon where a*x + b*y + c >= 0.
inline std::vector<Point> clip_polygon(const std::vector<Point>& poly, const Real& a, const Real& b, const Real& c) {
  std::vector<Point> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    const Real fp = a * p.re + b * p.im + c;
    const Real fq = a * q.re + b * q.im + c;
    if (fp >= 0) out.push_back(p);
    if ((fp >= 0) != (fq >= 0)) {
      const Real t = fp / (fp - fq);
      out.push_back({p.re + t * (q.re - p.re), p.im + t * (q.im - p.im)});
    }
  }
  return out;
}

inline Real polygon_area(const std::vector<Point>& poly) {
  Real twice = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    twice += p.re * q.im - q.re * p.im;
  }
  return twice / 2;
}

struct Rect {
  Real xmin, xmax, ymin, ymax;
};

// The region cut down to a rectangle, as a convex polygon (possibly empty).
inline std::vector<Point> region_polygon(const Region& r, const Rect& clip) {
  const ConeGeometry& g = r.geometry();
  std::vector<Point> poly{{clip.xmin, clip.ymin}, {clip.xmax, clip.ymin}, {clip.xmax, clip.ymax}, {clip.xmin, clip.ymax}};
  const Real one(1);
  if (r.u_lo()) poly = clip_polygon(poly, one, -g.cot_first(), -*r.u_lo());
  if (r.u_hi()) poly = clip_polygon(poly, -one, g.cot_first(), *r.u_hi());
  if (r.v_lo()) poly = clip_polygon(poly, one, g.cot_last(), -*r.v_lo());
  if (r.v_hi()) poly = clip_polygon(poly, -one, -g.cot_last(), *r.v_hi());
  return poly;
}

struct PreimagePiece {
  std::size_t cone;
  std::vector<Point> vertices;
};

// E^{-1}(P) n C_j for each j whose image sector meets the polygon P.
inline std::vector<PreimagePiece> preimage_pieces(const ConeGeometry& g, const std::vector<Point>& poly) {
  std::vector<PreimagePiece> out;
  if (poly.size() < 3) return out;
  const Real zero(0);
  for (std::size_t j = 1; j <= g.d(); ++j) {
    const auto [start, end] = g.image_sector(j);
    std::vector<Point> piece = clip_polygon(poly, -start.second, start.first, zero);
    piece = clip_polygon(piece, end.second, -end.first, zero);
    if (piece.size() < 3 || polygon_area(piece) <= guard_tolerance(g.precision_bits())) continue;
    for (Point& p : piece) p = g.rotate_back(p, j);
    out.push_back({j, std::move(piece)});
  }
  return out;
}

}  // namespace tce
