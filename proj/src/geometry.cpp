#include "rpl/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <string>

namespace rpl {

using numeric::DoubleDouble;

namespace {

std::uint64_t next_body_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

DoubleDouble cross_dd(Point a, Point b) { return numeric::exact_cross(a.x, a.y, b.x, b.y); }

}  // namespace

double normalize_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

double signed_area(std::span<const Point> polygon) {
  if (polygon.size() < 3) return 0.0;
  const Point o = polygon[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < polygon.size(); ++i) {
    twice += cross(polygon[i] - o, polygon[i + 1] - o);
  }
  return 0.5 * twice;
}

std::vector<Point> monotone_chain_hull(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(),
            [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    const Point& p = pts[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

double AffineMap::map_angle(double theta) const {
  const Point d = linear(direction(theta));
  return normalize_angle(std::atan2(d.y, d.x));
}

ConvexBody::ConvexBody(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("convex body needs at least 3 vertices");

  prefix_.assign(n + 1, DoubleDouble{});
  for (std::size_t k = 0; k < n; ++k) {
    prefix_[k + 1] = prefix_[k] + cross_dd(vertices_[k], vertices_[(k + 1) % n]);
  }
  area_ = 0.5 * prefix_[n].value();
  if (!(area_ > 0.0)) {
    throw std::invalid_argument("convex body must be counterclockwise with positive area");
  }

  edge_angles_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Point e = vertices_[(k + 1) % n] - vertices_[k];
    const Point f = vertices_[(k + 2) % n] - vertices_[(k + 1) % n];
    if (!(cross(e, f) > 0.0)) {
      throw std::invalid_argument("convex body is not strictly convex at vertex " +
                                  std::to_string((k + 1) % n));
    }
    edge_angles_[k] = normalize_angle(std::atan2(e.y, e.x));
  }
  first_edge_ = static_cast<std::size_t>(
      std::min_element(edge_angles_.begin(), edge_angles_.end()) - edge_angles_.begin());
  for (std::size_t r = 1; r < n; ++r) {
    if (!(edge_angles_[(first_edge_ + r) % n] > edge_angles_[(first_edge_ + r - 1) % n])) {
      throw std::invalid_argument("convex body winds more than once");
    }
  }

  // Rotating calipers.
  std::size_t j = 1;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = vertices_[i];
    const Point b = vertices_[(i + 1) % n];
    const Point e = b - a;
    while (std::abs(cross(e, vertex(j + 1) - a)) > std::abs(cross(e, vertex(j) - a))) {
      j = (j + 1) % n;
    }
    best = std::max({best, norm(vertex(j) - a), norm(vertex(j) - b)});
  }
  diameter_ = best;

  const Point o = vertices_[0];
  double cx = 0.0, cy = 0.0, twice = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Point p = vertices_[k] - o;
    const Point q = vertices_[k + 1] - o;
    const double c = cross(p, q);
    twice += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  centroid_ = {o.x + cx / (3.0 * twice), o.y + cy / (3.0 * twice)};
  id_ = next_body_id();
}

ConvexBody ConvexBody::from_points(std::span<const Point> points) {
  std::vector<Point> hull = monotone_chain_hull(points);
  if (hull.size() < 3) throw std::invalid_argument("degenerate hull: fewer than 3 extreme points");
  return ConvexBody(std::move(hull));
}

std::size_t ConvexBody::support_index(double theta) const {
  const double t = normalize_angle(theta);
  const std::size_t n = vertices_.size();
  // Number of edges (in increasing-angle order) whose angle is <= t.
  std::size_t lo = 0, hi = n;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (edge_angles_[(first_edge_ + mid) % n] <= t) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return (first_edge_ + lo) % n;
}

bool ConvexBody::contains(Point p, double tol) const {
  const std::size_t n = vertices_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = vertices_[k];
    const Point e = vertex(k + 1) - a;
    if (cross(e, p - a) < -tol * norm(e)) return false;
  }
  return true;
}

DoubleDouble ConvexBody::chain_cross(std::size_t i, std::size_t steps) const {
  const std::size_t n = vertices_.size();
  i %= n;
  const std::size_t j = i + steps;
  if (j <= n) return prefix_[j] - prefix_[i];
  return (prefix_[n] - prefix_[i]) + prefix_[j - n];
}

ConvexBody::BoundaryHit ConvexBody::ray_exit(Point p, double theta) const {
  const std::size_t n = vertices_.size();
  const Point nrm = left_normal(theta);
  const std::size_t lo = support_index(theta);
  const std::size_t hi = support_index(theta + kPi);
  auto s = [&](std::size_t steps) { return dot(nrm, vertex(lo + steps) - p); };
  if (s(0) >= 0.0) return {p, (lo + n - 1) % n};
  const std::size_t len = (hi + n - lo) % n;
  // Smallest step in (0, len] with s >= 0; s is nondecreasing along the chain.
  std::size_t a = 0, b = len;
  while (b - a > 1) {
    const std::size_t mid = (a + b) / 2;
    if (s(mid) >= 0.0) {
      b = mid;
    } else {
      a = mid;
    }
  }
  const double sa = s(a);
  const double sb = s(b);
  const Point va = vertex(lo + a);
  const Point vb = vertex(lo + b);
  const double t = sa / (sa - sb);
  return {va + t * (vb - va), (lo + a) % n};
}

CapSlicer::CapSlicer(const ConvexBody& body, double theta)
    : body_(&body), theta_(normalize_angle(theta)), normal_(left_normal(theta)) {
  const std::size_t n = body.size();
  lo_ = body.support_index(theta);
  const std::size_t hi = body.support_index(theta + kPi);
  ccw_len_ = (hi + n - lo_) % n;
  cw_len_ = (lo_ + n - hi) % n;
  width_ = depth_of_index(hi);
}

std::size_t CapSlicer::ccw_index(std::size_t steps) const { return (lo_ + steps) % body_->size(); }

std::size_t CapSlicer::cw_index(std::size_t steps) const {
  const std::size_t n = body_->size();
  return (lo_ + n - steps % n) % n;
}

double CapSlicer::depth_of_index(std::size_t i) const {
  return dot(normal_, body_->vertex(i) - body_->vertex(lo_));
}

CapSlicer::Cut CapSlicer::cut_at(double depth) const {
  Cut cut;
  auto last_inside = [&](std::size_t len, auto index_of) {
    std::size_t a = 0, b = len;  // depth(a) <= depth < depth(b)
    while (b - a > 1) {
      const std::size_t mid = (a + b) / 2;
      if (depth_of_index(index_of(mid)) <= depth) {
        a = mid;
      } else {
        b = mid;
      }
    }
    return a;
  };
  auto ccw = [this](std::size_t s) { return ccw_index(s); };
  auto cw = [this](std::size_t s) { return cw_index(s); };
  cut.ccw_last = last_inside(ccw_len_, ccw);
  cut.cw_last = last_inside(cw_len_, cw);

  auto crossing = [&](std::size_t i0, std::size_t i1) {
    const double d0 = depth_of_index(i0);
    const double d1 = depth_of_index(i1);
    const Point v0 = body_->vertex(i0);
    const Point v1 = body_->vertex(i1);
    const double t = std::clamp((depth - d0) / (d1 - d0), 0.0, 1.0);
    return v0 + t * (v1 - v0);
  };
  cut.chord.ccw = crossing(ccw_index(cut.ccw_last), ccw_index(cut.ccw_last + 1));
  cut.chord.cw = crossing(cw_index(cut.cw_last), cw_index(cut.cw_last + 1));
  return cut;
}

double CapSlicer::area_at(double depth) const {
  if (depth <= 0.0) return 0.0;
  if (depth >= width_) return body_->area();
  return area_of(cut_at(depth));
}

double CapSlicer::area_of(const Cut& cut) const {
  const Point vi = body_->vertex(cw_index(cut.cw_last));
  const Point vj = body_->vertex(ccw_index(cut.ccw_last));
  const DoubleDouble twice = cross_dd(cut.chord.cw, vi) +
                             body_->chain_cross(cw_index(cut.cw_last), cut.cw_last + cut.ccw_last) +
                             cross_dd(vj, cut.chord.ccw) + cross_dd(cut.chord.ccw, cut.chord.cw);
  return std::max(0.0, 0.5 * twice.value());
}

Chord CapSlicer::chord_at(double depth) const {
  if (depth <= 0.0) {
    // Degenerate cap: the tangent line touches K along a point or an edge.
    const Cut cut = cut_at(0.0);
    return cut.chord;
  }
  if (depth >= width_) {
    const Point far = body_->vertex(ccw_index(ccw_len_));
    return {far, far};
  }
  return cut_at(depth).chord;
}

std::vector<Point> CapSlicer::polygon_at(double depth) const {
  if (depth >= width_) return body_->vertices();
  const Cut cut = cut_at(std::max(depth, 0.0));
  std::vector<Point> poly;
  poly.reserve(cut.cw_last + cut.ccw_last + 3);
  poly.push_back(cut.chord.cw);
  const std::size_t start = cw_index(cut.cw_last);
  for (std::size_t s = 0; s <= cut.cw_last + cut.ccw_last; ++s) {
    poly.push_back(body_->vertex(start + s));
  }
  poly.push_back(cut.chord.ccw);
  return poly;
}

HalfPlane CapSlicer::halfplane_at(double depth) const {
  return {theta_, dot(normal_, body_->vertex(lo_)) + depth};
}

Cap CapSlicer::cap_at(double depth) const {
  return {halfplane_at(depth), chord_at(depth), area_at(depth), body_->id()};
}

double CapSlicer::depth_for_area(double area) const {
  if (area <= 0.0) return 0.0;
  if (area >= body_->area()) return width_;
  // Safeguarded Newton: the slope of area in depth is the chord length, and
  // any step leaving the current bracket is replaced by bisection.
  double lo = 0.0, hi = width_;
  const double tol = 1e-13 * body_->diameter();
  double h = width_ * std::min(0.5, area / body_->area());
  for (int it = 0; it < 300; ++it) {
    const Cut cut = cut_at(h);
    const double a = area_of(cut);
    const double err = area - a;
    if (std::abs(err) <= 1e-15 * area) return h;
    if (err > 0.0) {
      lo = h;
    } else {
      hi = h;
    }
    if (hi - lo <= tol && std::abs(err) <= 1e-13 * area) return h;
    const double slope = cut.chord.length();
    double next = slope > 0.0 ? h + err / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == h) return h;
    h = next;
  }
  return h;
}

std::vector<Point> clip_polygon(std::span<const Point> polygon, const HalfPlane& h) {
  std::vector<Point> out;
  const std::size_t n = polygon.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  const Point nrm = left_normal(h.angle);
  auto value = [&](Point p) { return dot(nrm, p) - h.offset; };
  Point prev = polygon[n - 1];
  double vprev = value(prev);
  for (std::size_t i = 0; i < n; ++i) {
    const Point cur = polygon[i];
    const double vcur = value(cur);
    if (vcur <= 0.0) {
      if (vprev > 0.0) {
        const double t = vprev / (vprev - vcur);
        out.push_back(prev + t * (cur - prev));
      }
      out.push_back(cur);
    } else if (vprev <= 0.0) {
      const double t = vprev / (vprev - vcur);
      out.push_back(prev + t * (cur - prev));
    }
    prev = cur;
    vprev = vcur;
  }
  return out;
}

std::optional<ConvexBody> clip(const ConvexBody& body, const HalfPlane& h) {
  bool all_inside = true;
  for (const Point& v : body.vertices()) {
    if (!h.contains(v)) {
      all_inside = false;
      break;
    }
  }
  if (all_inside) return body;
  std::vector<Point> raw = clip_polygon(body.vertices(), h);
  std::vector<Point> hull = monotone_chain_hull(raw);
  if (hull.size() < 3 || !(signed_area(hull) > 0.0)) return std::nullopt;
  try {
    return ConvexBody(std::move(hull));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

Point support_vertex(const ConvexBody& body, double theta) {
  return body.vertex(body.support_index(theta));
}

Cap cap_by_point(const ConvexBody& body, Point p, double theta) {
  if (!body.contains(p, 1e-9 * body.diameter())) {
    throw std::domain_error("cap_by_point: point lies outside the body");
  }
  const CapSlicer slicer(body, theta);
  return slicer.cap_at(std::clamp(slicer.depth_of(p), 0.0, slicer.width()));
}

Cap cap_by_area(const ConvexBody& body, double r, double theta) {
  if (!(r > 0.0) || r > body.area() * (1.0 + 1e-12)) {
    throw std::domain_error("cap_by_area: area must lie in (0, area(K)]");
  }
  const CapSlicer slicer(body, theta);
  return slicer.cap_at(slicer.depth_for_area(r));
}

std::vector<Point> cap_polygon(const ConvexBody& body, const Cap& cap) {
  if (cap.body_id != body.id()) throw std::invalid_argument("cap belongs to a different body");
  const CapSlicer slicer(body, cap.halfplane.angle);
  const double depth = cap.halfplane.offset - dot(slicer.normal(), slicer.support_point());
  return slicer.polygon_at(depth);
}

double chord_length_f(const ConvexBody& body, double x, double theta) {
  if (!(x > 0.0) || x > 1.0) throw std::domain_error("chord_length_f: x must lie in (0, 1]");
  if (x <= std::exp(-body.area())) return 0.0;
  const double r = -std::log(x);
  if (!(r > 0.0)) return 0.0;
  return cap_by_area(body, std::min(r, body.area()), theta).chord.length();
}

double cap_intersection_area(const ConvexBody& body, const Cap& c1, const Cap& c2) {
  if (c1.body_id != body.id() || c2.body_id != body.id()) {
    throw std::invalid_argument("cap_intersection_area: caps belong to different bodies");
  }
  const std::vector<Point> first = cap_polygon(body, c1);
  const std::vector<Point> both = clip_polygon(first, c2.halfplane);
  return std::max(0.0, signed_area(both));
}

ConvexBody apply_affine(const ConvexBody& body, const AffineMap& g) {
  if (std::abs(g.determinant() - 1.0) > 1e-12) {
    throw std::invalid_argument("apply_affine: map is not unimodular");
  }
  std::vector<Point> mapped;
  mapped.reserve(body.size());
  for (const Point& v : body.vertices()) mapped.push_back(g(v));
  return ConvexBody(std::move(mapped));
}

}  // namespace rpl
