#include "rpl/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rpl/numeric.hpp"

namespace rpl {

using numeric::DoubleDouble;

namespace {

DoubleDouble cross_dd(Point a, Point b) { return numeric::exact_cross(a.x, a.y, b.x, b.y); }

// Star-shaped polygon seen from an interior point, for ray casting by angle.
struct PolarPolygon {
  Point center;
  std::vector<Point> vertices;  // ccw, rotated so that angles increase
  std::vector<double> angles;   // polar angle of each vertex in [0, 2*pi)

  PolarPolygon(Point c, std::span<const Point> poly) : center(c) {
    const std::size_t n = poly.size();
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Point d = poly[i] - c;
      raw[i] = normalize_angle(std::atan2(d.y, d.x));
    }
    const std::size_t s =
        static_cast<std::size_t>(std::min_element(raw.begin(), raw.end()) - raw.begin());
    for (std::size_t i = 0; i < n; ++i) {
      vertices.push_back(poly[(s + i) % n]);
      angles.push_back(raw[(s + i) % n]);
    }
  }

  Point hit(double phi) const {
    const std::size_t n = vertices.size();
    const std::size_t k =
        static_cast<std::size_t>(std::upper_bound(angles.begin(), angles.end(), phi) - angles.begin());
    const Point a = vertices[(k + n - 1) % n];
    const Point b = vertices[k % n];
    const Point d = direction(phi);
    const Point e = b - a;
    const double den = cross(d, e);
    if (den == 0.0) return a;
    const double t = cross(a - center, e) / den;
    return center + t * d;
  }
};

Point polygon_centroid(std::span<const Point> poly) {
  const Point o = poly[0];
  double cx = 0.0, cy = 0.0, twice = 0.0;
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    const Point p = poly[k] - o;
    const Point q = poly[k + 1] - o;
    const double c = cross(p, q);
    twice += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {o.x + cx / (3.0 * twice), o.y + cy / (3.0 * twice)};
}

// Strictly inside a ccw convex polygon, O(log n).
bool strictly_inside(const std::vector<Point>& poly, Point q) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  const Point o = poly[0];
  if (!(cross(poly[1] - o, q - o) > 0.0) || !(cross(q - o, poly[n - 1] - o) > 0.0)) return false;
  std::size_t lo = 1, hi = n - 1;  // wedge (o, poly[lo], poly[lo + 1]) holds q
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (cross(poly[mid] - o, q - o) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return cross(poly[lo + 1] - poly[lo], q - poly[lo]) > 0.0;
}

}  // namespace

Rng make_rng(const SeedRecord& seed) { return Rng(numeric::stream_seed(seed.master, seed.trial)); }

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

TriangleSampler::TriangleSampler(std::vector<std::array<Point, 3>> triangles)
    : triangles_(std::move(triangles)) {
  double sum = 0.0;
  cumulative_.reserve(triangles_.size());
  for (std::size_t i = 0; i < triangles_.size(); ++i) {
    sum += triangle_area(i);
    cumulative_.push_back(sum);
  }
}

TriangleSampler TriangleSampler::fan(std::span<const Point> poly) {
  std::vector<std::array<Point, 3>> tris;
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) tris.push_back({poly[0], poly[k], poly[k + 1]});
  return TriangleSampler(std::move(tris));
}

double TriangleSampler::triangle_area(std::size_t i) const {
  const auto& t = triangles_[i];
  return 0.5 * std::abs(cross(t[1] - t[0], t[2] - t[0]));
}

Point TriangleSampler::sample(Rng& rng) const {
  std::size_t which = 0;
  return sample(rng, which);
}

Point TriangleSampler::sample(Rng& rng, std::size_t& which) const {
  const double u = uniform01(rng) * area();
  which = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                   cumulative_.begin());
  which = std::min(which, triangles_.size() - 1);
  double r1 = uniform01(rng);
  double r2 = uniform01(rng);
  if (r1 + r2 > 1.0) {
    r1 = 1.0 - r1;
    r2 = 1.0 - r2;
  }
  const auto& t = triangles_[which];
  return t[0] + r1 * (t[1] - t[0]) + r2 * (t[2] - t[0]);
}

PointSet sample_poisson(const ConvexBody& body, const SeedRecord& seed) {
  Rng rng = make_rng(seed);
  std::poisson_distribution<std::uint64_t> count(body.area());
  const std::uint64_t m = count(rng);
  const TriangleSampler sampler = TriangleSampler::fan(body.vertices());
  PointSet out{{}, body.id(), seed};
  out.points.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) out.points.push_back(sampler.sample(rng));
  return out;
}

PointSet sample_uniform(const ConvexBody& body, std::size_t n, const SeedRecord& seed) {
  Rng rng = make_rng(seed);
  const TriangleSampler sampler = TriangleSampler::fan(body.vertices());
  PointSet out{{}, body.id(), seed};
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.points.push_back(sampler.sample(rng));
  return out;
}

HullResult hull(std::span<const Point> points, double body_area) {
  HullResult out;
  out.hull_vertices = monotone_chain_hull(points);
  out.N = out.hull_vertices.size();
  if (out.N < 3) {
    out.degenerate = true;
    out.A = body_area;
  } else {
    out.A = std::max(0.0, body_area - signed_area(out.hull_vertices));
  }
  return out;
}

HullResult hull(const PointSet& points, const ConvexBody& body) {
  return hull(points.points, body.area());
}

Functionals functionals(const ConvexBody& body, const HullResult& h) {
  const double tol = 1e-9 * body.diameter();
  for (const Point& p : h.hull_vertices) {
    if (!body.contains(p, tol)) throw std::invalid_argument("functionals: hull leaves the body");
  }
  if (h.degenerate) return {h.N, body.area()};
  return {h.N, std::max(0.0, body.area() - signed_area(h.hull_vertices))};
}

SectorValues sector_functionals(const ConvexBody& body, const HullResult& h,
                                const AngularPartition& partition) {
  if (h.degenerate || h.hull_vertices.size() < 3) {
    throw std::invalid_argument("sector_functionals: degenerate hull");
  }
  const std::vector<Point>& hv = h.hull_vertices;
  const std::size_t m = hv.size();
  const std::size_t L = partition.size();
  const double a0 = partition.angles.front();
  std::vector<double> offsets(L);
  for (std::size_t i = 0; i < L; ++i) offsets[i] = partition.angles[i] - a0;

  SectorValues out;
  out.angles = partition.angles;
  out.N.assign(L, 0);
  out.A.assign(L, 0.0);

  std::vector<double> rel(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Point e = hv[(k + 1) % m] - hv[k];
    rel[k] = normalize_angle(std::atan2(e.y, e.x) - a0);
    const std::size_t sector = static_cast<std::size_t>(
        std::upper_bound(offsets.begin(), offsets.end(), rel[k]) - offsets.begin() - 1);
    ++out.N[sector];
  }
  const std::size_t k0 = static_cast<std::size_t>(std::min_element(rel.begin(), rel.end()) - rel.begin());

  std::vector<DoubleDouble> prefix(m + 1);
  for (std::size_t k = 0; k < m; ++k) prefix[k + 1] = prefix[k] + cross_dd(hv[k], hv[(k + 1) % m]);
  auto hull_chain = [&](std::size_t i, std::size_t steps) {
    const std::size_t j = i + steps;
    if (j <= m) return prefix[j] - prefix[i];
    return (prefix[m] - prefix[i]) + prefix[j - m];
  };

  struct Cut {
    std::size_t w = 0;  // hull vertex index of W(alpha_i)
    ConvexBody::BoundaryHit exit;
  };
  std::vector<Cut> cuts(L);
  std::size_t cum = 0;
  for (std::size_t i = 0; i < L; ++i) {
    cuts[i].w = (k0 + cum) % m;
    cuts[i].exit = body.ray_exit(hv[cuts[i].w], partition.angles[i]);
    cum += static_cast<std::size_t>(out.N[i]);
  }

  const std::size_t n = body.size();
  auto along = [&](const ConvexBody::BoundaryHit& e) {
    const Point a = body.vertex(e.edge);
    return dot(e.point - a, body.vertex(e.edge + 1) - a);
  };
  // Shoelace sum of the ccw boundary arc of K from e to f; a full turn when
  // e and f coincide and full is set.
  auto arc = [&](const ConvexBody::BoundaryHit& e, const ConvexBody::BoundaryHit& f, bool full) {
    if (!full && e.edge == f.edge && along(f) >= along(e)) return cross_dd(e.point, f.point);
    const std::size_t start = (e.edge + 1) % n;
    const std::size_t steps = (f.edge + n - start) % n;
    return cross_dd(e.point, body.vertex(start)) + body.chain_cross(start, steps) +
           cross_dd(body.vertex(f.edge), f.point);
  };

  for (std::size_t i = 0; i < L; ++i) {
    const Cut& c = cuts[i];
    const Cut& d = cuts[(i + 1) % L];
    const Point wi = hv[c.w];
    const Point wj = hv[d.w];
    const DoubleDouble s = hull_chain(c.w, static_cast<std::size_t>(out.N[i])) +
                           cross_dd(wj, d.exit.point) - arc(c.exit, d.exit, L == 1) +
                           cross_dd(c.exit.point, wi);
    out.A[i] = -0.5 * s.value();
  }
  return out;
}

Point hull_support_vertex(const HullResult& h, double theta) {
  if (h.degenerate || h.hull_vertices.size() < 3) {
    throw std::invalid_argument("hull_support_vertex: degenerate hull");
  }
  const Point nrm = left_normal(theta);
  const Point dir = direction(theta);
  Point best = h.hull_vertices.front();
  for (const Point& p : h.hull_vertices) {
    const double a = dot(nrm, p), b = dot(nrm, best);
    if (a < b || (a == b && dot(dir, p) > dot(dir, best))) best = p;
  }
  return best;
}

ShellSampler::ShellSampler(const ConvexBody& body, double core_cap, int core_angles)
    : body_(&body), whole_(TriangleSampler::fan(body.vertices())) {
  if (!(body.area() > 8.0 * core_cap) || core_angles < 8) return;
  std::vector<double> angles(core_angles);
  for (int i = 0; i < core_angles; ++i) angles[i] = kTwoPi * i / core_angles;
  std::vector<HalfPlane> lines;
  // Refine where the corner of two neighbouring cap lines is shallow: such
  // a corner would often stay outside the hull and force a full draw.
  for (int round = 0; round < 16; ++round) {
    lines.clear();
    for (double a : angles) lines.push_back(cap_by_area(body, core_cap, a).halfplane);
    std::vector<double> refined;
    for (std::size_t i = 0; i < angles.size(); ++i) {
      const std::size_t j = (i + 1) % angles.size();
      const double a = angles[i];
      const double b = j == 0 ? angles[0] + kTwoPi : angles[j];
      refined.push_back(a);
      const Point na = left_normal(lines[i].angle), nb = left_normal(lines[j].angle);
      const double det = cross(na, nb);
      if (!(std::abs(det) > 1e-300)) continue;
      const Point corner = (1.0 / det) * (lines[i].offset * Point{nb.y, -nb.x} - lines[j].offset * Point{na.y, -na.x});
      if (!body.contains(corner)) {
        refined.push_back(normalize_angle(0.5 * (a + b)));
        continue;
      }
      // The shallowest direction through a corner can sit very close to
      // either line, so probe at geometric steps from both ends.
      double worst = core_cap, at = a;
      for (int e = 1; e <= 12; ++e) {
        const double step = (b - a) * std::ldexp(1.0, -e);
        for (double g : {a + step, b - step}) {
          const double v = cap_by_point(body, corner, g).area;
          if (v < worst) worst = v, at = g;
        }
      }
      if (worst < 0.5 * core_cap) refined.push_back(normalize_angle(at));
    }
    if (refined.size() == angles.size()) break;
    std::sort(refined.begin(), refined.end());
    angles = std::move(refined);
  }
  std::vector<Point> dry = body.vertices();
  for (std::size_t i = 0; i < lines.size() && dry.size() >= 3; ++i) {
    dry = clip_polygon(dry, lines[i].complement());
  }
  dry = monotone_chain_hull(dry);
  if (dry.size() < 3 || signed_area(dry) < 0.25 * body.area()) return;
  core_ = std::move(dry);

  const Point c = polygon_centroid(core_);
  const PolarPolygon outer(c, body.vertices());
  const PolarPolygon inner(c, core_);
  std::vector<double> breaks = outer.angles;
  breaks.insert(breaks.end(), inner.angles.begin(), inner.angles.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<std::array<Point, 3>> tris;
  tris.reserve(2 * breaks.size());
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    const double pa = breaks[i];
    const double pb = i + 1 < breaks.size() ? breaks[i + 1] : breaks[0] + kTwoPi;
    const Point ia = inner.hit(pa), oa = outer.hit(pa);
    const Point ib = inner.hit(normalize_angle(pb)), ob = outer.hit(normalize_angle(pb));
    // The wedge between two rays is a convex quadrilateral.
    tris.push_back({ia, oa, ob});
    tris.push_back({ia, ob, ib});
  }
  shell_ = TriangleSampler(std::move(tris));
  core_sampler_ = TriangleSampler::fan(core_);
}

bool ShellSampler::covers_core(const std::vector<Point>& hull_vertices) const {
  for (const Point& q : core_) {
    if (!strictly_inside(hull_vertices, q)) return false;
  }
  return true;
}

ShellSampler::Draw ShellSampler::draw(Rng& rng, Model model, std::uint64_t n) const {
  Draw out;
  const double area = body_->area();
  if (!has_core()) {
    std::uint64_t m = n;
    if (model == Model::poisson) m = std::poisson_distribution<std::uint64_t>(area)(rng);
    std::vector<Point> pts;
    pts.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) pts.push_back(whole_.sample(rng));
    out.count = m;
    out.hull = hull(pts, area);
    out.core_sampled = true;
    return out;
  }
  std::uint64_t outer = 0, inner = 0;
  if (model == Model::poisson) {
    outer = std::poisson_distribution<std::uint64_t>(shell_.area())(rng);
    inner = std::poisson_distribution<std::uint64_t>(core_sampler_.area())(rng);
  } else {
    const double p = shell_.area() / (shell_.area() + core_sampler_.area());
    outer = n == 0 ? 0 : std::binomial_distribution<std::uint64_t>(n, p)(rng);
    inner = n - outer;
  }
  std::vector<Point> pts;
  pts.reserve(outer);
  for (std::uint64_t i = 0; i < outer; ++i) pts.push_back(shell_.sample(rng));
  out.count = outer + inner;
  out.hull = hull(pts, area);
  if (inner > 0 && (out.hull.degenerate || !covers_core(out.hull.hull_vertices))) {
    std::vector<Point> all = out.hull.hull_vertices;
    all.reserve(all.size() + inner);
    for (std::uint64_t i = 0; i < inner; ++i) all.push_back(core_sampler_.sample(rng));
    out.hull = hull(all, area);
    out.core_sampled = true;
  }
  return out;
}

}  // namespace rpl
