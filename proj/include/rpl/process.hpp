#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rpl/geometry.hpp"
#include "rpl/measure.hpp"

namespace rpl {

using Rng = std::mt19937_64;

// Identifies one trial's random stream.
struct SeedRecord {
  std::uint64_t master = 0;
  std::uint64_t trial = 0;
};

Rng make_rng(const SeedRecord& seed);
// Uniform double in [0, 1) from the top 53 bits.
double uniform01(Rng& rng);

struct PointSet {
  std::vector<Point> points;
  std::uint64_t body_id = 0;
  SeedRecord seed;
};

// Area-weighted triangle picker for uniform sampling in a polygon region.
class TriangleSampler {
 public:
  TriangleSampler() = default;
  explicit TriangleSampler(std::vector<std::array<Point, 3>> triangles);
  // Fan triangulation from vertex 0 of a convex polygon.
  static TriangleSampler fan(std::span<const Point> convex_polygon);

  double area() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  std::size_t size() const { return triangles_.size(); }
  const std::array<Point, 3>& triangle(std::size_t i) const { return triangles_[i]; }
  double triangle_area(std::size_t i) const;

  Point sample(Rng& rng) const;
  // Same, also reporting which triangle was used.
  Point sample(Rng& rng, std::size_t& which) const;

 private:
  std::vector<std::array<Point, 3>> triangles_;
  std::vector<double> cumulative_;
};

// Poisson(area(K)) many i.i.d. uniform points in K.
PointSet sample_poisson(const ConvexBody& body, const SeedRecord& seed);
// Exactly n i.i.d. uniform points in K.
PointSet sample_uniform(const ConvexBody& body, std::size_t n, const SeedRecord& seed);

struct HullResult {
  std::vector<Point> hull_vertices;  // ccw, strictly convex
  bool degenerate = false;           // fewer than 3 extreme points
  std::size_t N = 0;
  double A = 0.0;
};

// Degenerate hulls get N = number of distinct extreme points and A = area(K).
HullResult hull(std::span<const Point> points, double body_area);
HullResult hull(const PointSet& points, const ConvexBody& body);

struct Functionals {
  std::size_t N = 0;
  double A = 0.0;
};
// Throws std::invalid_argument when a hull vertex lies outside K.
Functionals functionals(const ConvexBody& body, const HullResult& hull);

struct SectorValues {
  std::vector<double> angles;  // partition angles alpha_i
  std::vector<std::int64_t> N;
  std::vector<double> A;
};

// N_i counts hull edges with angle in [alpha_i, alpha_i+1). A_i is the area
// enclosed by the hull chain W(alpha_i) -> W(alpha_i+1), the segment from
// W(alpha_i+1) along direction alpha_i+1 to the boundary of K, the boundary
// arc of K back to the exit point of alpha_i, and the segment back to
// W(alpha_i). Throws std::invalid_argument on a degenerate hull.
SectorValues sector_functionals(const ConvexBody& body, const HullResult& hull,
                                const AngularPartition& partition);

// W(theta) of the hull polygon with the same tie-break as support_vertex.
Point hull_support_vertex(const HullResult& hull, double theta);

enum class Model { poisson, uniform };

// Exact sampler of the hull law that skips most interior points. The body is
// split into a convex core K' (a dry part for caps of area core_cap) and the
// shell K \ K'. Shell points are drawn first; the core count is drawn from its
// exact conditional law, and core positions are only generated when the hull
// of the shell points fails to cover K'. The hull of all points has the same
// law as with plain sampling.
class ShellSampler {
 public:
  ShellSampler(const ConvexBody& body, double core_cap = 30.0, int core_angles = 256);

  bool has_core() const { return !core_.empty(); }
  double shell_area() const { return shell_.area(); }
  double core_area() const { return core_sampler_.area(); }
  const std::vector<Point>& core() const { return core_; }

  struct Draw {
    std::uint64_t count = 0;  // total number of points
    HullResult hull;
    bool core_sampled = false;
  };
  // Poisson model, or uniform model with n points.
  Draw draw(Rng& rng, Model model, std::uint64_t n = 0) const;

 private:
  bool covers_core(const std::vector<Point>& hull_vertices) const;

  const ConvexBody* body_;
  std::vector<Point> core_;
  TriangleSampler shell_;
  TriangleSampler core_sampler_;
  TriangleSampler whole_;
};

}  // namespace rpl
