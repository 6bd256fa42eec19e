#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "rpl/numeric.hpp"

namespace rpl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

// Wraps an angle into [0, 2*pi).
double normalize_angle(double theta);

inline Point direction(double theta) { return {std::cos(theta), std::sin(theta)}; }
// Unit normal pointing to the left of direction(theta).
inline Point left_normal(double theta) { return {-std::sin(theta), std::cos(theta)}; }

// Signed shoelace area; positive for counterclockwise vertex order.
double signed_area(std::span<const Point> polygon);

// Andrew's monotone chain. Returns the extreme points in counterclockwise
// order starting from the lexicographically smallest one; collinear boundary
// points are dropped. Fewer than three points come back for degenerate input.
std::vector<Point> monotone_chain_hull(std::span<const Point> points);

// The closed half-plane { p : left_normal(angle) . p <= offset }, i.e. the
// right-hand side of the line through offset * left_normal(angle) directed at
// `angle`. A cap at angle theta is K intersected with such a half-plane; it
// contains the tangent point W(theta).
struct HalfPlane {
  double angle = 0.0;
  double offset = 0.0;

  bool contains(Point p, double tol = 0.0) const {
    return dot(left_normal(angle), p) <= offset + tol;
  }
  // Closure of the complement.
  HalfPlane complement() const { return {normalize_angle(angle + kPi), -offset}; }
};

// Orientation-preserving affine map p -> M p + shift.
struct AffineMap {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;
  Point shift{};

  double determinant() const { return m11 * m22 - m12 * m21; }
  Point linear(Point p) const { return {m11 * p.x + m12 * p.y, m21 * p.x + m22 * p.y}; }
  Point operator()(Point p) const { return linear(p) + shift; }
  // Induced action on directions (angles of directed lines).
  double map_angle(double theta) const;
};

// Convex polygon with counterclockwise, strictly convex vertex list. Immutable.
class ConvexBody {
 public:
  // Throws std::invalid_argument unless the vertices form a strictly convex,
  // counterclockwise polygon of positive area.
  explicit ConvexBody(std::vector<Point> vertices);

  // Strict convex hull of an arbitrary point cloud. Throws when the hull is
  // degenerate (fewer than three extreme points).
  static ConvexBody from_points(std::span<const Point> points);

  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  double area() const { return area_; }
  double diameter() const { return diameter_; }
  Point centroid() const { return centroid_; }
  std::uint64_t id() const { return id_; }
  // Angle of the directed edge vertex(k) -> vertex(k + 1), in [0, 2*pi).
  const std::vector<double>& edge_angles() const { return edge_angles_; }

  // Index of W(theta): the vertex touched by the tangent line directed at
  // theta with the body on its left. On a tangent edge, the endpoint further
  // along direction(theta).
  std::size_t support_index(double theta) const;

  bool contains(Point p, double tol = 0.0) const;

  // Twice the signed area of the boundary chain vertex(i) -> ... ->
  // vertex(i + steps), as an exact shoelace partial sum.
  numeric::DoubleDouble chain_cross(std::size_t i, std::size_t steps) const;

  struct BoundaryHit {
    Point point;
    std::size_t edge = 0;  // the hit lies on vertex(edge) -> vertex(edge + 1)
  };
  // First point of the boundary hit by the ray from p (inside the body) along
  // direction(theta).
  BoundaryHit ray_exit(Point p, double theta) const;

 private:
  std::vector<Point> vertices_;
  std::vector<double> edge_angles_;
  std::vector<numeric::DoubleDouble> prefix_;  // prefix_[k] = chain_cross(0, k)
  std::size_t first_edge_ = 0;                 // edge with the smallest angle
  double area_ = 0.0;
  double diameter_ = 0.0;
  Point centroid_{};
  std::uint64_t id_ = 0;
};

struct Chord {
  Point cw;   // endpoint where the cap boundary leaves the chord, clockwise side
  Point ccw;  // counterclockwise side; ccw - cw points along the cap angle
  double length() const { return norm(ccw - cw); }
};

struct Cap {
  HalfPlane halfplane;
  Chord chord;
  double area = 0.0;
  std::uint64_t body_id = 0;
};

// All caps of one body at a fixed angle, parametrized by depth: the distance
// of the cutting line from the tangent line through W(theta). Depth 0 gives
// the empty cap, depth width() the whole body. Area evaluation is O(log n).
class CapSlicer {
 public:
  CapSlicer(const ConvexBody& body, double theta);

  double theta() const { return theta_; }
  double width() const { return width_; }
  Point normal() const { return normal_; }
  Point support_point() const { return body_->vertex(lo_); }
  double depth_of(Point p) const { return dot(normal_, p - body_->vertex(lo_)); }

  double area_at(double depth) const;
  Chord chord_at(double depth) const;
  std::vector<Point> polygon_at(double depth) const;
  HalfPlane halfplane_at(double depth) const;
  Cap cap_at(double depth) const;

  // Depth of the cap of the given area; 0 <= area <= area(K).
  double depth_for_area(double area) const;

 private:
  struct Cut {
    std::size_t cw_last = 0;   // steps along the clockwise chain still inside
    std::size_t ccw_last = 0;  // steps along the counterclockwise chain still inside
    Chord chord;
  };
  Cut cut_at(double depth) const;
  double area_of(const Cut& cut) const;
  std::size_t ccw_index(std::size_t steps) const;
  std::size_t cw_index(std::size_t steps) const;
  double depth_of_index(std::size_t i) const;

  const ConvexBody* body_;
  double theta_;
  Point normal_;
  std::size_t lo_ = 0;
  std::size_t ccw_len_ = 0;
  std::size_t cw_len_ = 0;
  double width_ = 0.0;
};

// K intersected with H; std::nullopt when the intersection has no interior.
std::optional<ConvexBody> clip(const ConvexBody& body, const HalfPlane& h);
// Sutherland-Hodgman step on a raw convex polygon; may return fewer than 3 points.
std::vector<Point> clip_polygon(std::span<const Point> polygon, const HalfPlane& h);

Point support_vertex(const ConvexBody& body, double theta);

// C_K(p, theta); area is A_K(p, theta). Throws when p lies outside K.
Cap cap_by_point(const ConvexBody& body, Point p, double theta);
// C_K(r, theta) for 0 < r <= area(K).
Cap cap_by_area(const ConvexBody& body, double r, double theta);
std::vector<Point> cap_polygon(const ConvexBody& body, const Cap& cap);

// f_K(x, theta): chord length of the cap of area log(1/x); 0 for
// x <= exp(-area(K)) and for x = 1.
double chord_length_f(const ConvexBody& body, double x, double theta);

double cap_intersection_area(const ConvexBody& body, const Cap& c1, const Cap& c2);

// g(K) for an area-preserving g; throws unless |det - 1| <= 1e-12.
ConvexBody apply_affine(const ConvexBody& body, const AffineMap& g);

}  // namespace rpl
