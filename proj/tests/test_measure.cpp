#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rpl/body_spec.hpp"
#include "rpl/measure.hpp"

using namespace rpl;

TEST_CASE("mu density examples") {
  for (double s : {2.0, 10.0, 40.0}) {
    const ConvexBody sq = make_body("square:side=" + std::to_string(s));
    CHECK(mu_density(sq, 0.0) == doctest::Approx(s * s).epsilon(1e-12));
    CHECK(mu_density(sq, kPi / 4) == doctest::Approx(4.0).epsilon(1e-12));
  }
  const ConvexBody disk = make_body("disk:area=1600");
  const double d0 = mu_density(disk, 0.0);
  for (double t = 0.1; t < kTwoPi; t += 0.37) {
    CHECK(mu_density(disk, t) == doctest::Approx(d0).epsilon(1e-4));
  }
  CHECK_THROWS(mu_density(make_body("square:side=1"), 0.0));
}

TEST_CASE("mu density matches an independent chord computation") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int t = 0; t < 100; ++t) {
    const ConvexBody k = make_body("random:k=" + std::to_string(3 + t % 25) + ",seed=" +
                                   std::to_string(t) + ",area=150");
    const double theta = u(rng);
    const double c = oracle::chord_for_area(k.vertices(), theta, 1.0);
    CHECK(mu_density(k, theta) == doctest::Approx(c * c).epsilon(1e-7));
  }
}

TEST_CASE("mu interval") {
  const ConvexBody disk = make_body("disk:area=1600");
  const double d = mu_density(disk, 0.0);
  CHECK(mu_interval(disk, 0.2, 1.4) == doctest::Approx(1.2 * d).epsilon(1e-4));
  CHECK(mu_interval(disk, 0.7, 0.7) == 0.0);

  // Corner triangles of a square of side 10: the area-1 cap at angle theta is
  // a corner triangle while both legs are at most 10, i.e. tan(theta) in
  // [0.02, 50], where the density is 4 / sin(2 theta).
  const ConvexBody sq = make_body("square:side=10");
  const double a = std::atan(0.02) + 0.01, b = std::atan(50.0) - 0.01;
  const double exact = 2.0 * std::log(std::tan(b) / std::tan(a));
  CHECK(mu_interval(sq, a, b) == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("mu interval against a fine midpoint sum of oracle chords") {
  const ConvexBody k = make_body("random:k=7,seed=3,area=90");
  const int n = 20000;
  const double alpha = 0.5, beta = 3.0;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = alpha + (beta - alpha) * (i + 0.5) / n;
    const double c = oracle::chord_for_area(k.vertices(), t, 1.0);
    s += c * c;
  }
  s *= (beta - alpha) / n;
  CHECK(mu_interval(k, alpha, beta) == doctest::Approx(s).epsilon(1e-6));
}

TEST_CASE("mu additivity and wrapping") {
  const ConvexBody k = make_body("random:k=30,seed=12,area=700");
  const MeasureProfile p(k);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int t = 0; t < 50; ++t) {
    double x[3] = {u(rng), u(rng), u(rng)};
    std::sort(x, x + 3);
    const double whole = p.interval(x[0], x[2]);
    CHECK(p.interval(x[0], x[1]) + p.interval(x[1], x[2]) == doctest::Approx(whole).epsilon(1e-8));
    CHECK(mu_interval(k, x[0], x[2]) == doctest::Approx(whole).epsilon(1e-8));
  }
  CHECK(p.interval(5.0, 5.0 + kTwoPi) == doctest::Approx(p.total()).epsilon(1e-12));
  CHECK(p.interval(5.0, 7.0) == doctest::Approx(p.interval(5.0, kTwoPi) + p.interval(0.0, 7.0 - kTwoPi)).epsilon(1e-8));
}

TEST_CASE("affine invariance of mu") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ConvexBody k = make_body("random:k=10,seed=5,area=400");
  for (int t = 0; t < 10; ++t) {
    const double a = kTwoPi * u(rng), b = kTwoPi * u(rng), s = 0.5 + 1.5 * u(rng);
    AffineMap g;
    g.m11 = std::cos(a) * s * std::cos(b) - std::sin(a) / s * std::sin(b);
    g.m12 = -std::cos(a) * s * std::sin(b) - std::sin(a) / s * std::cos(b);
    g.m21 = std::sin(a) * s * std::cos(b) + std::cos(a) / s * std::sin(b);
    g.m22 = -std::sin(a) * s * std::sin(b) + std::cos(a) / s * std::cos(b);
    const ConvexBody gk = apply_affine(k, g);
    const double alpha = kTwoPi * u(rng), beta = alpha + 3.0 * u(rng);
    double ga = g.map_angle(alpha), gb = g.map_angle(beta);
    while (gb < ga) gb += kTwoPi;
    CHECK(mu_interval(gk, ga, gb) == doctest::Approx(mu_interval(k, alpha, beta)).epsilon(1e-6));
  }
}

TEST_CASE("equal-mu partitions") {
  const ConvexBody disk = make_body("disk:area=1600");
  const AngularPartition p8 = partition_equal_mu(disk, 8);
  REQUIRE(p8.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(p8.angles[i] == doctest::Approx(kPi / 4 * i).epsilon(1e-4));
  }
  const ConvexBody sq = make_body("square:side=30");
  const MeasureProfile prof(sq);
  const AngularPartition p16 = partition_equal_mu(prof, 16, 0.3);
  double sum = 0.0;
  for (double w : p16.mu_weights) {
    CHECK(w == doctest::Approx(prof.total() / 16).epsilon(1e-6));
    sum += w;
  }
  CHECK(sum == doctest::Approx(prof.total()).epsilon(1e-8));
  const AngularPartition p1 = partition_equal_mu(prof, 1);
  CHECK(p1.mu_weights[0] == doctest::Approx(prof.total()).epsilon(1e-12));
}

TEST_CASE("gamma sequence") {
  const ConvexBody disk = make_body("disk:area=1600");
  const std::vector<double> g = gamma_sequence(disk, 0.0, kPi);
  REQUIRE(g.size() > 3);
  const double step = g[1] - g[0];
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] > g[i - 1]);
    CHECK(g[i] - g[i - 1] == doctest::Approx(step).epsilon(1e-3));
    const Cap a = cap_by_area(disk, 1.0, g[i - 1]), b = cap_by_area(disk, 1.0, g[i]);
    CHECK(std::abs(cap_intersection_area(disk, a, b) - 0.5) <= 1e-9);
  }
  CHECK(g.back() <= kPi);

  const ConvexBody k = make_body("random:k=9,seed=2,area=500");
  const std::vector<double> h = gamma_sequence(k, 1.0, 4.0);
  for (std::size_t i = 1; i < h.size(); ++i) {
    const Cap a = cap_by_area(k, 1.0, h[i - 1]), b = cap_by_area(k, 1.0, h[i]);
    CHECK(std::abs(cap_intersection_area(k, a, b) - 0.5) <= 1e-9);
  }
  CHECK_THROWS(gamma_sequence(make_body("square:area=1.5"), 0.0, 1.0));
  CHECK_THROWS(gamma_sequence(disk, 0.0, 1e-6));
}

TEST_CASE("balanced axis") {
  CHECK(balanced_axis(make_body("disk:area=1600")) == 0.0);
  for (const char* s : {"triangle:ax=0,ay=0,bx=7,by=1,cx=2,cy=5,area=300", "random:k=8,seed=4,area=250",
                        "square:side=20"}) {
    const MeasureProfile p(make_body(s));
    const double a = balanced_axis(p);
    CHECK(std::abs(p.interval(a, a + kPi) - 0.5 * p.total()) <= 1e-8 * p.total());
  }
}

TEST_CASE("mu distance") {
  const ConvexBody disk = make_body("disk:area=1600");
  const MeasureProfile p(disk);
  const double d = mu_density(disk, 0.0);
  CHECK(mu_distance(p, 1.0, 1.0) == 0.0);
  CHECK(mu_distance(p, 0.0, 2.0) == doctest::Approx(2.0 * d).epsilon(1e-4));
  CHECK(mu_distance(p, 0.0, 5.0) == doctest::Approx((kTwoPi - 5.0) * d).epsilon(1e-4));
  const MeasureProfile q(make_body("random:k=6,seed=1,area=80"));
  CHECK(mu_distance(q, 0.4, 2.9) == doctest::Approx(mu_distance(q, 2.9, 0.4)).epsilon(1e-12));
  CHECK(mu_distance(q, 0.4, 4.0) == doctest::Approx(mu_distance(q, 4.0, 0.4)).epsilon(1e-12));
}

TEST_CASE("wet area") {
  const ConvexBody k = make_body("random:k=12,seed=3,area=400");
  CHECK(wet_area(k, 2.0, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-10));
  const double mu = mu_interval(k, 0.2, 1.5);
  CHECK(wet_area(k, 1.0, 0.2, 1.5) == doctest::Approx(1.0 + mu / 8.0).epsilon(1e-3));

  // Union of unit caps over all angles of a disk is the annulus outside the
  // circle of radius R - h, h the height of the unit segment.
  const double area = 1600.0;
  const ConvexBody disk = make_body("disk:area=1600");
  const double R = std::sqrt(area / kPi);
  double lo = 0.0, hi = R;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (oracle::segment_area(R, m) < 1.0 ? lo : hi) = m;
  }
  const double annulus = area - kPi * (R - lo) * (R - lo);
  CHECK(wet_area(disk, 1.0, 0.0, kTwoPi) == doctest::Approx(annulus).epsilon(1e-3));
  CHECK_THROWS(wet_area(k, 250.0, 0.0, 1.0));
}

TEST_CASE("dependence bound") {
  const ConvexBody k = make_body("random:k=10,seed=7,area=60");
  const DependenceBound same = dependence_bound(k, 0.8, 0.8);
  CHECK(same.value == doctest::Approx(0.5 * (1.0 - std::exp(-120.0))).epsilon(1e-5));

  const DependenceBound ab = dependence_bound(k, 0.3, 2.0), ba = dependence_bound(k, 2.0, 0.3);
  CHECK(ab.value == doctest::Approx(ba.value).epsilon(1e-5));

  const ConvexBody sq = make_body("square:side=10");
  const double grid = oracle::dependence_grid(sq.vertices(), 0.2, 1.0, 400);
  CHECK(dependence_bound(sq, 0.2, 1.0).value == doctest::Approx(grid).epsilon(2e-3));

  // Monte-Carlo cross-check on a small random body.
  std::mt19937_64 rng(9);
  const ConvexBody r = make_body("random:k=6,seed=4,area=30");
  Point blo, bhi;
  oracle::bounds(r.vertices(), blo, bhi);
  std::uniform_real_distribution<double> ux(blo.x, bhi.x), uy(blo.y, bhi.y);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point p{ux(rng), uy(rng)};
    double v = 0.0;
    if (oracle::inside(r.vertices(), p)) {
      v = std::exp(-oracle::cap_area_through(r.vertices(), p, 0.5) -
                   oracle::cap_area_through(r.vertices(), p, 1.7));
    }
    s += v;
    s2 += v * v;
  }
  const double box = (bhi.x - blo.x) * (bhi.y - blo.y);
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(dependence_bound(r, 0.5, 1.7).value - box * mean) <= 3.0 * box * se);

  // Decreasing as psi moves away along the short side.
  const ConvexBody big = make_body("random:k=15,seed=8,area=300");
  const MeasureProfile bp(big);
  double prev = INFINITY;
  for (double d = 0.0; bp.interval(1.0, 1.0 + d) <= 0.5 * bp.total(); d += kPi / 12) {
    const double v = dependence_bound(big, 1.0, 1.0 + d).log_value;
    CHECK(v < prev);
    prev = v;
  }
}
