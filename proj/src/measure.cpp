#include "rpl/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rpl/numeric.hpp"

namespace rpl {

namespace {

void require_unit_caps(const ConvexBody& body) {
  if (!(body.area() > 1.0)) {
    throw std::domain_error("mu density needs area(K) > 1");
  }
}

double density_at(const ConvexBody& body, double theta) {
  const CapSlicer slicer(body, theta);
  const double c = slicer.chord_at(slicer.depth_for_area(1.0)).length();
  return c * c;
}

// Angles at which the clockwise chord endpoint of the area-r cap sits on a
// vertex. With the endpoint at v_k the cap is the fan v_k, v_k+1, ..., v_m, Q
// with Q on the edge (v_m, v_m+1); m is nondecreasing in k.
std::vector<double> cw_vertex_kinks(const ConvexBody& body, double r) {
  const std::size_t n = body.size();
  std::vector<double> out;
  out.reserve(n);
  auto fan = [&](std::size_t k, std::size_t steps) {
    return 0.5 * (body.chain_cross(k, steps) +
                  numeric::exact_cross(body.vertex(k + steps).x, body.vertex(k + steps).y,
                                       body.vertex(k).x, body.vertex(k).y))
                     .value();
  };
  std::size_t m = 1;  // absolute index, m - k = steps
  for (std::size_t k = 0; k < n; ++k) {
    if (m < k + 1) m = k + 1;
    while (m + 1 < k + n && fan(k, m + 1 - k) <= r) ++m;
    const Point vk = body.vertex(k);
    const Point vm = body.vertex(m);
    const Point vm1 = body.vertex(m + 1);
    const double base = fan(k, m - k);
    const double tri = 0.5 * cross(vm - vk, vm1 - vk);
    const double t = tri > 0.0 ? std::clamp((r - base) / tri, 0.0, 1.0) : 0.0;
    const Point q = vm + t * (vm1 - vm);
    const Point d = q - vk;
    out.push_back(normalize_angle(std::atan2(d.y, d.x)));
  }
  return out;
}

// Breakpoints of [a, b] (b - a <= 2*pi) at the kinks falling inside.
std::vector<double> breaks_in(const std::vector<double>& kinks, double a, double b) {
  std::vector<double> out{a};
  if (!kinks.empty()) {
    const double turns = std::floor(a / kTwoPi);
    for (int w = 0; w < 2; ++w) {
      const double shift = (turns + w) * kTwoPi;
      for (double k : kinks) {
        const double t = k + shift;
        if (t > a && t < b) out.push_back(t);
      }
    }
  }
  out.push_back(b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double integrate_piece(const ConvexBody& body, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  auto f = [&body](double t) { return density_at(body, t); };
  const double m = 0.5 * (a + b);
  const double rough = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
  const double tol = rel_tol * std::abs(rough) + 1e-300;
  return numeric::adaptive_simpson(f, a, b, tol, 30).value;
}

}  // namespace

double mu_density(const ConvexBody& body, double theta) {
  require_unit_caps(body);
  return density_at(body, theta);
}

std::vector<double> chord_kinks(const ConvexBody& body, double r) {
  if (!(r > 0.0 && r < body.area())) throw std::domain_error("chord_kinks: r out of range");
  std::vector<double> kinks = cw_vertex_kinks(body, r);
  // Counterclockwise endpoints: mirror x -> -x, which maps chord angle phi of
  // the mirrored cw endpoint to -phi.
  std::vector<Point> mirrored(body.vertices().rbegin(), body.vertices().rend());
  for (Point& p : mirrored) p.x = -p.x;
  for (double phi : cw_vertex_kinks(ConvexBody(std::move(mirrored)), r)) {
    kinks.push_back(normalize_angle(-phi));
  }
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());
  return kinks;
}

MeasureProfile::MeasureProfile(const ConvexBody& body, double rel_tol)
    : body_(body), body_id_(body.id()), rel_tol_(rel_tol) {
  require_unit_caps(body);
  breaks_ = breaks_in(chord_kinks(body, 1.0), 0.0, kTwoPi);
  cumulative_.assign(breaks_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    cumulative_[i + 1] = cumulative_[i] + integrate_piece(body, breaks_[i], breaks_[i + 1], rel_tol);
  }
  total_ = cumulative_.back();
}

double MeasureProfile::partial(std::size_t piece, double t) const {
  return integrate_piece(body_, breaks_[piece], t, rel_tol_);
}

double MeasureProfile::cumulative(double t) const {
  const double turns = std::floor(t / kTwoPi);
  double r = t - turns * kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  if (r < 0.0) r = 0.0;
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
  const std::size_t piece = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  return turns * total_ + cumulative_[piece] + partial(piece, r);
}

double MeasureProfile::interval(double alpha, double beta) const {
  if (beta < alpha) beta += kTwoPi * std::ceil((alpha - beta) / kTwoPi);
  if (beta - alpha >= kTwoPi) return total_;
  return std::max(0.0, cumulative(beta) - cumulative(alpha));
}

double MeasureProfile::advance(double alpha, double m) const {
  if (m <= 0.0) return alpha;
  if (m >= total_) return alpha + kTwoPi;
  const double target = cumulative(alpha) + m;
  const double turns = std::floor(target / total_);
  const double rest = target - turns * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), rest);
  std::size_t piece = static_cast<std::size_t>(it - cumulative_.begin());
  piece = std::clamp<std::size_t>(piece, 1, breaks_.size() - 1) - 1;
  const double need = rest - cumulative_[piece];
  const double t = numeric::bisect([&](double x) { return partial(piece, x) - need; },
                                   breaks_[piece], breaks_[piece + 1], 1e-15, 80);
  double out = turns * kTwoPi + t;
  while (out < alpha) out += kTwoPi;
  return out;
}

double mu_interval(const ConvexBody& body, double alpha, double beta, double rel_tol) {
  require_unit_caps(body);
  if (beta < alpha) beta += kTwoPi * std::ceil((alpha - beta) / kTwoPi);
  if (beta - alpha > kTwoPi) beta = alpha + kTwoPi;
  if (beta == alpha) return 0.0;
  const std::vector<double> b = breaks_in(chord_kinks(body, 1.0), alpha, beta);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) sum += integrate_piece(body, b[i], b[i + 1], rel_tol);
  return sum;
}

double wet_area(const ConvexBody& body, double eps, double alpha, double beta, int grid_per_pi) {
  if (!(eps > 0.0 && eps < 0.5 * body.area())) {
    throw std::domain_error("wet_area: eps must lie in (0, area(K)/2)");
  }
  if (grid_per_pi < 1) throw std::invalid_argument("wet_area: grid_per_pi must be positive");
  if (beta < alpha) beta += kTwoPi * std::ceil((alpha - beta) / kTwoPi);
  const double span = std::min(beta - alpha, kTwoPi);
  const bool full = span >= kTwoPi;
  const std::size_t steps =
      span > 0.0 ? static_cast<std::size_t>(std::ceil(span / kPi * grid_per_pi)) : 0;
  std::vector<Point> dry = body.vertices();
  const std::size_t count = full ? steps : steps + 1;
  for (std::size_t i = 0; i < count && dry.size() >= 3; ++i) {
    const double gamma = steps == 0 ? alpha : alpha + span * static_cast<double>(i) / steps;
    const Cap cap = cap_by_area(body, eps, gamma);
    dry = clip_polygon(dry, cap.halfplane.complement());
  }
  const double dry_area = dry.size() >= 3 ? std::max(0.0, signed_area(dry)) : 0.0;
  return body.area() - dry_area;
}

AngularPartition partition_equal_mu(const MeasureProfile& profile, std::size_t L, double start) {
  if (L < 1) throw std::invalid_argument("partition_equal_mu: L must be >= 1");
  AngularPartition part;
  part.angles.push_back(start);
  for (std::size_t i = 1; i < L; ++i) {
    part.angles.push_back(
        profile.advance(start, profile.total() * static_cast<double>(i) / static_cast<double>(L)));
  }
  for (std::size_t i = 0; i < L; ++i) {
    part.mu_weights.push_back(L == 1 ? profile.total()
                                     : profile.interval(part.lower(i), part.upper(i)));
  }
  return part;
}

AngularPartition partition_equal_mu(const ConvexBody& body, std::size_t L, double start) {
  const MeasureProfile profile(body);
  return partition_equal_mu(profile, L, start);
}

AngularPartition partition_from_angles(const MeasureProfile& profile, std::vector<double> angles) {
  if (angles.empty()) throw std::invalid_argument("partition_from_angles: no angles");
  for (std::size_t i = 1; i < angles.size(); ++i) {
    if (!(angles[i] > angles[i - 1]) || angles[i] >= angles[0] + kTwoPi) {
      throw std::invalid_argument("partition_from_angles: angles must increase within one turn");
    }
  }
  AngularPartition part;
  part.angles = std::move(angles);
  for (std::size_t i = 0; i < part.size(); ++i) {
    part.mu_weights.push_back(part.size() == 1 ? profile.total()
                                               : profile.interval(part.lower(i), part.upper(i)));
  }
  return part;
}

std::vector<double> gamma_sequence(const ConvexBody& body, double alpha, double beta) {
  if (body.area() < 2.0) throw std::domain_error("gamma_sequence: needs area(K) >= 2");
  if (beta < alpha) beta += kTwoPi * std::ceil((alpha - beta) / kTwoPi);
  std::vector<double> gammas{alpha};
  Cap prev = cap_by_area(body, 1.0, alpha);
  auto excess = [&](double g) {
    return cap_intersection_area(body, prev, cap_by_area(body, 1.0, g)) - 0.5;
  };
  while (true) {
    const double g0 = gammas.back();
    if (!(beta > g0) || excess(beta) > 0.0) break;
    // Expand until the overlap drops below 1/2, then bisect; the overlap is
    // strictly decreasing until it vanishes.
    double lo = g0, hi = g0;
    double step = 1e-4;
    while (true) {
      hi = std::min(g0 + step, beta);
      if (excess(hi) <= 0.0) break;
      lo = hi;
      step *= 2.0;
    }
    const double g = numeric::bisect(excess, lo, hi, 1e-15, 200);
    gammas.push_back(g);
    prev = cap_by_area(body, 1.0, g);
  }
  if (gammas.size() < 2) throw std::domain_error("gamma_sequence: no step fits in the interval");
  return gammas;
}

double balanced_axis(const MeasureProfile& profile) {
  const double total = profile.total();
  auto g = [&](double a) { return profile.interval(a, a + kPi) - 0.5 * total; };
  if (std::abs(g(0.0)) <= 1e-8 * total) return 0.0;
  // g(pi) = -g(0), so a sign change is bracketed.
  return numeric::bisect(g, 0.0, kPi, 1e-14, 200);
}

double balanced_axis(const ConvexBody& body) { return balanced_axis(MeasureProfile(body)); }

double mu_distance(const MeasureProfile& profile, double alpha, double beta) {
  const double d = normalize_angle(beta - alpha);
  if (d <= kPi) return profile.interval(alpha, alpha + d);
  return profile.interval(beta, beta + (kTwoPi - d));
}

double mu_distance(const ConvexBody& body, double alpha, double beta) {
  const double d = normalize_angle(beta - alpha);
  if (d <= kPi) return mu_interval(body, alpha, alpha + d);
  return mu_interval(body, beta, beta + (kTwoPi - d));
}

DependenceBound dependence_bound(const ConvexBody& body, double theta, double psi,
                                 double rel_tol) {
  const CapSlicer along(body, theta);
  const CapSlicer other(body, psi);
  const double area = body.area();

  // log of the chord average of exp(-A(p, psi)) times exp(-u), at slice u.
  auto log_slice_tol = [&](double u, double inner_tol) {
    const Chord chord = along.chord_at(along.depth_for_area(u));
    auto a_psi = [&](double s) {
      const Point p = chord.cw + s * (chord.ccw - chord.cw);
      return other.area_at(std::clamp(other.depth_of(p), 0.0, other.width()));
    };
    const double a0 = a_psi(0.0);
    const double a1 = a_psi(1.0);
    const double m = std::min(a0, a1);
    double mean = 1.0;
    if (std::abs(a1 - a0) > 1e-14 * area) {
      mean = numeric::adaptive_simpson([&](double s) { return std::exp(m - a_psi(s)); }, 0.0, 1.0,
                                       inner_tol, 40)
                 .value;
    }
    return -u - m + std::log(std::max(mean, std::numeric_limits<double>::min()));
  };
  auto coarse_slice = [&](double u) { return log_slice_tol(u, 1e-5); };
  auto log_slice = [&](double u) { return log_slice_tol(u, 1e-2 * rel_tol); };

  // Locate the peak of the slice profile.
  const int scan = 128;
  std::vector<double> us;
  for (int j = 0; j <= scan; ++j) us.push_back(area * j / scan);
  for (double x = 1e-6; x < area / scan; x *= 2.0) {
    us.push_back(x);
    us.push_back(area - x);
  }
  std::sort(us.begin(), us.end());
  double best_u = 0.0, best = -std::numeric_limits<double>::infinity();
  std::size_t best_j = 0;
  for (std::size_t j = 0; j < us.size(); ++j) {
    const double v = coarse_slice(us[j]);
    if (v > best) {
      best = v;
      best_u = us[j];
      best_j = j;
    }
  }
  const double lo = us[best_j == 0 ? 0 : best_j - 1];
  const double hi = us[std::min(best_j + 1, us.size() - 1)];
  if (hi > lo) {
    best_u = numeric::golden_section_max(coarse_slice, lo, hi, 1e-6 * (hi - lo) + 1e-12);
  }
  best = std::max(log_slice(best_u), log_slice(us[best_j]));

  // Integrate exp(L - Lmax) with breakpoints doubling away from the peak.
  std::vector<double> cuts{0.0, area, best_u};
  for (double w = 0.25; w < area; w *= 2.0) {
    if (best_u - w > 0.0) cuts.push_back(best_u - w);
    if (best_u + w < area) cuts.push_back(best_u + w);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto normalized = [&](double u) { return std::exp(log_slice(u) - best); };
  auto integrate = [&](double tol) {
    numeric::QuadratureResult sum;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const auto q = numeric::adaptive_simpson(normalized, cuts[i], cuts[i + 1], tol, 40);
      sum.value += q.value;
      sum.error_estimate += q.error_estimate;
    }
    return sum;
  };
  const double rough = integrate(1e-3).value;
  const numeric::QuadratureResult fine = integrate(rel_tol * rough / cuts.size());

  DependenceBound out;
  out.log_value = best + std::log(fine.value);
  out.value = std::exp(out.log_value);
  out.error_estimate = out.value * (fine.error_estimate / fine.value + rel_tol);
  return out;
}

}  // namespace rpl
