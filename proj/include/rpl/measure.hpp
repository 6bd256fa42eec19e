#pragma once

#include <vector>

#include "rpl/geometry.hpp"

namespace rpl {

// f_K(1/e, theta)^2: the squared chord of the area-1 cap. Throws
// std::domain_error unless area(K) > 1.
double mu_density(const ConvexBody& body, double theta);

// Angles in [0, 2*pi) where an endpoint of the area-r chord crosses a vertex
// of K; between consecutive ones both endpoints stay on fixed edges and the
// density is smooth. Sorted, duplicates removed.
std::vector<double> chord_kinks(const ConvexBody& body, double r = 1.0);

// Cumulative mu over one turn, integrated piece by piece between kinks.
class MeasureProfile {
 public:
  explicit MeasureProfile(const ConvexBody& body, double rel_tol = 1e-10);

  std::uint64_t body_id() const { return body_id_; }
  double total() const { return total_; }
  // mu([0, t]) for t in [0, 2*pi]; extended periodically beyond.
  double cumulative(double t) const;
  // mu([alpha, beta]); beta < alpha wraps, beta - alpha >= 2*pi gives total.
  double interval(double alpha, double beta) const;
  // Smallest t >= alpha with mu([alpha, t]) = m, for 0 <= m <= total.
  double advance(double alpha, double m) const;

  const std::vector<double>& breaks() const { return breaks_; }

 private:
  double partial(std::size_t piece, double t) const;

  ConvexBody body_;
  std::uint64_t body_id_;
  double rel_tol_;
  std::vector<double> breaks_;      // 0 = b_0 < b_1 < ... < b_m = 2*pi
  std::vector<double> cumulative_;  // cumulative_[i] = mu([0, b_i])
  double total_ = 0.0;
};

// mu([alpha, beta]) by adaptive Simpson over the kink pieces inside the
// interval. Same wrapping rule as MeasureProfile::interval.
double mu_interval(const ConvexBody& body, double alpha, double beta, double rel_tol = 1e-10);

// Area of the union of the eps-caps with angle in [alpha, beta]. The dry part
// is cut out by clipping K against the complements of caps on a uniform angle
// grid with grid_per_pi angles per pi of arc. beta == alpha gives one cap.
double wet_area(const ConvexBody& body, double eps, double alpha, double beta,
                int grid_per_pi = 4096);

// alpha_1 < ... < alpha_L with alpha_1 = start; the last interval wraps to
// start + 2*pi. Angles are not reduced mod 2*pi.
struct AngularPartition {
  std::vector<double> angles;
  std::vector<double> mu_weights;

  std::size_t size() const { return angles.size(); }
  double lower(std::size_t i) const { return angles[i]; }
  double upper(std::size_t i) const {
    return i + 1 < angles.size() ? angles[i + 1] : angles.front() + kTwoPi;
  }
};

AngularPartition partition_equal_mu(const MeasureProfile& profile, std::size_t L,
                                    double start = 0.0);
AngularPartition partition_equal_mu(const ConvexBody& body, std::size_t L, double start = 0.0);
// Partition with prescribed cut angles (sorted, within one turn of the first).
AngularPartition partition_from_angles(const MeasureProfile& profile, std::vector<double> angles);

// gamma_0 = alpha < gamma_1 < ... < gamma_L <= beta with consecutive unit caps
// overlapping in area 1/2. Throws std::domain_error when area(K) < 2 or not
// even one step fits.
std::vector<double> gamma_sequence(const ConvexBody& body, double alpha, double beta);

// alpha in [0, pi) with mu([alpha, alpha + pi]) = total / 2.
double balanced_axis(const MeasureProfile& profile);
double balanced_axis(const ConvexBody& body);

// mu of the shorter arc: mu([alpha, beta]) if beta lies within pi ahead of
// alpha, else mu([beta, alpha]).
double mu_distance(const MeasureProfile& profile, double alpha, double beta);
double mu_distance(const ConvexBody& body, double alpha, double beta);

struct DependenceBound {
  double log_value = 0.0;
  double value = 0.0;
  double error_estimate = 0.0;  // absolute, on value
};

// I(theta, psi) = integral over K of exp(-A(p, theta) - A(p, psi)) dp.
// Slices K by the theta-chords, u = A(p, theta) being the cap area at the
// slice; the inner chord average and the outer u-integral are both adaptive,
// and the result is carried in log space since far-apart angles underflow.
DependenceBound dependence_bound(const ConvexBody& body, double theta, double psi,
                                 double rel_tol = 1e-6);

}  // namespace rpl
