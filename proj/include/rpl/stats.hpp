#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rpl::stats {

inline constexpr double kZ95 = 1.959963984540054;

// Standard normal CDF, 0.5 * erfc(-x / sqrt(2)) via the C library erfc
// (absolute error well below 1e-15 on glibc).
double normal_cdf(double x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  double half_width() const { return 0.5 * (hi - lo); }
};

struct KSResult {
  double D = 0.0;
  std::size_t M = 0;
  double mean = 0.0;  // standardization used
  double sd = 0.0;
};

// Lilliefors form: standardize by the sample mean and sd, then take the sup
// distance of the empirical CDF to Phi. Throws std::invalid_argument for
// M < 2 or zero variance.
KSResult ks_statistic(std::span<const double> samples);

// Sup distance between the empirical CDF and a continuous CDF.
double ks_against_cdf(std::span<const double> samples, const std::function<double(double)>& cdf);
// Same, with the model CDF already evaluated at the sorted samples.
double ks_sorted(std::span<const double> sorted, std::span<const double> cdf_at_sorted);

double ks_two_sample(std::span<const double> a, std::span<const double> b);
// Asymptotic critical value c(alpha) * sqrt((n + m) / (n m)); alpha = 0.05
// or 0.01.
double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha = 0.05);

struct MomentSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double third_abs = 0.0;  // E|X - mean|^3
  double fourth = 0.0;     // E (X - mean)^4
  double se_mean = 0.0;
  double se_variance = 0.0;  // delta method from the fourth moment
  Interval mean_ci;
  Interval variance_ci;
};

// Two-pass moments; requires n >= 2.
MomentSummary summarize(std::span<const double> x);

// Single-pass update of mean and central moments (Pebay 2008).
class StreamingMoments {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double fourth() const { return n_ > 0 ? m4_ / static_cast<double>(n_) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0, m3_ = 0.0, m4_ = 0.0;
};

struct Correlation {
  double r = 0.0;
  Interval ci;  // Fisher z
};
Correlation correlation(std::span<const double> x, std::span<const double> y);

// Ratio of two independent means with a delta-method CI.
struct Ratio {
  double value = 0.0;
  Interval ci;
};
Ratio ratio_of(double num, double se_num, double den, double se_den);

// Wilson-Hilferty normal approximation to the chi-square upper tail.
double chi_square_sf(double x, double dof);

}  // namespace rpl::stats
