#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace rpl::numeric {

// Unevaluated sum hi + lo carrying roughly twice double precision. Used for
// shoelace sums where caps of area ~1 are cut from bodies of area ~1e6.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  double value() const { return hi + lo; }
};

DoubleDouble two_sum(double a, double b);
DoubleDouble two_product(double a, double b);
DoubleDouble operator+(DoubleDouble a, DoubleDouble b);
DoubleDouble operator-(DoubleDouble a, DoubleDouble b);
DoubleDouble operator-(DoubleDouble a);

// a.x * b.y - a.y * b.x with both products kept exactly.
DoubleDouble exact_cross(double ax, double ay, double bx, double by);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

// Adaptive Simpson with an explicit interval stack. The panel [a, b] is
// accepted when |S(left) + S(right) - S(whole)| <= 15 * tol (Richardson
// criterion) and the corrected value is accumulated.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth = 48);

// Bisection for a continuous f with f(lo) and f(hi) of opposite sign (or
// zero). Stops when the bracket is narrower than x_tol or cannot shrink.
double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol,
              int max_iterations = 200);

// Golden-section search for the maximum of a unimodal function on [lo, hi].
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double x_tol, int max_iterations = 200);

// Least-squares slope and intercept of y against x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit fit_line(const double* x, const double* y, std::size_t n);

// SplitMix64 finalizer (Steele, Lea, Flood 2014). A bijection on 64-bit words
// used to derive independent generator seeds from small integers.
std::uint64_t splitmix64(std::uint64_t x);
// Seed of the stream for (master, index): two rounds of splitmix64 so that
// nearby masters and nearby indices give unrelated streams.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

}  // namespace rpl::numeric
