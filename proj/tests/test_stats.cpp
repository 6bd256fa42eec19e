#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rpl/stats.hpp"

using namespace rpl::stats;

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(40.0) == 1.0);
  CHECK(normal_cdf(-40.0) == 0.0);
  // Reference values to 12 digits.
  CHECK(std::abs(normal_cdf(1.0) - 0.841344746069) <= 1e-10);
  CHECK(std::abs(normal_cdf(-2.5) - 0.00620966532578) <= 1e-10);
  CHECK(std::abs(normal_cdf(1.96) - 0.975002104852) <= 1e-10);
}

TEST_CASE("ks statistic on a two-point law") {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? 1.0 : -1.0;
  // The sample sd is sqrt(M / (M - 1)), so the atoms sit at +-sqrt((M-1)/M).
  const double z = std::sqrt(999.0 / 1000.0);
  const KSResult r = ks_statistic(x);
  CHECK(r.D == doctest::Approx(normal_cdf(z) - 0.5).epsilon(1e-12));
  CHECK(r.D == doctest::Approx(0.3413).epsilon(1e-3));
  CHECK(r.M == 1000);
  CHECK_THROWS_AS(ks_statistic(std::vector<double>(10, 3.0)), std::invalid_argument);
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("ks statistic on normal samples") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z(3.0, 2.0);
  int over = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x(100000);
    for (double& v : x) v = z(rng);
    if (ks_statistic(x).D >= 0.006) ++over;
  }
  CHECK(over <= 1);
}

TEST_CASE("ks statistic shrinks like one over root M") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  auto median_D = [&](std::size_t m) {
    std::vector<double> d;
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> x(m);
      for (double& v : x) v = z(rng);
      d.push_back(ks_statistic(x).D);
    }
    std::nth_element(d.begin(), d.begin() + 25, d.end());
    return d[25];
  };
  const double ratio = median_D(2000) / median_D(8000);
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.5);
}

TEST_CASE("ks against a cdf and two-sample ks") {
  std::vector<double> u;
  for (int i = 0; i < 100; ++i) u.push_back((i + 0.5) / 100.0);
  CHECK(ks_against_cdf(u, [](double x) { return x; }) == doctest::Approx(0.005).epsilon(1e-9));
  std::vector<double> a = {1, 2, 3, 4}, b = {3, 4, 5, 6};
  CHECK(ks_two_sample(a, b) == doctest::Approx(0.5));
  CHECK(ks_two_sample(a, a) == 0.0);
  CHECK(ks_two_sample_critical(100, 100, 0.05) == doctest::Approx(1.3581 * std::sqrt(0.02)).epsilon(1e-3));
}

TEST_CASE("summaries agree with the streaming update") {
  std::mt19937_64 rng(9);
  std::gamma_distribution<double> g(2.0, 3.0);
  std::vector<double> x(50000);
  StreamingMoments s;
  for (double& v : x) {
    v = 1e4 + g(rng);
    s.add(v);
  }
  const MomentSummary m = summarize(x);
  CHECK(m.n == 50000);
  CHECK(m.mean == doctest::Approx(s.mean()).epsilon(1e-12));
  CHECK(m.variance == doctest::Approx(s.variance()).epsilon(1e-12));
  CHECK(m.fourth == doctest::Approx(s.fourth()).epsilon(1e-10));
  CHECK(m.mean_ci.contains(m.mean));
  CHECK(m.variance_ci.contains(m.variance));
  CHECK(m.variance >= 0.0);
  // Gamma(2, 3): variance 18, fourth central moment 3 k (k + 2) theta^4.
  CHECK(m.variance == doctest::Approx(18.0).epsilon(0.05));
  CHECK(m.fourth == doctest::Approx(3.0 * 2 * 4 * 81).epsilon(0.15));
  CHECK(m.se_mean == doctest::Approx(std::sqrt(m.variance / 50000)).epsilon(1e-9));
}

TEST_CASE("correlation, ratios and chi-square tail") {
  std::vector<double> x = {1, 2, 3, 4, 5}, y = {2, 4, 6, 8, 10}, z = {5, 4, 3, 2, 1};
  CHECK(correlation(x, y).r == doctest::Approx(1.0));
  CHECK(correlation(x, z).r == doctest::Approx(-1.0));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  std::vector<double> a(20000), b(20000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = n(rng);
    b[i] = 0.3 * a[i] + std::sqrt(1 - 0.09) * n(rng);
  }
  const Correlation c = correlation(a, b);
  CHECK(c.ci.contains(c.r));
  CHECK(std::abs(c.r - 0.3) < 0.03);
  CHECK(c.ci.half_width() == doctest::Approx(1.96 * (1 - 0.09) / std::sqrt(20000.0)).epsilon(0.05));

  const Ratio r = ratio_of(10.0, 0.1, 5.0, 0.05);
  CHECK(r.value == 2.0);
  CHECK(r.ci.contains(2.0));
  CHECK(r.ci.half_width() == doctest::Approx(1.959964 * 2.0 * std::sqrt(2.0) * 0.01).epsilon(1e-3));

  CHECK(chi_square_sf(3.841, 1.0) == doctest::Approx(0.05).epsilon(0.2));
  CHECK(chi_square_sf(30.144, 19.0) == doctest::Approx(0.05).epsilon(0.05));
  CHECK(chi_square_sf(0.0, 5.0) == doctest::Approx(1.0));
}
