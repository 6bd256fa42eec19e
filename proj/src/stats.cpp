#include "rpl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rpl::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

KSResult ks_statistic(std::span<const double> samples) {
  const std::size_t m = samples.size();
  if (m < 2) throw std::invalid_argument("ks_statistic: need at least two samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  if (!(sd > 0.0)) throw std::invalid_argument("ks_statistic: zero variance");
  std::vector<double> z(samples.begin(), samples.end());
  std::sort(z.begin(), z.end());
  std::vector<double> phi(m);
  for (std::size_t i = 0; i < m; ++i) phi[i] = normal_cdf((z[i] - mean) / sd);
  return {ks_sorted(z, phi), m, mean, sd};
}

double ks_sorted(std::span<const double> sorted, std::span<const double> cdf) {
  const std::size_t m = sorted.size();
  const double dm = static_cast<double>(m);
  double d = 0.0;
  // Ties: the empirical CDF jumps once per distinct value.
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m && sorted[j + 1] == sorted[i]) ++j;
    const double below = static_cast<double>(i) / dm;
    const double upto = static_cast<double>(j + 1) / dm;
    d = std::max({d, std::abs(upto - cdf[i]), std::abs(cdf[i] - below)});
    i = j + 1;
  }
  return std::min(d, 1.0);
}

double ks_against_cdf(std::span<const double> samples, const std::function<double(double)>& cdf) {
  std::vector<double> z(samples.begin(), samples.end());
  std::sort(z.begin(), z.end());
  std::vector<double> f(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) f[i] = cdf(z[i]);
  return ks_sorted(z, f);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return d;
}

double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

MomentSummary summarize(std::span<const double> x) {
  MomentSummary s;
  s.n = x.size();
  if (s.n < 2) throw std::invalid_argument("summarize: need at least two values");
  const double n = static_cast<double>(s.n);
  for (double v : x) s.mean += v;
  s.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += std::abs(d) * d * d;
    m4 += d * d * d * d;
  }
  s.variance = m2 / (n - 1.0);
  s.third_abs = m3 / n;
  s.fourth = m4 / n;
  s.se_mean = std::sqrt(s.variance / n);
  const double sigma4 = (m2 / n) * (m2 / n);
  s.se_variance = std::sqrt(std::max(0.0, (s.fourth - (n - 3.0) / (n - 1.0) * sigma4) / n));
  s.mean_ci = {s.mean - kZ95 * s.se_mean, s.mean + kZ95 * s.se_mean};
  s.variance_ci = {std::max(0.0, s.variance - kZ95 * s.se_variance), s.variance + kZ95 * s.se_variance};
  return s;
}

void StreamingMoments::add(double x) {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double dn = delta / n;
  const double dn2 = dn * dn;
  const double term = delta * dn * n1;
  mean_ += dn;
  m4_ += term * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2_ - 4.0 * dn * m3_;
  m3_ += term * dn * (n - 2.0) - 3.0 * dn * m2_;
  m2_ += term;
}

Correlation correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 4) {
    throw std::invalid_argument("correlation: need two samples of equal size >= 4");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Correlation c;
  if (!(sxx > 0.0) || !(syy > 0.0)) throw std::invalid_argument("correlation: zero variance");
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::abs(c.r) >= 1.0) {
    c.ci = {c.r, c.r};
    return c;
  }
  const double z = std::atanh(c.r);
  const double se = 1.0 / std::sqrt(n - 3.0);
  c.ci = {std::tanh(z - kZ95 * se), std::tanh(z + kZ95 * se)};
  return c;
}

Ratio ratio_of(double num, double se_num, double den, double se_den) {
  Ratio r;
  r.value = num / den;
  const double rel = std::sqrt((se_num / num) * (se_num / num) + (se_den / den) * (se_den / den));
  const double se = std::abs(r.value) * rel;
  r.ci = {r.value - kZ95 * se, r.value + kZ95 * se};
  return r;
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  const double a = 2.0 / (9.0 * dof);
  const double z = (std::cbrt(x / dof) - (1.0 - a)) / std::sqrt(a);
  return 1.0 - normal_cdf(z);
}

}  // namespace rpl::stats
