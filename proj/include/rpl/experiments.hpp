#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpl/body_spec.hpp"
#include "rpl/measure.hpp"
#include "rpl/process.hpp"
#include "rpl/report.hpp"
#include "rpl/stats.hpp"

namespace rpl {

struct TrialConfig {
  std::string body;  // body spec string
  Model model = Model::poisson;
  std::uint64_t n = 0;  // uniform model size; 0 means round(area)
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t L = 0;  // equal-mu sectors recorded per trial; 0 for none
  std::optional<double> w_theta;  // record the offset of W(theta)
  unsigned threads = 0;           // 0: hardware concurrency
  bool shell = true;              // use ShellSampler
};

struct SectorRow {
  std::vector<std::int64_t> N;
  std::vector<double> A;
};

struct TrialRow {
  std::uint64_t count = 0;
  std::int64_t N = 0;
  double A = 0.0;
  bool degenerate = false;
  bool core_sampled = false;
  std::vector<SectorRow> sectors;  // one entry per partition
  double w_offset = 0.0;           // depth of W(theta) below its tangent line
};

struct TrialSet {
  TrialConfig config;
  double area = 0.0;
  std::vector<AngularPartition> partitions;
  std::vector<TrialRow> rows;
  std::size_t degenerate = 0;
  std::size_t core_sampled = 0;

  std::vector<double> column_N(bool skip_degenerate = false) const;
  std::vector<double> column_A(bool skip_degenerate = false) const;
};

// Trial t draws from the stream (seed, t); rows are stored by trial index,
// so the set does not depend on the thread count.
TrialSet run_trials(const TrialConfig& config);
// With explicit partitions (sector values recorded for each).
TrialSet run_trials(const TrialConfig& config, const ConvexBody& body,
                    std::vector<AngularPartition> partitions);

unsigned resolve_threads(unsigned requested);

// Named acceptance thresholds with their default values.
using Thresholds = std::map<std::string, double>;
Thresholds default_thresholds();
double threshold(const Thresholds& t, const std::string& key);

// Runs of one body family over increasing scales.
std::vector<TrialSet> run_family(const std::string& family_spec, const std::vector<double>& scales,
                                 const TrialConfig& base);

struct CltLimits {
  double ks_N_max = 0.03;
  std::optional<double> ks_A_max = 0.03;
  bool check_monotone = true;
};
Report clt_report(const std::vector<TrialSet>& runs, const CltLimits& limits);

struct ScalingLimits {
  double slope_lo = 0.30, slope_hi = 0.37;
  double square_log_ratio = 1.5;
  double ratio_band = 4.0;
  double ci_rel = 0.10;
};
// Disk-like family (growth slope) and polygon family (logarithmic growth).
Report scaling_report(const std::vector<TrialSet>& smooth_runs,
                      const std::vector<TrialSet>& polygon_runs, const ScalingLimits& limits);

struct MixingLimits {
  double corr_max = 0.05;
  double far_fraction = 0.25;
};
// Needs a trial set recorded with L >= 8 sectors.
Report mixing_report(const TrialSet& trials, const MixingLimits& limits);

struct MgfSetup {
  double m0 = 8.0;  // proxy for the threshold measure
  std::vector<double> multiples{1.0, 2.0, 4.0};
  std::vector<double> lambda_mu{-0.1, -0.05, 0.0, 0.05, 0.1};  // lambda * mu
  double cap = 2.0;
  double start = 0.0;
};
Report mgf_report(const TrialConfig& base, const MgfSetup& setup);

struct UniformLimits {
  double mean_tol = 0.05;
  double var_tol = 0.15;
};
Report uniform_compare(const TrialConfig& base, const UniformLimits& limits);

struct WLimits {
  double ks_max = 0.01;
  double mass_tol = 1e-6;
  std::size_t bins = 20;
};
// Needs a trial set recorded with w_theta.
Report w_marginal_report(const TrialSet& trials, const WLimits& limits);

// Expected law of the W(theta) offset: P(offset <= h) = integral over the slab
// [0, h] of exp(-a(s)) c(s) ds, a the cap area and c the chord at depth s.
class WOffsetLaw {
 public:
  WOffsetLaw(const ConvexBody& body, double theta);
  double width() const { return width_; }
  // Integral of the density over [h0, h1] by adaptive Simpson.
  double mass(double h0, double h1) const;
  // Model CDF at sorted offsets, accumulated gap by gap.
  std::vector<double> cdf_at_sorted(const std::vector<double>& sorted) const;

 private:
  double density(double h) const;
  CapSlicer slicer_;
  double width_;
};

}  // namespace rpl
