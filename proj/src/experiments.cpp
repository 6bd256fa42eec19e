#include "rpl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rpl/numeric.hpp"

namespace rpl {

namespace {

std::string fixed(double x) { return format_number(x); }

void run_parallel(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
  threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

std::vector<double> TrialSet::column_N(bool skip_degenerate) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const TrialRow& r : rows) {
    if (skip_degenerate && r.degenerate) continue;
    out.push_back(static_cast<double>(r.N));
  }
  return out;
}

std::vector<double> TrialSet::column_A(bool skip_degenerate) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const TrialRow& r : rows) {
    if (skip_degenerate && r.degenerate) continue;
    out.push_back(r.A);
  }
  return out;
}

TrialSet run_trials(const TrialConfig& config) {
  const ConvexBody body = make_body(config.body);
  std::vector<AngularPartition> partitions;
  if (config.L > 0) {
    const MeasureProfile profile(body);
    partitions.push_back(partition_equal_mu(profile, config.L));
  }
  return run_trials(config, body, std::move(partitions));
}

TrialSet run_trials(const TrialConfig& config, const ConvexBody& body,
                    std::vector<AngularPartition> partitions) {
  if (config.trials == 0) throw std::invalid_argument("run_trials: trials must be >= 1");
  TrialSet set;
  set.config = config;
  set.area = body.area();
  set.partitions = std::move(partitions);
  if (set.config.model == Model::uniform && set.config.n == 0) {
    set.config.n = static_cast<std::uint64_t>(std::llround(body.area()));
  }
  const TrialConfig& cfg = set.config;
  set.rows.resize(cfg.trials);

  std::optional<ShellSampler> shell;
  if (cfg.shell) shell.emplace(body);
  std::optional<CapSlicer> w_slicer;
  if (cfg.w_theta) w_slicer.emplace(body, *cfg.w_theta);

  run_parallel(cfg.trials, resolve_threads(cfg.threads), [&](std::size_t t) {
    const SeedRecord seed{cfg.seed, t};
    TrialRow& row = set.rows[t];
    HullResult h;
    if (shell) {
      Rng rng = make_rng(seed);
      ShellSampler::Draw d = shell->draw(rng, cfg.model, cfg.n);
      row.count = d.count;
      row.core_sampled = d.core_sampled && shell->has_core();
      h = std::move(d.hull);
    } else {
      const PointSet ps = cfg.model == Model::poisson ? sample_poisson(body, seed)
                                                      : sample_uniform(body, cfg.n, seed);
      row.count = ps.points.size();
      h = hull(ps, body);
    }
    row.N = static_cast<std::int64_t>(h.N);
    row.A = h.A;
    row.degenerate = h.degenerate;
    if (!h.degenerate) {
      for (const AngularPartition& p : set.partitions) {
        SectorValues sv = sector_functionals(body, h, p);
        row.sectors.push_back({std::move(sv.N), std::move(sv.A)});
      }
      if (w_slicer) row.w_offset = w_slicer->depth_of(hull_support_vertex(h, *cfg.w_theta));
    }
  });
  for (const TrialRow& r : set.rows) {
    set.degenerate += r.degenerate ? 1 : 0;
    set.core_sampled += r.core_sampled ? 1 : 0;
  }
  return set;
}

Thresholds default_thresholds() {
  return {
      {"clt.ks_N_max", 0.03},          {"clt.ks_A_max", 0.03},
      {"clt.check_monotone", 1.0},     {"scaling.slope_lo", 0.30},
      {"scaling.slope_hi", 0.37},      {"scaling.polygon_log_ratio", 1.5},
      {"scaling.ratio_band", 4.0},     {"scaling.ci_rel", 0.10},
      {"mixing.corr_max", 0.05},       {"mixing.far_fraction", 0.25},
      {"uniform.mean_tol", 0.05},      {"uniform.var_tol", 0.15},
      {"mgf.m0", 8.0},                 {"mgf.lambda_mu", 0.1},
      {"mgf.cap", 2.0},                {"wcheck.ks_max", 0.01},
      {"wcheck.mass_tol", 1e-6},       {"measure.identity_rel", 1e-3},
  };
}

double threshold(const Thresholds& t, const std::string& key) {
  auto it = t.find(key);
  if (it != t.end()) return it->second;
  const Thresholds d = default_thresholds();
  auto jt = d.find(key);
  if (jt == d.end()) throw std::out_of_range("unknown threshold '" + key + "'");
  return jt->second;
}

std::vector<TrialSet> run_family(const std::string& family_spec, const std::vector<double>& scales,
                                 const TrialConfig& base) {
  const BodySpec spec = parse_body_spec(family_spec);
  std::vector<double> sorted = scales;
  std::sort(sorted.begin(), sorted.end());
  std::vector<TrialSet> out;
  for (double s : sorted) {
    TrialConfig cfg = base;
    cfg.body = to_string(with_scale(spec, s));
    out.push_back(run_trials(cfg));
  }
  return out;
}

Report clt_report(const std::vector<TrialSet>& input, const CltLimits& limits) {
  std::vector<const TrialSet*> runs;
  for (const TrialSet& t : input) runs.push_back(&t);
  std::stable_sort(runs.begin(), runs.end(),
                   [](const TrialSet* a, const TrialSet* b) { return a->area < b->area; });
  Report r;
  r.name = "clt";
  r.table.columns = {"body",   "area",   "trials", "mean_N",    "var_N",         "ks_N",
                     "mean_A", "var_A",  "ks_A",   "reference", "ks_N_over_ref", "ks_A_over_ref"};
  std::vector<double> ks_N, ks_A;
  double worst_multiple = 0.0;
  for (const TrialSet* t : runs) {
    const std::vector<double> n = t->column_N(), a = t->column_A();
    const stats::KSResult kn = stats::ks_statistic(n);
    const stats::KSResult ka = stats::ks_statistic(a);
    const stats::MomentSummary sn = stats::summarize(n), sa = stats::summarize(a);
    const double ref = std::pow(std::log(sn.mean), 2.0) / std::sqrt(sn.mean);
    ks_N.push_back(kn.D);
    ks_A.push_back(ka.D);
    worst_multiple = std::max({worst_multiple, kn.D / ref, ka.D / ref});
    r.table.add_row({t->config.body, t->area, static_cast<std::int64_t>(t->rows.size()), sn.mean,
                     sn.variance, kn.D, sa.mean, sa.variance, ka.D, ref, kn.D / ref, ka.D / ref});
  }
  auto nonincreasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] > v[i - 1]) return false;
    }
    return true;
  };
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + fixed(x);
    return s;
  };
  if (limits.check_monotone) {
    r.flag("ks_N_nonincreasing", nonincreasing(ks_N), list(ks_N));
    r.flag("ks_A_nonincreasing", nonincreasing(ks_A), list(ks_A));
  }
  if (!ks_N.empty()) {
    r.flag("ks_N_below_limit_at_largest", ks_N.back() < limits.ks_N_max,
           fixed(ks_N.back()) + " < " + fixed(limits.ks_N_max));
    if (limits.ks_A_max) {
      r.flag("ks_A_below_limit_at_largest", ks_A.back() < *limits.ks_A_max,
             fixed(ks_A.back()) + " < " + fixed(*limits.ks_A_max));
    }
  }
  r.summary["ks_N"] = ks_N;
  r.summary["ks_A"] = ks_A;
  r.summary["ks_over_reference_max"] = worst_multiple;
  return r;
}

Report scaling_report(const std::vector<TrialSet>& smooth_runs,
                      const std::vector<TrialSet>& polygon_runs, const ScalingLimits& limits) {
  Report r;
  r.name = "scaling";
  r.table.columns = {"family",   "body",      "area",      "mean_N",       "mean_N_lo",
                     "mean_N_hi", "var_N",     "var_N_lo",  "var_N_hi",     "mean_A",
                     "mean_A_lo", "mean_A_hi", "var_A",     "var_A_lo",     "var_A_hi",
                     "EN_VarN",  "EN_EA",     "EN_VarA",   "VarN_EA",      "VarN_VarA",
                     "EA_VarA",  "total_mu",  "VarN_over_mu", "EN_over_log_area"};
  const char* ratio_names[6] = {"EN_VarN", "EN_EA", "EN_VarA", "VarN_EA", "VarN_VarA", "EA_VarA"};
  std::vector<double> ratio_lo(6, INFINITY), ratio_hi(6, -INFINITY);
  double ci_rel_max = 0.0;
  std::vector<double> smooth_log_area, smooth_log_EN;
  std::vector<double> polygon_log_ratio;

  auto add = [&](const TrialSet& t, const std::string& family) {
    const stats::MomentSummary sn = stats::summarize(t.column_N());
    const stats::MomentSummary sa = stats::summarize(t.column_A());
    const double q[4] = {sn.mean, sn.variance, sa.mean, sa.variance};
    const double ratios[6] = {q[0] / q[1], q[0] / q[2], q[0] / q[3],
                              q[1] / q[2], q[1] / q[3], q[2] / q[3]};
    for (int i = 0; i < 6; ++i) {
      ratio_lo[i] = std::min(ratio_lo[i], ratios[i]);
      ratio_hi[i] = std::max(ratio_hi[i], ratios[i]);
    }
    ci_rel_max = std::max({ci_rel_max, sn.mean_ci.half_width() / sn.mean,
                           sn.variance_ci.half_width() / sn.variance,
                           sa.mean_ci.half_width() / sa.mean,
                           sa.variance_ci.half_width() / sa.variance});
    const ConvexBody body = make_body(t.config.body);
    const double mu = MeasureProfile(body).total();
    const double en_log = sn.mean / std::log(t.area);
    if (family == "smooth") {
      smooth_log_area.push_back(std::log(t.area));
      smooth_log_EN.push_back(std::log(sn.mean));
    } else {
      polygon_log_ratio.push_back(en_log);
    }
    r.table.add_row({family, t.config.body, t.area, sn.mean, sn.mean_ci.lo, sn.mean_ci.hi,
                     sn.variance, sn.variance_ci.lo, sn.variance_ci.hi, sa.mean, sa.mean_ci.lo,
                     sa.mean_ci.hi, sa.variance, sa.variance_ci.lo, sa.variance_ci.hi, ratios[0],
                     ratios[1], ratios[2], ratios[3], ratios[4], ratios[5], mu, sn.variance / mu,
                     en_log});
  };
  for (const TrialSet& t : smooth_runs) add(t, "smooth");
  for (const TrialSet& t : polygon_runs) add(t, "polygon");

  if (smooth_log_area.size() >= 2) {
    const numeric::LinearFit fit =
        numeric::fit_line(smooth_log_area.data(), smooth_log_EN.data(), smooth_log_area.size());
    r.summary["smooth_slope"] = fit.slope;
    r.flag("smooth_slope_in_band", fit.slope >= limits.slope_lo && fit.slope <= limits.slope_hi,
           fixed(fit.slope) + " in [" + fixed(limits.slope_lo) + ", " + fixed(limits.slope_hi) + "]");
  }
  if (!polygon_log_ratio.empty()) {
    const auto [lo, hi] = std::minmax_element(polygon_log_ratio.begin(), polygon_log_ratio.end());
    const double spread = *hi / *lo;
    r.summary["polygon_EN_over_log_area_spread"] = spread;
    r.flag("polygon_log_growth", spread <= limits.square_log_ratio,
           fixed(spread) + " <= " + fixed(limits.square_log_ratio));
  }
  double worst_band = 0.0;
  nlohmann::ordered_json bands = nlohmann::ordered_json::object();
  for (int i = 0; i < 6; ++i) {
    const double band = ratio_hi[i] / ratio_lo[i];
    bands[ratio_names[i]] = band;
    worst_band = std::max(worst_band, band);
  }
  r.summary["ratio_bands"] = bands;
  r.summary["ci_rel_max"] = ci_rel_max;
  r.flag("ratio_band", worst_band <= limits.ratio_band,
         "worst " + fixed(worst_band) + " <= " + fixed(limits.ratio_band));
  r.flag("ci_half_width", ci_rel_max < limits.ci_rel,
         fixed(ci_rel_max) + " < " + fixed(limits.ci_rel));
  return r;
}

Report mixing_report(const TrialSet& trials, const MixingLimits& limits) {
  if (trials.partitions.empty() || trials.partitions[0].size() < 8) {
    throw std::invalid_argument("mixing_report: needs a trial set with L >= 8 sectors");
  }
  const ConvexBody body = make_body(trials.config.body);
  const MeasureProfile profile(body);
  const AngularPartition& part = trials.partitions[0];
  const std::size_t L = part.size();
  std::vector<std::vector<double>> xn(L), xa(L);
  for (const TrialRow& row : trials.rows) {
    if (row.degenerate) continue;
    for (std::size_t j = 0; j < L; ++j) {
      xn[j].push_back(static_cast<double>(row.sectors[0].N[j]));
      xa[j].push_back(row.sectors[0].A[j]);
    }
  }
  Report r;
  r.name = "mixing";
  r.table.columns = {"sector",    "alpha",     "mu_distance", "corr_N",  "corr_N_lo", "corr_N_hi",
                     "corr_A",    "corr_A_lo", "corr_A_hi",   "log_bound", "bound"};
  const double total = profile.total();
  bool far_ok = true;
  double far_worst = 0.0;
  std::vector<double> dist, logb;
  for (std::size_t j = 0; j < L; ++j) {
    const double d = j == 0 ? 0.0 : mu_distance(profile, part.angles[0], part.angles[j]);
    stats::Correlation cn{1.0, {1.0, 1.0}}, ca{1.0, {1.0, 1.0}};
    if (j > 0) {
      cn = stats::correlation(xn[0], xn[j]);
      ca = stats::correlation(xa[0], xa[j]);
    }
    const DependenceBound b = dependence_bound(body, part.angles[0], part.angles[j]);
    dist.push_back(d);
    logb.push_back(b.log_value);
    if (d >= limits.far_fraction * total) {
      far_worst = std::max(far_worst, std::abs(cn.r));
      if (!(std::abs(cn.r) < limits.corr_max)) far_ok = false;
    }
    r.table.add_row({static_cast<std::int64_t>(j + 1), part.angles[j], d, cn.r, cn.ci.lo, cn.ci.hi,
                     ca.r, ca.ci.lo, ca.ci.hi, b.log_value, b.value});
  }
  const std::size_t half = L / 2;  // index of the antipodal sector
  bool decreasing = true;
  for (std::size_t j = 1; j <= half; ++j) {
    if (!(logb[j] < logb[j - 1])) decreasing = false;
  }
  const numeric::LinearFit fit = numeric::fit_line(dist.data(), logb.data(), half + 1);
  const double delta = -fit.slope;
  double asym = 0.0;
  for (std::size_t j = 1; j < L; ++j) {
    asym = std::max(asym, std::abs(logb[j] - logb[L - j]) / std::max(1.0, std::abs(logb[j])));
  }
  r.summary["total_mu"] = total;
  r.summary["delta_hat"] = delta;
  r.summary["far_corr_N_max"] = far_worst;
  r.summary["bound_symmetry_residual"] = asym;
  r.summary["trials_used"] = xn[0].size();
  r.summary["degenerate_trials"] = trials.degenerate;
  r.flag("far_sectors_uncorrelated", far_ok,
         "max |corr| " + fixed(far_worst) + " < " + fixed(limits.corr_max));
  r.flag("bound_strictly_decreasing", decreasing, "sectors 1.." + std::to_string(half + 1));
  r.flag("decay_rate_positive", delta > 0.0, "delta_hat " + fixed(delta));
  return r;
}

Report mgf_report(const TrialConfig& base, const MgfSetup& setup) {
  const ConvexBody body = make_body(base.body);
  const MeasureProfile profile(body);
  std::vector<AngularPartition> parts;
  for (double mult : setup.multiples) {
    const double m = setup.m0 * mult;
    if (!(m < profile.total())) continue;
    const double beta = profile.advance(setup.start, m);
    parts.push_back(partition_from_angles(profile, {setup.start, beta}));
  }
  if (parts.empty()) throw std::invalid_argument("mgf_report: no interval fits in the body");
  TrialConfig cfg = base;
  cfg.L = 0;
  const TrialSet set = run_trials(cfg, body, parts);

  Report r;
  r.name = "mgf";
  r.table.columns = {"alpha", "beta", "mu", "functional", "lambda_mu", "lambda", "mgf", "mgf_lo",
                     "mgf_hi"};
  bool below_cap = true, lambda0 = true, increasing = true;
  double worst = 0.0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const double mu = parts[p].mu_weights[0];
    for (int f = 0; f < 2; ++f) {
      std::vector<double> x;
      for (const TrialRow& row : set.rows) {
        if (row.degenerate) continue;
        x.push_back(f == 0 ? static_cast<double>(row.sectors[p].N[0]) : row.sectors[p].A[0]);
      }
      double prev = -INFINITY;
      for (double c : setup.lambda_mu) {
        const double lambda = c / mu;
        std::vector<double> e(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) e[i] = std::exp(lambda * x[i]);
        const stats::MomentSummary s = stats::summarize(e);
        if (c == 0.0 && s.mean != 1.0) lambda0 = false;
        if (!(s.mean_ci.hi < setup.cap) || !std::isfinite(s.mean)) below_cap = false;
        if (c >= 0.0) {
          if (!(s.mean >= prev)) increasing = false;
          prev = s.mean;
        }
        worst = std::max(worst, s.mean_ci.hi);
        r.table.add_row({parts[p].angles[0], parts[p].angles[1], mu, std::string(f == 0 ? "N" : "A"),
                         c, lambda, s.mean, s.mean_ci.lo, s.mean_ci.hi});
      }
    }
  }
  r.summary["m0_proxy"] = setup.m0;
  r.summary["cap"] = setup.cap;
  r.summary["max_upper_ci"] = worst;
  r.summary["degenerate_trials"] = set.degenerate;
  r.flag("mgf_below_cap", below_cap, "max upper CI " + fixed(worst) + " < " + fixed(setup.cap));
  r.flag("mgf_lambda_zero_is_one", lambda0);
  r.flag("mgf_increasing_in_positive_lambda", increasing);
  return r;
}

Report uniform_compare(const TrialConfig& base, const UniformLimits& limits) {
  const ConvexBody body = make_body(base.body);
  TrialConfig pc = base, uc = base;
  pc.model = Model::poisson;
  pc.L = 0;
  uc.model = Model::uniform;
  uc.L = 0;
  if (uc.n == 0) uc.n = static_cast<std::uint64_t>(std::llround(body.area()));
  uc.seed = numeric::splitmix64(base.seed);
  const TrialSet ps = run_trials(pc, body, {});
  const TrialSet us = run_trials(uc, body, {});
  const double scale = static_cast<double>(uc.n) / body.area();

  Report r;
  r.name = "uniform_compare";
  r.table.columns = {"functional", "mean_poisson", "mean_uniform", "mean_ratio", "mean_ratio_lo",
                     "mean_ratio_hi", "var_poisson", "var_uniform", "var_ratio", "var_ratio_lo",
                     "var_ratio_hi", "n_over_area"};
  for (int f = 0; f < 2; ++f) {
    const stats::MomentSummary a = stats::summarize(f == 0 ? ps.column_N() : ps.column_A());
    const stats::MomentSummary b = stats::summarize(f == 0 ? us.column_N() : us.column_A());
    const stats::Ratio mr = stats::ratio_of(b.mean, b.se_mean, a.mean, a.se_mean);
    const stats::Ratio vr = stats::ratio_of(b.variance, b.se_variance, a.variance, a.se_variance);
    r.table.add_row({std::string(f == 0 ? "N" : "A"), a.mean, b.mean, mr.value, mr.ci.lo, mr.ci.hi,
                     a.variance, b.variance, vr.value, vr.ci.lo, vr.ci.hi, scale});
    const std::string key = f == 0 ? "N" : "A";
    r.summary["mean_ratio_" + key] = mr.value;
    r.summary["var_ratio_" + key] = vr.value;
    if (f == 0) {
      r.flag("mean_N_ratio", std::abs(mr.value - 1.0) <= limits.mean_tol,
             "|" + fixed(mr.value) + " - 1| <= " + fixed(limits.mean_tol));
      r.flag("var_N_ratio", std::abs(vr.value - 1.0) <= limits.var_tol,
             "|" + fixed(vr.value) + " - 1| <= " + fixed(limits.var_tol));
    }
  }
  r.summary["n"] = uc.n;
  r.summary["n_over_area"] = scale;
  return r;
}

WOffsetLaw::WOffsetLaw(const ConvexBody& body, double theta)
    : slicer_(body, theta), width_(slicer_.width()) {}

double WOffsetLaw::density(double h) const {
  return std::exp(-slicer_.area_at(h)) * slicer_.chord_at(h).length();
}

double WOffsetLaw::mass(double h0, double h1) const {
  h0 = std::clamp(h0, 0.0, width_);
  h1 = std::clamp(h1, 0.0, width_);
  if (!(h1 > h0)) return 0.0;
  // The density varies on the scale of a unit change in cap area, so the
  // slab is cut where the cap area crosses multiples of 1/4.
  const auto f = [this](double h) { return density(h); };
  const double step = 0.25, a_max = 80.0;
  const double a0 = slicer_.area_at(h0), a1 = std::min(slicer_.area_at(h1), a_max);
  double sum = 0.0, lo = h0;
  for (double t = (std::floor(a0 / step) + 1.0) * step; t < a1; t += step) {
    const double hi = slicer_.depth_for_area(t);
    if (hi > lo) sum += numeric::adaptive_simpson(f, lo, hi, 1e-15, 50).value;
    lo = std::max(lo, hi);
  }
  if (h1 > lo) sum += numeric::adaptive_simpson(f, lo, h1, 1e-15, 50).value;
  return sum;
}

std::vector<double> WOffsetLaw::cdf_at_sorted(const std::vector<double>& sorted) const {
  std::vector<double> out(sorted.size());
  double acc = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    acc += mass(prev, sorted[i]);
    prev = std::max(prev, sorted[i]);
    out[i] = acc;
  }
  return out;
}

Report w_marginal_report(const TrialSet& trials, const WLimits& limits) {
  if (!trials.config.w_theta) throw std::invalid_argument("w_marginal_report: no W offsets recorded");
  const double theta = *trials.config.w_theta;
  const ConvexBody body = make_body(trials.config.body);
  const WOffsetLaw law(body, theta);
  std::vector<double> x;
  for (const TrialRow& row : trials.rows) {
    if (!row.degenerate) x.push_back(row.w_offset);
  }
  std::sort(x.begin(), x.end());
  const std::vector<double> cdf = law.cdf_at_sorted(x);
  const double ks = stats::ks_sorted(x, cdf);
  const double total_mass = law.mass(0.0, law.width());

  // Equal-probability bins from a tabulation of the model CDF in cap area.
  const CapSlicer slicer(body, theta);
  const std::size_t grid = 4000;
  std::vector<double> hs{0.0}, gs{0.0};
  const double a_max = std::min(40.0, body.area());
  for (std::size_t k = 1; k <= grid; ++k) {
    const double h = slicer.depth_for_area(a_max * static_cast<double>(k) / grid);
    gs.push_back(gs.back() + law.mass(hs.back(), h));
    hs.push_back(h);
  }
  const std::size_t B = std::max<std::size_t>(2, limits.bins);
  std::vector<double> edges{0.0};
  for (std::size_t j = 1; j < B; ++j) {
    const double target = total_mass * static_cast<double>(j) / B;
    const std::size_t k = static_cast<std::size_t>(std::lower_bound(gs.begin(), gs.end(), target) - gs.begin());
    const std::size_t hi = std::min(k, gs.size() - 1), lo = hi == 0 ? 0 : hi - 1;
    const double t = gs[hi] > gs[lo] ? (target - gs[lo]) / (gs[hi] - gs[lo]) : 0.0;
    edges.push_back(hs[lo] + t * (hs[hi] - hs[lo]));
  }
  edges.push_back(law.width());

  Report r;
  r.name = "wcheck";
  r.table.columns = {"bin", "offset_lo", "offset_hi", "observed", "expected"};
  const double M = static_cast<double>(x.size());
  double chi2 = 0.0;
  for (std::size_t j = 0; j < B; ++j) {
    const auto lo_it = std::lower_bound(x.begin(), x.end(), edges[j]);
    const auto hi_it = j + 1 == B ? x.end() : std::lower_bound(x.begin(), x.end(), edges[j + 1]);
    const double observed = static_cast<double>(hi_it - lo_it);
    const double expected = M * law.mass(edges[j], edges[j + 1]);
    chi2 += (observed - expected) * (observed - expected) / expected;
    r.table.add_row({static_cast<std::int64_t>(j + 1), edges[j], edges[j + 1],
                     static_cast<std::int64_t>(observed), expected});
  }
  const double dof = static_cast<double>(B - 1);
  r.summary["theta"] = theta;
  r.summary["trials_used"] = x.size();
  r.summary["degenerate_trials"] = trials.degenerate;
  r.summary["ks"] = ks;
  r.summary["chi_square"] = chi2;
  r.summary["dof"] = dof;
  r.summary["chi_square_p_approx"] = stats::chi_square_sf(chi2, dof);
  r.summary["expected_mass_total"] = total_mass;
  r.flag("ks_below_limit", ks < limits.ks_max, fixed(ks) + " < " + fixed(limits.ks_max));
  r.flag("expected_mass_total", std::abs(total_mass - 1.0) <= limits.mass_tol,
         "|" + fixed(total_mass) + " - 1| <= " + fixed(limits.mass_tol));
  return r;
}

}  // namespace rpl
