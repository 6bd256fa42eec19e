#include "rpl/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rpl::cli {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Recursive descent over + - * / ( ) numbers and pi.
class AngleParser {
 public:
  explicit AngleParser(const std::string& s) : s_(s) {}

  double parse() {
    const double v = expr();
    skip();
    if (pos_ != s_.size()) fail();
    if (!std::isfinite(v)) fail();
    return v;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail() const { throw UsageError("cannot parse angle '" + s_ + "'"); }

  double expr() {
    double v = term();
    while (true) {
      if (eat('+')) {
        v += term();
      } else if (eat('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }
  double term() {
    double v = factor();
    while (true) {
      if (eat('*')) {
        v *= factor();
      } else if (eat('/')) {
        v /= factor();
      } else {
        skip();
        // Implicit product such as "2pi".
        if (s_.compare(pos_, 2, "pi") == 0) {
          v *= factor();
          continue;
        }
        return v;
      }
    }
  }
  double factor() {
    if (eat('-')) return -factor();
    if (eat('+')) return factor();
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) fail();
      return v;
    }
    skip();
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return kPi;
    }
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail();
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

const std::set<std::string>& subcommands() {
  static const std::set<std::string> names = {"measure", "simulate", "clt",
                                              "scaling", "mixing",   "mgf",
                                              "uniform-compare", "wcheck"};
  return names;
}

Model to_model(const std::string& m) {
  if (m == "poisson") return Model::poisson;
  if (m == "uniform") return Model::uniform;
  throw UsageError("--model must be 'poisson' or 'uniform', got '" + m + "'");
}

void check_body(const std::string& spec, const std::vector<double>& scales) {
  if (spec.empty()) throw UsageError("--body is required");
  try {
    if (scales.empty()) {
      make_body(spec);
      return;
    }
    const BodySpec base = parse_body_spec(spec);
    for (double s : scales) make_body(with_scale(base, s));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("invalid --body: ") + e.what());
  }
}

void validate(RunConfig& c) {
  if (subcommands().count(c.subcommand) == 0) {
    throw UsageError("unknown subcommand '" + c.subcommand + "'");
  }
  const Model model = to_model(c.model);
  if (c.subcommand == "clt" || c.subcommand == "scaling") {
    check_body(c.body, c.scales);
  } else {
    if (!c.scales.empty()) throw UsageError("--scales is only valid for clt and scaling");
    check_body(c.body, {});
  }
  if (!c.polygon_body.empty() || !c.polygon_scales.empty()) {
    if (c.subcommand != "scaling") throw UsageError("--polygon is only valid for scaling");
    check_body(c.polygon_body, c.polygon_scales);
  }
  if (c.n != 0 && model == Model::poisson && c.subcommand != "uniform-compare") {
    throw UsageError("--n conflicts with --model poisson");
  }
  if (c.subcommand == "uniform-compare" && c.model != "poisson") {
    throw UsageError("uniform-compare runs both models; --model is not allowed");
  }
  if (c.trials < 2) throw UsageError("--trials must be at least 2");
  if (c.subcommand == "mixing") {
    if (c.L == 0) c.L = 16;
    if (c.L < 8) throw UsageError("mixing needs --L >= 8");
  } else if (c.L != 0 && c.subcommand != "simulate") {
    throw UsageError("--L is only valid for simulate and mixing");
  }
  if (c.bins < 2) throw UsageError("--bins must be at least 2");
  if (c.points < 1) throw UsageError("--points must be at least 1");
  if (!(c.grid >= 1.0) || c.grid != std::floor(c.grid) || c.grid > 1e7) {
    throw UsageError("--grid must be a positive integer");
  }
  if (!std::isfinite(c.theta)) throw UsageError("--theta must be finite");
  const Thresholds defaults = default_thresholds();
  for (const auto& [key, value] : c.thresholds) {
    if (defaults.count(key) == 0) throw UsageError("unknown threshold '" + key + "'");
    if (!std::isfinite(value)) throw UsageError("threshold '" + key + "' must be finite");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrialConfig trial_config(const RunConfig& c) {
  TrialConfig t;
  t.body = c.body;
  t.model = to_model(c.model);
  t.n = c.n;
  t.trials = c.trials;
  t.seed = c.seed;
  t.L = c.L;
  t.threads = c.threads;
  return t;
}

double thr(const RunConfig& c, const std::string& key) { return threshold(c.thresholds, key); }

std::vector<TrialSet> runs_for(const std::string& body, const std::vector<double>& scales,
                               const TrialConfig& base) {
  if (scales.empty()) {
    TrialConfig t = base;
    t.body = body;
    return {run_trials(t)};
  }
  return run_family(body, scales, base);
}

Report measure_report(const RunConfig& c) {
  const ConvexBody body = make_body(c.body);
  const MeasureProfile profile(body);
  Report r;
  r.name = "measure";
  r.summary["total_mu"] = profile.total();
  r.summary["area"] = body.area();
  if (!c.interval) {
    r.table.columns = {"theta", "f_density"};
    for (std::size_t i = 0; i < c.points; ++i) {
      const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(c.points);
      r.table.add_row({theta, mu_density(body, theta)});
    }
    return r;
  }
  const auto [alpha, beta] = *c.interval;
  if (beta < alpha) throw UsageError("--interval needs alpha <= beta");
  const double mu = profile.interval(alpha, beta);
  const double wet = wet_area(body, 1.0, alpha, beta, static_cast<int>(c.grid));
  const double expected = 1.0 + mu / 8.0;
  const double residual = wet - expected;
  r.table.columns = {"alpha", "beta", "mu", "wet_area", "identity_residual"};
  r.table.add_row({alpha, beta, mu, wet, residual});
  const double tol = thr(c, "measure.identity_rel");
  r.summary["relative_residual"] = residual / expected;
  r.flag("wet_part_identity", std::abs(residual) <= tol * expected,
         "|" + format_number(residual) + "| <= " + format_number(tol * expected));
  return r;
}

Report simulate_report(const RunConfig& c) {
  const TrialSet set = run_trials(trial_config(c));
  Report r;
  r.name = "simulate";
  r.table.columns = {"trial", "count", "N", "A"};
  for (std::size_t j = 1; j <= c.L; ++j) r.table.columns.push_back("N_" + std::to_string(j));
  for (std::size_t j = 1; j <= c.L; ++j) r.table.columns.push_back("A_" + std::to_string(j));
  for (std::size_t t = 0; t < set.rows.size(); ++t) {
    const TrialRow& row = set.rows[t];
    std::vector<Cell> cells{static_cast<std::int64_t>(t), static_cast<std::int64_t>(row.count),
                            row.N, row.A};
    for (std::size_t j = 0; j < c.L; ++j) {
      cells.push_back(row.sectors.empty() ? Cell{std::string()} : Cell{row.sectors[0].N[j]});
    }
    for (std::size_t j = 0; j < c.L; ++j) {
      cells.push_back(row.sectors.empty() ? Cell{std::string()} : Cell{row.sectors[0].A[j]});
    }
    r.table.add_row(std::move(cells));
  }
  const stats::MomentSummary sn = stats::summarize(set.column_N());
  const stats::MomentSummary sa = stats::summarize(set.column_A());
  r.summary["area"] = set.area;
  r.summary["mean_N"] = sn.mean;
  r.summary["var_N"] = sn.variance;
  r.summary["mean_A"] = sa.mean;
  r.summary["var_A"] = sa.variance;
  r.summary["degenerate_trials"] = set.degenerate;
  return r;
}

Report build_report(const RunConfig& c) {
  const std::string& s = c.subcommand;
  if (s == "measure") return measure_report(c);
  if (s == "simulate") return simulate_report(c);
  const TrialConfig base = trial_config(c);
  if (s == "clt") {
    CltLimits limits;
    limits.ks_N_max = thr(c, "clt.ks_N_max");
    const double ks_A = thr(c, "clt.ks_A_max");
    limits.ks_A_max = ks_A > 0.0 ? std::optional<double>(ks_A) : std::nullopt;
    limits.check_monotone = thr(c, "clt.check_monotone") != 0.0;
    return clt_report(runs_for(c.body, c.scales, base), limits);
  }
  if (s == "scaling") {
    ScalingLimits limits{thr(c, "scaling.slope_lo"), thr(c, "scaling.slope_hi"),
                         thr(c, "scaling.polygon_log_ratio"), thr(c, "scaling.ratio_band"),
                         thr(c, "scaling.ci_rel")};
    const std::vector<TrialSet> smooth = runs_for(c.body, c.scales, base);
    std::vector<TrialSet> polygon;
    if (!c.polygon_body.empty()) polygon = runs_for(c.polygon_body, c.polygon_scales, base);
    return scaling_report(smooth, polygon, limits);
  }
  if (s == "mixing") {
    return mixing_report(run_trials(base),
                         {thr(c, "mixing.corr_max"), thr(c, "mixing.far_fraction")});
  }
  if (s == "mgf") {
    MgfSetup setup;
    setup.m0 = thr(c, "mgf.m0");
    const double lm = thr(c, "mgf.lambda_mu");
    setup.lambda_mu = {-lm, -0.5 * lm, 0.0, 0.5 * lm, lm};
    setup.cap = thr(c, "mgf.cap");
    setup.start = c.theta;
    return mgf_report(base, setup);
  }
  if (s == "uniform-compare") {
    return uniform_compare(base, {thr(c, "uniform.mean_tol"), thr(c, "uniform.var_tol")});
  }
  TrialConfig w = base;
  w.w_theta = c.theta;
  return w_marginal_report(run_trials(w),
                           {thr(c, "wcheck.ks_max"), thr(c, "wcheck.mass_tol"), c.bins});
}

}  // namespace

double parse_angle(const std::string& text) { return AngleParser(text).parse(); }

std::pair<double, double> parse_interval(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("interval must be 'alpha:beta', got '" + text + "'");
  return {parse_angle(text.substr(0, colon)), parse_angle(text.substr(colon + 1))};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size() || !(v > 0.0) || !std::isfinite(v)) {
      throw UsageError("invalid scale '" + item + "' in list '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty scale list");
  return out;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["subcommand"] = c.subcommand;
  j["body"] = c.body;
  j["model"] = c.model;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["L"] = c.L;
  j["n"] = c.n;
  j["threads"] = c.threads;
  if (c.interval) {
    j["interval"] = {c.interval->first, c.interval->second};
  } else {
    j["interval"] = nullptr;
  }
  j["scales"] = c.scales;
  j["polygon"] = c.polygon_body;
  j["polygon_scales"] = c.polygon_scales;
  j["theta"] = c.theta;
  j["bins"] = c.bins;
  j["points"] = c.points;
  j["grid"] = c.grid;
  j["out"] = c.out;
  j["json"] = c.json;
  j["config"] = c.config_path;
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  for (const auto& [key, value] : c.thresholds) t[key] = value;
  j["thresholds"] = t;
  return j;
}

void apply_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  auto angle = [](const nlohmann::json& v) {
    return v.is_string() ? parse_angle(v.get<std::string>()) : v.get<double>();
  };
  auto list = [](const nlohmann::json& v) {
    return v.is_string() ? parse_list(v.get<std::string>()) : v.get<std::vector<double>>();
  };
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "subcommand") {
        if (v.get<std::string>() != c.subcommand) {
          throw UsageError("config file is for subcommand '" + v.get<std::string>() + "'");
        }
      } else if (key == "body") {
        c.body = v.get<std::string>();
      } else if (key == "model") {
        c.model = v.get<std::string>();
      } else if (key == "trials") {
        c.trials = v.get<std::size_t>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "L") {
        c.L = v.get<std::size_t>();
      } else if (key == "n") {
        c.n = v.get<std::uint64_t>();
      } else if (key == "threads") {
        c.threads = v.get<unsigned>();
      } else if (key == "interval") {
        if (v.is_null()) {
          c.interval.reset();
        } else if (v.is_string()) {
          c.interval = parse_interval(v.get<std::string>());
        } else if (v.is_array() && v.size() == 2) {
          c.interval = std::make_pair(angle(v[0]), angle(v[1]));
        } else {
          throw UsageError("config key 'interval' must be \"a:b\" or a pair");
        }
      } else if (key == "scales") {
        c.scales = list(v);
      } else if (key == "polygon") {
        c.polygon_body = v.get<std::string>();
      } else if (key == "polygon_scales") {
        c.polygon_scales = list(v);
      } else if (key == "theta") {
        c.theta = angle(v);
      } else if (key == "bins") {
        c.bins = v.get<std::size_t>();
      } else if (key == "points") {
        c.points = v.get<std::size_t>();
      } else if (key == "grid") {
        c.grid = v.get<double>();
      } else if (key == "out") {
        c.out = v.get<std::string>();
      } else if (key == "json") {
        c.json = v.get<std::string>();
      } else if (key == "thresholds") {
        if (!v.is_object()) throw UsageError("config key 'thresholds' must be an object");
        for (const auto& [tk, tv] : v.items()) c.thresholds[tk] = tv.get<double>();
      } else if (key == "config") {
        // recorded path of an earlier run; ignored
      } else {
        throw UsageError("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

ParseResult parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random polygons in convex bodies: measures, caps and Monte-Carlo reports.", "rpl"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  struct Raw {
    std::string config, body, model, interval, scales, polygon, polygon_scales, theta, out, json;
    std::size_t trials = 0, L = 0, bins = 0, points = 0;
    std::uint64_t seed = 0, n = 0;
    unsigned threads = 0;
    double grid = 0.0;
    std::vector<std::string> thresholds;
  } raw;

  struct Sub {
    const char* name;
    const char* help;
    bool sim;
  };
  const Sub subs[] = {
      {"measure", "mu density profile, or mu and wet area of an interval", false},
      {"simulate", "per-trial N, A and sector values", true},
      {"clt", "KS distance of N and A to the normal law over scales", true},
      {"scaling", "growth and mutual ratios of E N, Var N, E A, Var A", true},
      {"mixing", "sector correlations and the dependence bound", true},
      {"mgf", "moment generating function of sector functionals", true},
      {"uniform-compare", "uniform model against the Poisson model", true},
      {"wcheck", "law of the W(theta) offset against its density", true},
  };
  std::map<std::string, CLI::App*> apps;
  for (const Sub& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    apps[s.name] = sc;
    sc->add_option("--config", raw.config, "JSON config file; flags override it");
    sc->add_option("--body", raw.body, "body spec kind:key=value,...");
    sc->add_option("--out", raw.out, "CSV output path (default stdout)");
    sc->add_option("--json", raw.json, "JSON summary output path");
    sc->add_option("--threshold", raw.thresholds, "override a threshold, key=value");
    const std::string name = s.name;
    if (name == "measure") {
      sc->add_option("--interval", raw.interval, "alpha:beta in radians, pi allowed");
      sc->add_option("--points", raw.points, "profile samples over [0, 2pi)");
      sc->add_option("--grid", raw.grid, "dry-part clips per pi of arc");
    }
    if (s.sim) {
      sc->add_option("--trials", raw.trials, "Monte-Carlo trials");
      sc->add_option("--seed", raw.seed, "master seed");
      sc->add_option("--threads", raw.threads, "worker threads (0: all cores)");
      sc->add_option("--n", raw.n, "points in the uniform model (default round(area))");
    }
    if (name == "simulate" || name == "clt" || name == "scaling") {
      sc->add_option("--model", raw.model, "poisson or uniform");
    }
    if (name == "simulate" || name == "mixing") sc->add_option("--L", raw.L, "equal-mu sectors");
    if (name == "clt" || name == "scaling") {
      sc->add_option("--scales", raw.scales, "comma list of areas (square: sides)");
    }
    if (name == "scaling") {
      sc->add_option("--polygon", raw.polygon, "polygon family spec");
      sc->add_option("--polygon-scales", raw.polygon_scales, "scales of the polygon family");
    }
    if (name == "mgf" || name == "wcheck") {
      sc->add_option("--theta", raw.theta, "angle in radians, pi allowed");
    }
    if (name == "wcheck") sc->add_option("--bins", raw.bins, "equal-probability bins");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return {std::nullopt, code == 0 ? kOk : kUsage};
  }

  RunConfig c;
  CLI::App* sc = nullptr;
  for (const auto& [name, a] : apps) {
    if (a->parsed()) {
      c.subcommand = name;
      sc = a;
    }
  }
  auto given = [sc](const char* flag) {
    const CLI::Option* o = sc->get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  };
  try {
    if (given("--config")) {
      c.config_path = raw.config;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_file(raw.config));
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("config file '" + raw.config + "' is not valid JSON: " + e.what());
      }
      apply_json(c, j);
    }
    if (const char* env = std::getenv("RPL_THREADS"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      const unsigned long v = std::strtoul(env, &end, 10);
      if (*end != '\0' || v > 4096) throw UsageError("RPL_THREADS must be a thread count");
      c.threads = static_cast<unsigned>(v);
    }
    if (given("--body")) c.body = raw.body;
    if (given("--out")) c.out = raw.out;
    if (given("--json")) c.json = raw.json;
    if (given("--interval")) c.interval = parse_interval(raw.interval);
    if (given("--points")) c.points = raw.points;
    if (given("--grid")) c.grid = raw.grid;
    if (given("--trials")) c.trials = raw.trials;
    if (given("--seed")) c.seed = raw.seed;
    if (given("--threads")) c.threads = raw.threads;
    if (given("--n")) c.n = raw.n;
    if (given("--model")) c.model = raw.model;
    if (given("--L")) c.L = raw.L;
    if (given("--scales")) c.scales = parse_list(raw.scales);
    if (given("--polygon")) c.polygon_body = raw.polygon;
    if (given("--polygon-scales")) c.polygon_scales = parse_list(raw.polygon_scales);
    if (given("--theta")) c.theta = parse_angle(raw.theta);
    if (given("--bins")) c.bins = raw.bins;
    for (const std::string& kv : raw.thresholds) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--threshold expects key=value, got '" + kv + "'");
      std::size_t used = 0;
      double v = 0.0;
      const std::string value = kv.substr(eq + 1);
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size()) {
        throw UsageError("--threshold '" + kv + "' has an invalid value");
      }
      c.thresholds[kv.substr(0, eq)] = v;
    }
    validate(c);
  } catch (const UsageError& e) {
    err << "rpl " << c.subcommand << ": " << e.what() << "\n";
    return {std::nullopt, kUsage};
  }
  return {c, kOk};
}

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Report report;
  try {
    report = build_report(config);
  } catch (const std::invalid_argument& e) {
    err << "rpl " << config.subcommand << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "rpl " << config.subcommand << ": error: " << e.what() << "\n";
    return kIo;
  }
  const nlohmann::ordered_json cfg = to_json(config);
  const std::vector<std::string> header = {std::string("rpl ") + kVersion + " " + report.name,
                                           "config " + cfg.dump()};
  const std::string csv = render_csv(report.table, header);
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["config"] = cfg;
  const nlohmann::ordered_json body = report_json(report);
  for (const auto& [key, value] : body.items()) j[key] = value;
  try {
    if (config.out.empty()) {
      out << csv;
    } else {
      write_atomic(config.out, csv);
    }
    if (!config.json.empty()) write_atomic(config.json, j.dump(2) + "\n");
  } catch (const IoError& e) {
    err << "rpl " << config.subcommand << ": " << e.what() << "\n";
    return kIo;
  }
  for (const Flag& f : report.flags) {
    err << (f.passed ? "PASS " : "FAIL ") << f.name << (f.detail.empty() ? "" : ": " + f.detail)
        << "\n";
  }
  return report.all_passed() ? kOk : kFlagFailed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const ParseResult parsed = parse_args(argc, argv, out, err);
  if (!parsed.config) return parsed.exit_code;
  return dispatch(*parsed.config, out, err);
}

}  // namespace rpl::cli
