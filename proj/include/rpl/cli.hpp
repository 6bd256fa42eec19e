#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rpl/experiments.hpp"

namespace rpl::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kFlagFailed = 1, kUsage = 2, kIo = 3 };

struct RunConfig {
  std::string subcommand;
  std::string body;
  std::string model = "poisson";
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t L = 0;
  std::uint64_t n = 0;
  Thresholds thresholds = default_thresholds();
  std::string out;   // CSV path; empty writes to stdout
  std::string json;  // JSON summary path; empty for none
  unsigned threads = 0;
  std::optional<std::pair<double, double>> interval;
  std::vector<double> scales;
  std::string polygon_body;  // scaling: polygon family
  std::vector<double> polygon_scales;
  double theta = 0.0;
  std::size_t bins = 20;
  std::size_t points = 720;  // measure: profile samples
  double grid = 4096.0;      // measure: dry-part clips per pi
  std::string config_path;
};

// Arithmetic over numbers and `pi` with + - * / and parentheses.
double parse_angle(const std::string& text);
// "a:b" with both ends parsed by parse_angle.
std::pair<double, double> parse_interval(const std::string& text);
std::vector<double> parse_list(const std::string& text);

nlohmann::ordered_json to_json(const RunConfig& config);
// Applies the keys of a config file object; unknown keys throw.
void apply_json(RunConfig& config, const nlohmann::json& j);

struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = kOk;
};
// Config file < RPL_THREADS < flags. Diagnostics go to err, help to out.
ParseResult parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rpl::cli
