#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace rpl {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  // Column index by name; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

struct Flag {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Report {
  std::string name;
  Table table;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<Flag> flags;

  void flag(std::string name, bool passed, std::string detail = {});
  bool all_passed() const;
  const Flag& find_flag(const std::string& name) const;
};

// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_number(double x);
std::string format_cell(const Cell& c);
// RFC 4180: quote fields holding a comma, quote, CR or LF; double the quotes.
std::string csv_field(const std::string& s);
std::string render_csv(const Table& table, const std::vector<std::string>& header_lines = {});
nlohmann::ordered_json report_json(const Report& report);

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes to a temporary file next to the target and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace rpl
