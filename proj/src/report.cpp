#include "rpl/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unistd.h>

namespace rpl {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("Table: row width mismatch");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::out_of_range("Table: no column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw std::invalid_argument("Table: column '" + name + "' is not numeric");
}

void Report::flag(std::string flag_name, bool passed, std::string detail) {
  flags.push_back({std::move(flag_name), passed, std::move(detail)});
}

bool Report::all_passed() const {
  for (const Flag& f : flags) {
    if (!f.passed) return false;
  }
  return true;
}

const Flag& Report::find_flag(const std::string& flag_name) const {
  for (const Flag& f : flags) {
    if (f.name == flag_name) return f;
  }
  throw std::out_of_range("Report: no flag '" + flag_name + "'");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string render_csv(const Table& table, const std::vector<std::string>& header_lines) {
  std::string out;
  for (const std::string& line : header_lines) out += "# " + line + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(format_cell(row[i]));
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json report_json(const Report& report) {
  nlohmann::ordered_json j;
  j["report"] = report.name;
  j["summary"] = report.summary;
  nlohmann::ordered_json flags = nlohmann::ordered_json::array();
  for (const Flag& f : report.flags) {
    flags.push_back({{"name", f.name}, {"passed", f.passed}, {"detail", f.detail}});
  }
  j["flags"] = flags;
  j["all_passed"] = report.all_passed();
  return j;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError("write to '" + tmp + "' failed");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

}  // namespace rpl
