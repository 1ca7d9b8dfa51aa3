#include "partisan/common/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "partisan/common/error.hpp"

namespace partisan::csv {

int Table::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

int Table::require_column(const std::string& name) const {
  int c = column(name);
  if (c < 0) throw Error(ErrorCode::Validation, "missing column '" + name + "'");
  return c;
}

static std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::Validation, path.string() + ": missing header row");
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    if (fields.size() != t.header.size())
      throw Error(ErrorCode::Validation,
                  path.string() + " row " + std::to_string(t.rows.size() + 1) +
                      ": expected " + std::to_string(t.header.size()) +
                      " fields, got " + std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  return t;
}

double parse_double(const std::string& token, const std::string& where) {
  if (token == "nan" || token == "-nan")
    return std::numeric_limits<double>::quiet_NaN();
  double v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw Error(ErrorCode::Validation, where + ": not a number: '" + token + "'");
  return v;
}

long long parse_int(const std::string& token, const std::string& where) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw Error(ErrorCode::Validation, where + ": not an integer: '" + token + "'");
  return v;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  // %.17g always round-trips; try shorter forms first for readable files.
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0;
    std::from_chars(buf, buf + std::string_view(buf).size(), back);
    if (back == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Writer::Writer(std::vector<std::string> header) : header_(std::move(header)) {}

void Writer::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw Error(ErrorCode::Validation, "csv row width mismatch");
  rows_.push_back(std::move(row));
}

void Writer::add_row() { rows_.emplace_back(); }

void Writer::cell(std::string value) {
  if (rows_.empty())
    throw Error(ErrorCode::Validation, "csv cell added before any row");
  if (rows_.back().size() >= header_.size())
    throw Error(ErrorCode::Validation, "csv row wider than header");
  rows_.back().push_back(std::move(value));
}

std::string Writer::to_string() const {
  for (const auto& row : rows_)
    if (row.size() != header_.size())
      throw Error(ErrorCode::Validation, "csv row width mismatch");
  std::ostringstream out;
  for (size_t i = 0; i < header_.size(); ++i)
    out << (i ? "," : "") << header_[i];
  out << "\n";
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

void Writer::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << to_string();
}

}  // namespace partisan::csv
