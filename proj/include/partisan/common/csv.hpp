#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace partisan::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;       // -1 if absent
  int require_column(const std::string& name) const;  // throws Validation
};

// Reads a comma-delimited UTF-8 file with a required header row. Quoting is
// not supported; fields are plain tokens. CRLF endings are tolerated.
Table read_file(const std::filesystem::path& path);

// Locale-independent numeric parsing (dot decimal separator). `where`
// describes the cell for error messages, e.g. "counties.csv row 3 col pop".
double parse_double(const std::string& token, const std::string& where);
long long parse_int(const std::string& token, const std::string& where);

// Shortest exact decimal representation; round-trips through parse_double.
std::string format_double(double v);

class Writer {
 public:
  explicit Writer(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);
  // Streaming style: start an empty row, then append cells left to right.
  void add_row();
  void cell(std::string value);
  void cell(const char* value) { cell(std::string(value)); }
  void cell(double value) { cell(format_double(value)); }
  void cell(long long value) { cell(std::to_string(value)); }
  void cell(int value) { cell(std::to_string(value)); }

  void write(const std::filesystem::path& path) const;  // validates row widths
  std::string to_string() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace partisan::csv
