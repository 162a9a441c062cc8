#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace raceopt::io {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Minimal RFC-4180 writer: fields containing separators or quotes are quoted.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& fields);
  void row(const std::vector<double>& values);

 private:
  struct Impl;
  Impl* impl_;
};

std::string escape_csv_field(std::string_view field);

// Splits one CSV line (no embedded newlines) honoring double quotes.
std::vector<std::string> split_csv_line(std::string_view line);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace raceopt::io
