#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace halfcav {

/// Shortest form that keeps 17 significant digits ("%.17g"-equivalent).
std::string format_double(double value);

/// Comma-separated writer with a fixed header line.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::string line_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column by header name; throws if absent.
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace halfcav
