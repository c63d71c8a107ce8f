#include "halfcav/csv.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "halfcav/core.hpp"

namespace halfcav {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != columns_) throw Error("CsvWriter: column count mismatch");
  line_.clear();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line_ += ',';
    line_ += format_double(values[i]);
  }
  line_ += '\n';
  out_ << line_;
  if (!out_) throw Error("CsvWriter: write failed");
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error("csv: no column named " + name);
  const auto idx = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(idx));
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error("csv: empty file " + path.string());
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    r.reserve(table.header.size());
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc{}) throw Error("csv: malformed number in " + path.string());
      r.push_back(v);
      p = res.ptr;
      if (p < end && *p == ',') ++p;
    }
    if (r.size() != table.header.size()) throw Error("csv: ragged row in " + path.string());
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace halfcav
