#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace quadtail {

using CsvCell = std::variant<double, long long, std::string>;

/// Minimal CSV writer: fixed header, one row per call, numbers printed with
/// 12 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(const std::vector<CsvCell>& cells);
  void flush() { out_.flush(); }
  std::size_t columns() const { return header_.size(); }

 private:
  std::ofstream out_;
  std::vector<std::string> header_;
};

/// Reads a CSV written by CsvWriter (no quoting) into header + string rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace quadtail
