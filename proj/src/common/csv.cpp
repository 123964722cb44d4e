#include "quadtail/common/csv.hpp"

#include <iomanip>
#include <sstream>

#include "quadtail/common/errors.hpp"

namespace quadtail {

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path), header_(std::move(header)) {
  if (!out_) throw RuntimeFault("cannot open " + path.string() + " for writing");
  out_ << std::setprecision(12);
  for (std::size_t i = 0; i < header_.size(); ++i) {
    out_ << (i ? "," : "") << header_[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != header_.size())
    throw PreconditionError("csv row has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(header_.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit([this](const auto& v) { out_ << v; }, cells[i]);
  }
  out_ << '\n';
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeFault("cannot read " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace quadtail
