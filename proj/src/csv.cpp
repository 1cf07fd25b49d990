#include "fcs/csv.hpp"

#include "fcs/error.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <fstream>

namespace fcs {

namespace {

void require_plain(const std::string& s) {
  if (s.find_first_of(",\"\n\r") != std::string::npos) {
    throw FormatError(fmt::format("CSV cell '{}' contains a separator, quote or newline", s));
  }
}

}  // namespace

std::string format_cell(const CsvCell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return fmt::format("{}", *i);
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) return fmt::format("{}", *u);
  return fmt::format("{:.12e}", std::get<double>(cell));
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  for (const auto& h : header_) require_plain(h);
}

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != header_.size()) {
    throw DimensionError(fmt::format("CSV row has {} cells, header has {}", row.size(), header_.size()));
  }
  for (const auto& c : row) {
    if (const auto* s = std::get_if<std::string>(&c)) require_plain(*s);
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out = fmt::format("{}\n", fmt::join(header_, ","));
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(fmt::format("cannot write '{}'", path.string()));
  out << str();
  if (!out) throw FormatError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace fcs
