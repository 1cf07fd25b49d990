#pragma once

// Minimal CSV writer: UTF-8, comma separated, LF line endings, a header
// row, and every floating-point cell formatted as %.12e.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace fcs {

using CsvCell = std::variant<std::string, std::int64_t, std::uint64_t, double>;

std::string format_cell(const CsvCell& cell);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// Throws DimensionError if the row width differs from the header and
  /// FormatError if a text cell contains a comma, quote or newline.
  void add_row(std::vector<CsvCell> row);

  [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
  [[nodiscard]] std::size_t rows() const { return rows_.size(); }
  [[nodiscard]] std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

}  // namespace fcs
