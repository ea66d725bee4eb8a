#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace confokit::detail {

// RFC-4180 style table: quoted fields, "" escapes, CR/LF or LF row ends,
// newlines allowed inside quoted fields.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;         // 1-based source line of each data row
  std::vector<std::string> leading_comments;  // '#'-prefixed lines before the header
};

CsvTable parse_csv_table(std::string_view text);

// Appends one row, quoting fields that contain commas, quotes or newlines.
void append_csv_row(std::string& out, const std::vector<std::string>& fields);

}  // namespace confokit::detail
