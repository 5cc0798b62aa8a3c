#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace multimax::csv {

struct Row {
  /// 1-based physical line where the record starts.
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// RFC 4180-style table: comma separated, double-quote escaping, LF or CRLF.
/// Blank lines are skipped. The first record is the header.
struct Table {
  std::string source;
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Throws ValidationError naming the file when the column is absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
  /// "file:line" for error messages.
  [[nodiscard]] std::string where(const Row& row) const;
};

/// Throws ValidationError on unbalanced quotes, ragged rows or a missing header.
Table parse(std::string_view text, std::string source);
Table read(const std::filesystem::path& path);

/// Quotes a field when it contains a comma, quote or line break.
std::string field(std::string_view value);

}  // namespace multimax::csv
