#include "multimax/csv.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "multimax/errors.hpp"

namespace multimax::csv {

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ValidationError(fmt::format("{}: missing column '{}'", source, name));
}

std::string Table::where(const Row& row) const { return fmt::format("{}:{}", source, row.line); }

Table parse(std::string_view text, std::string source) {
  Table table;
  table.source = std::move(source);
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::size_t line = 1;
  std::size_t pos = 0;
  const std::size_t n = text.size();
  while (pos < n) {
    Row row;
    row.line = line;
    std::string cell;
    bool quoted = false;
    bool was_quoted = false;
    bool blank = true;
    for (;;) {
      if (pos >= n) {
        if (quoted) {
          throw ValidationError(
              fmt::format("{}:{}: unterminated quoted field", table.source, row.line));
        }
        break;
      }
      const char c = text[pos++];
      if (quoted) {
        if (c == '"') {
          if (pos < n && text[pos] == '"') {
            cell.push_back('"');
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line;
          cell.push_back(c);
        }
        continue;
      }
      if (c == '\r' && pos < n && text[pos] == '\n') continue;
      if (c == '\n') {
        ++line;
        break;
      }
      blank = false;
      if (c == ',') {
        row.fields.push_back(std::move(cell));
        cell.clear();
        was_quoted = false;
      } else if (c == '"' && cell.empty() && !was_quoted) {
        quoted = true;
        was_quoted = true;
      } else {
        cell.push_back(c);
      }
    }
    if (blank && row.fields.empty() && cell.empty() && !was_quoted) continue;
    row.fields.push_back(std::move(cell));
    if (table.header.empty()) {
      table.header = std::move(row.fields);
      for (auto& h : table.header) {
        while (!h.empty() && (h.back() == ' ' || h.back() == '\t')) h.pop_back();
        while (!h.empty() && (h.front() == ' ' || h.front() == '\t')) h.erase(h.begin());
      }
      continue;
    }
    if (row.fields.size() != table.header.size()) {
      throw ValidationError(fmt::format("{}:{}: expected {} fields, found {}", table.source,
                                        row.line, table.header.size(), row.fields.size()));
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ValidationError(fmt::format("{}: empty file", table.source));
  return table;
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

std::string field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace multimax::csv
