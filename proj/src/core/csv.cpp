#include "mamprop/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mamprop/error.hpp"

namespace mamprop {

const char* error_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "E_IO";
    case ErrorKind::schema: return "E_SCHEMA";
    case ErrorKind::validation: return "E_VALIDATION";
    case ErrorKind::convergence: return "E_CONVERGENCE";
  }
  return "E_UNKNOWN";
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

CsvTable parse_csv(std::string_view text, const std::string& source) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }
  CsvTable table;
  std::vector<std::string> record;
  std::string cell;
  bool in_quotes = false;
  bool cell_was_quoted = false;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool record_has_content = false;

  auto finish_cell = [&] {
    record.push_back(cell_was_quoted ? cell : trim(cell));
    cell.clear();
    cell_was_quoted = false;
  };
  auto finish_record = [&] {
    finish_cell();
    const bool blank = record.size() == 1 && record[0].empty() && !record_has_content;
    if (!blank) {
      if (table.header.empty() && table.rows.empty()) {
        table.header = std::move(record);
      } else {
        table.rows.push_back(std::move(record));
        table.line_numbers.push_back(record_line);
      }
    }
    record.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        cell_was_quoted = true;
        record_has_content = true;
        break;
      case ',':
        finish_cell();
        record_has_content = true;
        break;
      case '\n':
        finish_record();
        ++line;
        record_line = line;
        break;
      case '\r':
        break;
      default:
        cell.push_back(c);
        record_has_content = true;
    }
  }
  if (in_quotes) {
    throw SchemaError(source + ":" + std::to_string(record_line) + ": unterminated quoted cell");
  }
  if (!cell.empty() || !record.empty() || record_has_content) finish_record();

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      throw SchemaError(source + ":" + std::to_string(table.line_numbers[r]) + ": expected " +
                        std::to_string(table.header.size()) + " cells, found " +
                        std::to_string(table.rows[r].size()));
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return parse_csv(buffer.str(), path.string());
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(cells[i]);
  }
  out.push_back('\n');
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf.data(), ptr);
}

std::optional<double> parse_number(std::string_view cell, const std::string& where) {
  const std::string s = trim(cell);
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  if (*first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw SchemaError(where + ": cannot parse '" + s + "' as a number");
  }
  return value;
}

}  // namespace mamprop
