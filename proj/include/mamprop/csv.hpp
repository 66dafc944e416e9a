#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mamprop {

/// A parsed comma-separated file. `line_numbers[i]` is the 1-based source line of `rows[i]`.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  /// Index of a header column, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, const std::string& source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

/// Quotes a cell when it contains a separator, quote or newline.
std::string csv_escape(std::string_view cell);
std::string csv_line(const std::vector<std::string>& cells);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Strict decimal parse of the whole cell (surrounding blanks allowed). Empty cell -> nullopt.
/// Throws SchemaError mentioning `where` when the cell is not a number.
std::optional<double> parse_number(std::string_view cell, const std::string& where);

std::string trim(std::string_view s);

}  // namespace mamprop
