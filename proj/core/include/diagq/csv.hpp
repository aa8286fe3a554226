#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace diagq::csv {

/// In-memory CSV table: a header row plus string cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
  /// Like column() but throws std::runtime_error naming the missing column.
  std::size_t require_column(std::string_view name) const;
};

/// Parses comma-delimited text with RFC-4180 quoting ("" escapes a quote,
/// quoted fields may contain commas and newlines). CRLF line ends accepted.
Table parse(std::string_view text);

Table read_file(const std::filesystem::path& path);

std::string to_string(const Table& table);

/// Writes via a temp file + rename so a failed run leaves no partial output.
void write_file(const std::filesystem::path& path, const Table& table);

/// Same atomic write for arbitrary text (JSON-lines traces, reports).
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace diagq::csv
